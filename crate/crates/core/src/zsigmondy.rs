//! Primitive divisors and Zsigmondy sets of `A_n = num φ_{T^n}(x)`, the
//! explicit upper bound on the largest Zsigmondy index, and checks of the
//! valuation and growth statements that feed into it.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::drinfeld::{DrinfeldError, DrinfeldModule, HeightEnclosure, OrbitTerm, TorsionVerdict};
use crate::gf::{Embedding, FieldDescriptor, GfError};
use crate::heights::{self, HeightError, Place, PlaceSet, Valuation};
use crate::polyring::{PolyError, Polynomial, RationalFunction};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ZsigError {
    #[error("Δ must be nonzero")]
    ZeroDelta,
    #[error("A_{0} = 0, the point is torsion")]
    ZeroTerm(usize),
    #[error("primitive parts are defined for n >= 1")]
    IndexZero,
    #[error("term {n} is beyond the computed orbit (last index {last})")]
    NotComputed { n: usize, last: usize },
    #[error("{0} is not a finite place")]
    NotFinite(String),
    #[error(transparent)]
    Drinfeld(#[from] DrinfeldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Height(#[from] HeightError),
    #[error(transparent)]
    Gf(#[from] GfError),
}

type Result<T> = std::result::Result<T, ZsigError>;

/// Outcome of a check that may be unable to decide.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verification {
    Verified(String),
    Inconclusive(String),
    Violated(String),
}

impl Verification {
    pub fn status(&self) -> &'static str {
        match self {
            Verification::Verified(_) => "verified",
            Verification::Inconclusive(_) => "inconclusive",
            Verification::Violated(_) => "violated",
        }
    }

    pub fn detail(&self) -> &str {
        match self {
            Verification::Verified(d) | Verification::Inconclusive(d) | Verification::Violated(d) => d,
        }
    }

    pub fn is_verified(&self) -> bool {
        matches!(self, Verification::Verified(_))
    }

    pub fn is_violated(&self) -> bool {
        matches!(self, Verification::Violated(_))
    }

    /// Violated beats inconclusive beats verified; details of the worst kind are kept.
    pub fn combine<I: IntoIterator<Item = Verification>>(items: I, empty: &str) -> Verification {
        let items: Vec<Verification> = items.into_iter().collect();
        if items.is_empty() {
            return Verification::Inconclusive(empty.to_string());
        }
        let pick = |want: &str| -> Vec<String> {
            items.iter().filter(|v| v.status() == want).map(|v| v.detail().to_string()).collect()
        };
        let bad = pick("violated");
        if !bad.is_empty() {
            return Verification::Violated(bad.join("; "));
        }
        let unsure = pick("inconclusive");
        if !unsure.is_empty() {
            return Verification::Inconclusive(unsure.join("; "));
        }
        Verification::Verified(format!("{} checks passed", items.len()))
    }
}

impl fmt::Display for Verification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.status(), self.detail())
    }
}

/// `{v | TΔ} ∪ {v_∞}`.
pub fn compute_s(m: &DrinfeldModule, seed: u64) -> Result<PlaceSet> {
    m.require_rank2()?;
    let delta = m.delta();
    if delta.is_zero() {
        return Err(ZsigError::ZeroDelta);
    }
    let mut s = PlaceSet::with_infinite();
    s.insert(Place::Finite(Polynomial::t(m.field())));
    if !delta.is_constant() {
        for p in delta.factor(seed)?.primes() {
            s.insert(Place::finite_unchecked(p.clone()));
        }
    }
    Ok(s)
}

/// Least common multiple of the degrees of the irreducible factors of `Δ`,
/// taken to be 1 when `Δ` is constant.
pub fn compute_n(delta: &Polynomial, seed: u64) -> Result<u64> {
    if delta.is_zero() {
        return Err(ZsigError::ZeroDelta);
    }
    if delta.is_constant() {
        return Ok(1);
    }
    Ok(delta
        .factor(seed)?
        .primes()
        .map(|p| p.deg().expect("nonzero") as u64)
        .fold(1, |acc, d| acc.lcm(&d)))
}

/// Whether every irreducible factor of `Δ` over its coefficient field is linear.
pub fn splits_completely(delta: &Polynomial, seed: u64) -> Result<bool> {
    if delta.is_zero() {
        return Err(ZsigError::ZeroDelta);
    }
    if delta.is_constant() {
        return Ok(true);
    }
    Ok(delta.factor(seed)?.primes().all(|p| p.deg() == Some(1)))
}

/// `C + ½ log_q D` with `C = 6(q^{2N} - 1)N|S| + 4` and `D = 2 + 2 deg g + 2 deg Δ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundDescriptor {
    pub q: u64,
    pub integer_part: BigUint,
    pub radicand: u64,
    pub n: u64,
    pub s_size: usize,
    /// `Δ` constant, so `N = 1` by convention.
    pub n_by_convention: bool,
    /// `g = 0`, counted as degree 0 in `D`.
    pub g_zero: bool,
}

impl BoundDescriptor {
    pub fn new(q: u64, n: u64, s_size: usize, deg_g: u64, deg_delta: u64) -> Self {
        let q2n = num_traits::pow(BigUint::from(q), 2 * n as usize);
        let integer_part = BigUint::from(6u32) * (q2n - 1u32) * n * s_size + 4u32;
        BoundDescriptor {
            q,
            integer_part,
            radicand: 2 + 2 * deg_g + 2 * deg_delta,
            n,
            s_size,
            n_by_convention: false,
            g_zero: false,
        }
    }

    /// Exact test of `n <= C + ½ log_q D`, i.e. `n <= C` or `q^{2(n-C)} <= D`.
    pub fn admits(&self, n: u64) -> bool {
        let n = BigUint::from(n);
        if n <= self.integer_part {
            return true;
        }
        let excess = (&n - &self.integer_part).to_u32();
        match excess {
            // q^{2e} >= 2^{2e} exceeds any u64 radicand once e > 32.
            Some(e) if e <= 32 => num_traits::pow(BigUint::from(self.q), 2 * e as usize) <= BigUint::from(self.radicand),
            _ => false,
        }
    }

    /// Floating-point value of the bound; display only.
    pub fn approx(&self) -> f64 {
        self.integer_part.to_f64().unwrap_or(f64::INFINITY) + self.fractional_part()
    }

    fn fractional_part(&self) -> f64 {
        0.5 * (self.radicand as f64).ln() / (self.q as f64).ln()
    }

    /// The bound to four decimals, with the integer part printed exactly.
    pub fn decimal(&self) -> String {
        let scaled = (self.fractional_part() * 1e4).round() as u64;
        format!("{}.{:04}", &self.integer_part + scaled / 10_000, scaled % 10_000)
    }
}

pub fn theorem_bound(m: &DrinfeldModule, seed: u64) -> Result<BoundDescriptor> {
    m.require_rank2()?;
    let s = compute_s(m, seed)?;
    let n = compute_n(m.delta(), seed)?;
    let deg_g = m.g().deg().unwrap_or(0) as u64;
    let deg_delta = m.delta().deg().expect("nonzero") as u64;
    let mut b = BoundDescriptor::new(m.q(), n, s.len(), deg_g, deg_delta);
    b.n_by_convention = m.delta().is_constant();
    b.g_zero = m.g().is_zero();
    Ok(b)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypothesis {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypotheses {
    pub checks: Vec<Hypothesis>,
    /// Every irreducible factor of `Δ` over `F_q` has degree 1.
    pub delta_splits: bool,
    pub torsion: Option<TorsionVerdict>,
}

impl Hypotheses {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|h| h.passed)
    }

    pub fn passed(&self, name: &str) -> bool {
        self.checks.iter().any(|h| h.name == name && h.passed)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|h| !h.passed).map(|h| h.name).collect()
    }
}

pub const HYP_RANK: &str = "rank";
pub const HYP_COEFFICIENTS: &str = "coefficients";
pub const HYP_COPRIMALITY: &str = "coprimality";
pub const HYP_POLYNOMIAL_POINT: &str = "polynomial_point";
pub const HYP_NON_TORSION: &str = "non_torsion";

/// Evaluates the standing hypotheses; failures become entries, not errors.
pub fn check_hypotheses(m: &DrinfeldModule, x: &RationalFunction, seed: u64, budget: usize) -> Result<Hypotheses> {
    let mut checks = Vec::new();
    let rank_ok = m.rank() == 2;
    checks.push(Hypothesis { name: HYP_RANK, passed: rank_ok, detail: format!("rank {}", m.rank()) });

    let over_fq = m.coeffs().iter().all(|c| c.in_subfield(m.q()));
    let coeff_ok = over_fq && !m.delta().is_zero();
    checks.push(Hypothesis {
        name: HYP_COEFFICIENTS,
        passed: coeff_ok,
        detail: if coeff_ok {
            format!("g, Δ in F_{}[T], Δ != 0", m.q())
        } else {
            format!("coefficients not in F_{}[T]", m.q())
        },
    });

    let t = Polynomial::t(m.field());
    let phi1 = if rank_ok { t.add(m.g()).add(m.delta()) } else { m.coeffs().iter().fold(t.clone(), |a, c| a.add(c)) };
    let g = phi1.gcd(&t.mul(m.delta()))?;
    checks.push(Hypothesis {
        name: HYP_COPRIMALITY,
        passed: g.is_one(),
        detail: format!("φ_T(1) = {phi1}, gcd with TΔ = {g}"),
    });

    let poly_ok = x.is_polynomial();
    checks.push(Hypothesis {
        name: HYP_POLYNOMIAL_POINT,
        passed: poly_ok,
        detail: if poly_ok { "x in F_q[T]".into() } else { format!("x = {x} has a denominator") },
    });

    let mut torsion = None;
    let (nt_ok, nt_detail) = if !rank_ok {
        (false, "not evaluated: requires rank 2".to_string())
    } else if !poly_ok {
        (false, "not evaluated: x is not a polynomial".to_string())
    } else {
        let s = compute_s(m, seed)?;
        let v = m.is_torsion(x.numerator(), &s, budget)?;
        torsion = Some(v);
        match v {
            TorsionVerdict::NonTorsion { level } => (true, format!("ĥ(x) > 0 certified at n = {level}")),
            TorsionVerdict::Torsion { level } => (false, format!("torsion, detected at n = {level}")),
            TorsionVerdict::Undecided { level } => (false, format!("undecided: budget exhausted after n = {level}")),
        }
    };
    checks.push(Hypothesis { name: HYP_NON_TORSION, passed: nt_ok, detail: nt_detail });

    Ok(Hypotheses { checks, delta_splits: splits_completely(m.delta(), seed)?, torsion })
}

/// The orbit `A_0/B_0, ..., A_L/B_L` with `L <= n_max`.
#[derive(Clone, Debug)]
pub struct DivisibilitySequence {
    pub terms: Vec<OrbitTerm>,
    /// First index refused by the degree budget, if any.
    pub stopped_at: Option<usize>,
    pub n_max: usize,
}

impl DivisibilitySequence {
    pub fn compute(m: &DrinfeldModule, x: &RationalFunction, n_max: usize, budget: usize) -> Result<Self> {
        let orbit = m.orbit_within_budget(x, n_max, budget)?;
        Ok(DivisibilitySequence { terms: orbit.terms, stopped_at: orbit.stopped_at, n_max })
    }

    pub fn last_index(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn is_partial(&self) -> bool {
        self.stopped_at.is_some()
    }

    pub fn is_polynomial(&self) -> bool {
        self.terms[0].value.is_polynomial()
    }

    pub fn a(&self, n: usize) -> Result<&Polynomial> {
        self.terms
            .get(n)
            .map(|t| t.numerator())
            .ok_or(ZsigError::NotComputed { n, last: self.last_index() })
    }

    fn coprime_to_earlier(&self, n: usize, from: usize) -> Result<Polynomial> {
        if n == 0 {
            return Err(ZsigError::IndexZero);
        }
        let an = self.a(n)?;
        if an.is_zero() {
            return Err(ZsigError::ZeroTerm(n));
        }
        let mut c = an.monic();
        // For polynomial x, A_i | A_{n-1} whenever 1 <= i <= n-1.
        let earlier: Vec<usize> = if self.is_polynomial() {
            let mut v = Vec::new();
            if from == 0 {
                v.push(0);
            }
            if n > 1 {
                v.push(n - 1);
            }
            v
        } else {
            (from..n).collect()
        };
        for i in earlier {
            c = c.coprime_part(self.a(i)?)?;
        }
        Ok(c)
    }

    /// Largest monic divisor of `A_n` coprime to `A_0 A_1 ... A_{n-1}`.
    pub fn primitive_part(&self, n: usize) -> Result<Polynomial> {
        self.coprime_to_earlier(n, 0)
    }

    /// As [`primitive_part`](Self::primitive_part) but ignoring `A_0`.
    pub fn primitive_part_excluding_a0(&self, n: usize) -> Result<Polynomial> {
        self.coprime_to_earlier(n, 1)
    }

    pub fn has_primitive(&self, n: usize) -> Result<bool> {
        Ok(!self.primitive_part(n)?.is_constant())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Gcd,
    Factor,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Gcd => "gcd",
            Method::Factor => "factor",
        }
    }
}

/// Factorization of `A_n` and the primes not seen in `A_0, ..., A_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorStep {
    pub n: usize,
    pub factors: Vec<(Polynomial, u32)>,
    pub new_primes: Vec<Polynomial>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZsigmondySet {
    pub method: Method,
    /// Largest index examined.
    pub upto: usize,
    pub members: BTreeSet<usize>,
    /// Members when `A_0` is left out of the primitivity test.
    pub members_excluding_a0: BTreeSet<usize>,
    /// Per-`n` primitivity, index `n - 1`.
    pub has_primitive: Vec<bool>,
    /// Filled by the factor method only.
    pub transcript: Vec<FactorStep>,
}

impl ZsigmondySet {
    pub fn max(&self) -> Option<usize> {
        self.members.iter().next_back().copied()
    }
}

/// `{1 <= n <= upto : A_n has no primitive divisor}` with `upto` capped at
/// the last computed term.
pub fn zsigmondy_set(seq: &DivisibilitySequence, method: Method, upto: usize, seed: u64) -> Result<ZsigmondySet> {
    let upto = upto.min(seq.last_index());
    let mut out = ZsigmondySet {
        method,
        upto,
        members: BTreeSet::new(),
        members_excluding_a0: BTreeSet::new(),
        has_primitive: Vec::new(),
        transcript: Vec::new(),
    };
    match method {
        Method::Gcd => {
            for n in 1..=upto {
                let prim = seq.has_primitive(n)?;
                out.has_primitive.push(prim);
                if !prim {
                    out.members.insert(n);
                }
                if seq.primitive_part_excluding_a0(n)?.is_constant() {
                    out.members_excluding_a0.insert(n);
                }
            }
        }
        Method::Factor => {
            let primes_of = |a: &Polynomial| -> Result<Vec<(Polynomial, u32)>> {
                if a.is_zero() {
                    return Err(ZsigError::ZeroTerm(0));
                }
                if a.is_constant() {
                    return Ok(Vec::new());
                }
                Ok(a.factor(seed)?.factors)
            };
            let a0_primes: BTreeSet<Polynomial> = primes_of(seq.a(0)?)?.into_iter().map(|(p, _)| p).collect();
            let mut seen = a0_primes.clone();
            let mut seen_from_one: BTreeSet<Polynomial> = BTreeSet::new();
            for n in 1..=upto {
                let an = seq.a(n)?;
                if an.is_zero() {
                    return Err(ZsigError::ZeroTerm(n));
                }
                let factors = primes_of(an)?;
                let new_primes: Vec<Polynomial> =
                    factors.iter().map(|(p, _)| p).filter(|p| !seen.contains(*p)).cloned().collect();
                let new_from_one = factors.iter().any(|(p, _)| !seen_from_one.contains(p));
                out.has_primitive.push(!new_primes.is_empty());
                if new_primes.is_empty() {
                    out.members.insert(n);
                }
                if !new_from_one {
                    out.members_excluding_a0.insert(n);
                }
                for (p, _) in &factors {
                    seen.insert(p.clone());
                    seen_from_one.insert(p.clone());
                }
                out.transcript.push(FactorStep { n, factors, new_primes });
            }
        }
    }
    Ok(out)
}

/// How the largest computed Zsigmondy index compares with the bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Consistent { max: Option<usize> },
    Exceeds { max: usize },
    /// Hypotheses failed or were overridden; the bound makes no claim.
    Suppressed,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Consistent { .. } => "consistent",
            Verdict::Exceeds { .. } => "violated",
            Verdict::Suppressed => "suppressed",
        }
    }
}

pub fn verdict(set: &ZsigmondySet, bound: &BoundDescriptor, hypotheses_hold: bool) -> Verdict {
    if !hypotheses_hold {
        return Verdict::Suppressed;
    }
    match set.max() {
        Some(max) if !bound.admits(max as u64) => Verdict::Exceeds { max },
        max => Verdict::Consistent { max },
    }
}

/// One row of the report table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRecord {
    pub n: usize,
    pub a: Polynomial,
    pub b: Polynomial,
    /// `None` when `A_n = 0`.
    pub deg_a: Option<usize>,
    pub norm_s_log: Option<u64>,
    /// `None` for `n = 0` and for `A_n = 0`.
    pub primitive_part_degree: Option<usize>,
    pub has_primitive: Option<bool>,
    pub valuations_at_s: Vec<(Place, Valuation)>,
}

pub fn orbit_records(seq: &DivisibilitySequence, s: &PlaceSet) -> Result<Vec<OrbitRecord>> {
    let mut out = Vec::with_capacity(seq.terms.len());
    for term in &seq.terms {
        let a = term.numerator().clone();
        let (ppd, hp) = if term.n == 0 || a.is_zero() {
            (None, None)
        } else {
            let pp = seq.primitive_part(term.n)?;
            let d = pp.deg().expect("nonzero");
            (Some(d), Some(d >= 1))
        };
        let valuations_at_s =
            s.iter().map(|v| Ok((v.clone(), heights::valuation_poly(v, &a)?))).collect::<Result<Vec<_>>>()?;
        out.push(OrbitRecord {
            n: term.n,
            deg_a: a.deg(),
            norm_s_log: if a.is_zero() { None } else { Some(heights::norm_s_log(&a, s)?) },
            primitive_part_degree: ppd,
            has_primitive: hp,
            valuations_at_s,
            b: term.denominator().clone(),
            a,
        });
    }
    Ok(out)
}

/// Least `n >= 1` with `ord_v(A_n) > 0`, or `Beyond(L)` if none up to the last computed index `L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Apparition {
    At(usize),
    Beyond(usize),
}

fn ord(v: &Place, a: &Polynomial) -> Result<Valuation> {
    Ok(heights::valuation_poly(v, a)?)
}

pub fn rank_of_apparition(v: &Place, seq: &DivisibilitySequence) -> Result<Apparition> {
    if v.is_infinite() {
        return Err(ZsigError::NotFinite(v.to_string()));
    }
    for n in 1..=seq.last_index() {
        match ord(v, seq.a(n)?)? {
            Valuation::Finite(0) => {}
            _ => return Ok(Apparition::At(n)),
        }
    }
    Ok(Apparition::Beyond(seq.last_index()))
}

/// Before the rank of apparition `r_v` the valuation vanishes; after it the
/// valuation is constant. The first clause is read on `A_1, A_2, ...`, so it
/// constrains `A_{l-1}` only for `2 <= l <= r_v`.
pub fn verify_apparition_lemma(v: &Place, seq: &DivisibilitySequence) -> Result<Verification> {
    let Some(prime) = v.prime() else {
        return Ok(Verification::Inconclusive(format!("{v}: precondition unmet, not a finite place")));
    };
    if prime.deg() == Some(1) && prime.coeff(0) == 0 {
        return Ok(Verification::Inconclusive(format!("{v}: precondition unmet, v(T) != 0")));
    }
    let last = seq.last_index();
    if last == 0 {
        return Ok(Verification::Inconclusive(format!("{v}: no terms beyond A_0")));
    }
    let r = rank_of_apparition(v, seq)?;
    let r_v = match r {
        Apparition::At(n) => n,
        Apparition::Beyond(_) => usize::MAX,
    };
    let vals: Vec<Valuation> = (0..=last).map(|n| ord(v, seq.a(n)?)).collect::<Result<_>>()?;
    for l in 2..=last {
        if l <= r_v {
            if vals[l - 1] != Valuation::Finite(0) {
                return Ok(Verification::Violated(format!(
                    "{v}: l = {l} <= r_v but ord_v(A_{}) = {:?}",
                    l - 1,
                    vals[l - 1]
                )));
            }
        } else if vals[l] != vals[l - 1] {
            return Ok(Verification::Violated(format!(
                "{v}: l = {l} > r_v = {r_v} but ord_v(A_{l}) = {:?} != ord_v(A_{}) = {:?}",
                vals[l],
                l - 1,
                vals[l - 1]
            )));
        }
    }
    let r_text = match r {
        Apparition::At(n) => n.to_string(),
        Apparition::Beyond(n) => format!("> {n}"),
    };
    Ok(Verification::Verified(format!("{v}: r_v = {r_text}, both clauses hold for l <= {last}")))
}

/// `ord_v(A_n) = 0` for every finite `v ∈ S` and `1 <= n <= L`, under the
/// split-completely and coprimality hypotheses. The argument also needs
/// `x` to be a unit at each finite place of `S`; otherwise the result is
/// inconclusive.
pub fn verify_local_vanishing(
    m: &DrinfeldModule,
    seq: &DivisibilitySequence,
    s: &PlaceSet,
    hyp: &Hypotheses,
) -> Result<Verification> {
    let mut unmet = Vec::new();
    if !hyp.passed(HYP_RANK) {
        unmet.push("rank 2".to_string());
    }
    if !hyp.delta_splits {
        unmet.push("Δ split completely over F_q".to_string());
    }
    if !hyp.passed(HYP_COPRIMALITY) {
        unmet.push("φ_T(1) coprime to TΔ".to_string());
    }
    if !seq.is_polynomial() {
        unmet.push("x in F_q[T]".to_string());
    }
    let x = seq.a(0)?;
    if x.is_zero() {
        unmet.push("x != 0".to_string());
    } else {
        for v in s.finite_places() {
            if ord(v, x)? != Valuation::Finite(0) {
                unmet.push(format!("x a unit at {v}"));
            }
        }
    }
    if !unmet.is_empty() {
        return Ok(Verification::Inconclusive(format!("preconditions unmet: {}", unmet.join(", "))));
    }
    let _ = m;
    let mut checked = 0usize;
    for n in 1..=seq.last_index() {
        let a = seq.a(n)?;
        for v in s.finite_places() {
            let e = ord(v, a)?;
            if e != Valuation::Finite(0) {
                return Ok(Verification::Violated(format!("ord_{v}(A_{n}) = {e:?}")));
            }
            checked += 1;
        }
    }
    Ok(Verification::Verified(format!(
        "ord_v(A_n) = 0 for {checked} (v, n) pairs, n <= {}",
        seq.last_index()
    )))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthRow {
    pub n: usize,
    /// `log_q Nr^S(A_n) - log_q Nr^S(A_{n-1})`.
    pub lhs: i64,
    pub rhs_low: BigRational,
    pub rhs_up: BigRational,
    pub outcome: Verification,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthCheck {
    pub enclosure: Option<HeightEnclosure>,
    pub n0: Option<usize>,
    pub rows: Vec<GrowthRow>,
    pub overall: Verification,
}

/// Smallest `n >= 1` with `q^{2(n-1)} >= 2M'/h_low`, i.e.
/// `n >= ½(log_q 2M' - log_q h_low) + 1`.
pub fn growth_threshold(q: u64, m_prime: &BigRational, h_low: &BigRational) -> usize {
    let target = BigRational::from_integer(BigInt::from(2)) * m_prime / h_low;
    let q2 = BigRational::from_integer(BigInt::from(q * q));
    let mut power = BigRational::one();
    let mut n = 1usize;
    while power < target {
        power *= &q2;
        n += 1;
    }
    n
}

/// Checks `log_q Nr^S(A_n)/Nr^S(A_{n-1}) >= (Θ - 3/2)Θ^{n-1}ĥ(x) - M_φ` for
/// `n_0 < n <= L`, bracketing `ĥ(x)` by the enclosure at the last level `L`.
pub fn verify_growth_inequality(
    m: &DrinfeldModule,
    seq: &DivisibilitySequence,
    s: &PlaceSet,
    hypotheses_hold: bool,
) -> Result<GrowthCheck> {
    let inconclusive = |why: &str, enclosure| GrowthCheck {
        enclosure,
        n0: None,
        rows: Vec::new(),
        overall: Verification::Inconclusive(why.to_string()),
    };
    if !hypotheses_hold {
        return Ok(inconclusive("preconditions unmet: hypotheses do not hold", None));
    }
    m.require_rank2()?;
    let last = seq.last_index();
    if last == 0 {
        return Ok(inconclusive("no terms beyond A_0", None));
    }
    let enc = m.enclosure_from_height(heights::height(&seq.terms[last].value), last);
    if !enc.lower.is_positive() {
        return Ok(inconclusive("enclosure lower bound is not positive", Some(enc)));
    }
    let k = m.height_constants();
    let n0 = growth_threshold(m.q(), &k.m_phi_prime, &enc.lower);
    let theta = BigRational::from_integer(BigInt::from(m.theta()));
    let slope = &theta - BigRational::new(BigInt::from(3), BigInt::from(2));
    let mut rows = Vec::new();
    let mut theta_pow = num_traits::pow(theta.clone(), n0);
    for n in (n0 + 1)..=last {
        let cur = heights::norm_s_log(seq.a(n)?, s)? as i64;
        let prev = heights::norm_s_log(seq.a(n - 1)?, s)? as i64;
        let lhs = cur - prev;
        let rhs = |h: &BigRational| &slope * &theta_pow * h - &k.m_phi;
        let (rhs_low, rhs_up) = (rhs(&enc.lower), rhs(&enc.upper));
        let l = BigRational::from_integer(BigInt::from(lhs));
        let outcome = if l >= rhs_up {
            Verification::Verified(format!("n = {n}: {lhs} >= {rhs_up}"))
        } else if l >= rhs_low {
            Verification::Inconclusive(format!("n = {n}: {rhs_low} <= {lhs} < {rhs_up}"))
        } else {
            Verification::Violated(format!("n = {n}: {lhs} < {rhs_low}"))
        };
        rows.push(GrowthRow { n, lhs, rhs_low, rhs_up, outcome });
        theta_pow *= &theta;
    }
    let overall = Verification::combine(
        rows.iter().map(|r| r.outcome.clone()),
        &format!("no n in ({n0}, {last}]"),
    );
    let overall = match overall {
        Verification::Verified(_) => Verification::Verified(format!("all n in ({n0}, {last}] verified")),
        other => other,
    };
    Ok(GrowthCheck { enclosure: Some(enc), n0: Some(n0), rows, overall })
}

/// The auxiliary module over `F_{q^N}` in which `Δ` splits.
#[derive(Clone, Debug)]
pub struct BaseChange {
    pub degree: u64,
    pub embedding: Embedding,
    pub module: DrinfeldModule,
    pub x: Polynomial,
}

pub fn base_change(m: &DrinfeldModule, x: &Polynomial, seed: u64) -> Result<BaseChange> {
    m.require_rank2()?;
    let n = compute_n(m.delta(), seed)?;
    let f = m.field();
    let k = f.degree() as u64 * n;
    let ext = FieldDescriptor::new(f.characteristic(), u32::try_from(k).map_err(|_| GfError::TooLarge {
        p: f.characteristic(),
        k: u32::MAX,
        cap: crate::gf::DEFAULT_SIZE_CAP,
    })?)?;
    let embedding = Embedding::canonical(f, &ext)?;
    let module = m.base_change(&embedding)?;
    let x = x.lift(&embedding)?;
    Ok(BaseChange { degree: n, embedding, module, x })
}

#[derive(Clone, Debug)]
pub struct BaseChangeCheck {
    pub degree: u64,
    pub extension_cardinality: u64,
    pub delta_factors: Vec<(Polynomial, u32)>,
    pub splits_completely: bool,
    pub distinct_factors: bool,
    pub base_set: Option<ZsigmondySet>,
    pub extension_set: Option<ZsigmondySet>,
    pub verification: Verification,
}

/// Compares factor-method Zsigmondy sets over `F_q` and `F_{q^N}` for `n <= upto`.
pub fn verify_zsigmondy_equality(
    m: &DrinfeldModule,
    x: &Polynomial,
    upto: usize,
    seed: u64,
    budget: usize,
) -> Result<BaseChangeCheck> {
    let bc = base_change(m, x, seed)?;
    let ext = bc.module.field().clone();
    let delta_factors = if bc.module.delta().is_constant() {
        Vec::new()
    } else {
        bc.module.delta().factor(seed)?.factors
    };
    let splits = delta_factors.iter().all(|(p, _)| p.deg() == Some(1));
    let distinct = delta_factors.iter().all(|(_, e)| *e == 1);
    if bc.degree == 1 {
        return Ok(BaseChangeCheck {
            degree: 1,
            extension_cardinality: ext.cardinality(),
            delta_factors,
            splits_completely: splits,
            distinct_factors: distinct,
            base_set: None,
            extension_set: None,
            verification: Verification::Verified("N = 1: base change is the identity".into()),
        });
    }
    let base_seq = DivisibilitySequence::compute(m, &x.clone().into(), upto, budget)?;
    let ext_seq = DivisibilitySequence::compute(&bc.module, &bc.x.clone().into(), upto, budget)?;
    let reach = base_seq.last_index().min(ext_seq.last_index());
    let base_set = zsigmondy_set(&base_seq, Method::Factor, reach, seed)?;
    let ext_set = zsigmondy_set(&ext_seq, Method::Factor, reach, seed)?;
    let verification = if !splits {
        Verification::Violated(format!("Δ does not split over F_{}", ext.cardinality()))
    } else if base_set.members != ext_set.members {
        Verification::Violated(format!(
            "sets differ for n <= {reach}: {:?} over F_{} vs {:?} over F_{}",
            base_set.members,
            m.field().cardinality(),
            ext_set.members,
            ext.cardinality()
        ))
    } else if reach < upto {
        Verification::Inconclusive(format!("sets agree for n <= {reach}; budget stopped before n = {upto}"))
    } else {
        Verification::Verified(format!(
            "sets agree for n <= {reach} over F_{} and F_{}: {:?}",
            m.field().cardinality(),
            ext.cardinality(),
            base_set.members
        ))
    };
    Ok(BaseChangeCheck {
        degree: bc.degree,
        extension_cardinality: ext.cardinality(),
        delta_factors,
        splits_completely: splits,
        distinct_factors: distinct,
        base_set: Some(base_set),
        extension_set: Some(ext_set),
        verification,
    })
}

/// `ord_v(A_n)` is non-decreasing in `n` for finite `v` with `v(T) = 0`.
pub fn valuations_monotone(v: &Place, seq: &DivisibilitySequence) -> Result<bool> {
    let mut prev = Valuation::Finite(0);
    for n in 1..=seq.last_index() {
        let e = ord(v, seq.a(n)?)?;
        if e < prev {
            return Ok(false);
        }
        prev = e;
    }
    Ok(true)
}

/// Finite places `v != (T)` dividing some `A_n`, `1 <= n <= upto`.
pub fn sample_places(seq: &DivisibilitySequence, upto: usize, seed: u64) -> Result<Vec<Place>> {
    let mut out = BTreeSet::new();
    for n in 1..=upto.min(seq.last_index()) {
        let a = seq.a(n)?;
        if a.is_zero() || a.is_constant() {
            continue;
        }
        for p in a.factor(seed)?.primes() {
            if !(p.deg() == Some(1) && p.coeff(0) == 0) {
                out.insert(Place::Finite(p.clone()));
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Exact rational `a/b`.
pub fn rational(a: i64, b: i64) -> BigRational {
    assert!(!b.is_zero(), "zero denominator");
    BigRational::new(BigInt::from(a), BigInt::from(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drinfeld::DEFAULT_DEGREE_BUDGET;
    use crate::gf::Field;

    const B: usize = DEFAULT_DEGREE_BUDGET;

    fn f(p: u64, k: u32) -> Field {
        FieldDescriptor::new(p, k).unwrap()
    }

    fn poly(f: &Field, c: &[u64]) -> Polynomial {
        Polynomial::from_ints(f, c)
    }

    fn module(f: &Field, g: &[u64], d: &[u64]) -> DrinfeldModule {
        DrinfeldModule::rank2(poly(f, g), poly(f, d)).unwrap()
    }

    fn running() -> DrinfeldModule {
        module(&f(3, 1), &[1], &[1])
    }

    fn seq(m: &DrinfeldModule, x: &[u64], n: usize) -> DivisibilitySequence {
        DivisibilitySequence::compute(m, &poly(m.field(), x).into(), n, B).unwrap()
    }

    #[test]
    fn s_examples() {
        let f3 = f(3, 1);
        let s = compute_s(&running(), 0).unwrap();
        assert_eq!(s.len(), 2);
        assert!(s.contains(&Place::Finite(Polynomial::t(&f3))) && s.contains_infinite());
        assert_eq!(compute_s(&module(&f3, &[1], &[0, 1]), 0).unwrap().len(), 2);
        let s3 = compute_s(&module(&f3, &[1], &[1, 0, 1]), 0).unwrap();
        assert_eq!(s3.len(), 3);
        assert!(s3.contains(&Place::Finite(poly(&f3, &[1, 0, 1]))));
    }

    #[test]
    fn n_examples() {
        let f3 = f(3, 1);
        assert_eq!(compute_n(&poly(&f3, &[1]), 0).unwrap(), 1);
        assert_eq!(compute_n(&poly(&f3, &[1, 0, 1]), 0).unwrap(), 2);
        assert_eq!(compute_n(&poly(&f3, &[0, 1, 0, 1]), 0).unwrap(), 2);
        assert_eq!(compute_n(&Polynomial::zero(&f3), 0).unwrap_err(), ZsigError::ZeroDelta);
    }

    #[test]
    fn bound_examples() {
        let b = theorem_bound(&running(), 0).unwrap();
        assert_eq!(b.integer_part, BigUint::from(100u32));
        assert_eq!(b.radicand, 2);
        assert_eq!(b.decimal(), "100.3155");
        assert!(b.n_by_convention);
        assert!(b.admits(100) && !b.admits(101));

        let b2 = theorem_bound(&module(&f(2, 1), &[1], &[1]), 0).unwrap();
        assert_eq!(b2.integer_part, BigUint::from(40u32));
        assert_eq!(b2.decimal(), "40.5000");
        // 2^{2·1} = 4 > 2
        assert!(!b2.admits(41));

        let b3 = theorem_bound(&module(&f(3, 1), &[1], &[1, 0, 1]), 0).unwrap();
        assert_eq!((b3.n, b3.s_size, b3.radicand), (2, 3, 6));
        assert_eq!(b3.integer_part, BigUint::from(2884u32));
        assert_eq!(b3.decimal(), "2884.8155");
    }

    #[test]
    fn bound_fraction_beyond_one() {
        // D = 2 + 2·3 + 2·4 = 16 over F_2: ½ log_2 16 = 2.
        let b = BoundDescriptor::new(2, 1, 2, 3, 4);
        assert_eq!(b.integer_part, BigUint::from(40u32));
        assert_eq!(b.decimal(), "42.0000");
        assert!(b.admits(42) && !b.admits(43));
    }

    #[test]
    fn hypothesis_examples() {
        let f3 = f(3, 1);
        let h = check_hypotheses(&running(), &RationalFunction::one(&f3), 0, B).unwrap();
        assert!(h.all_passed(), "{h:?}");
        assert!(h.delta_splits);

        let f2 = f(2, 1);
        let h2 = check_hypotheses(&module(&f2, &[1], &[1]), &RationalFunction::one(&f2), 0, B).unwrap();
        assert_eq!(h2.failed(), vec![HYP_COPRIMALITY]);

        let h0 = check_hypotheses(&running(), &RationalFunction::zero(&f3), 0, B).unwrap();
        assert_eq!(h0.failed(), vec![HYP_NON_TORSION]);

        let hd = check_hypotheses(&module(&f3, &[1], &[1, 0, 1]), &RationalFunction::one(&f3), 0, B).unwrap();
        assert!(hd.all_passed());
        assert!(!hd.delta_splits);
    }

    #[test]
    fn primitive_parts_of_running_instance() {
        let m = running();
        let s = seq(&m, &[1], 4);
        assert_eq!(s.primitive_part(1).unwrap(), poly(m.field(), &[2, 1]));
        let pp2 = s.primitive_part(2).unwrap();
        assert_eq!(pp2.deg(), Some(8));
        assert_eq!(pp2.mul(&poly(m.field(), &[2, 1])), *s.a(2).unwrap());
        assert_eq!(s.primitive_part(0).unwrap_err(), ZsigError::IndexZero);
        let z = zsigmondy_set(&s, Method::Gcd, 4, 0).unwrap();
        assert!(z.members.is_empty());
        assert_eq!(z.has_primitive, vec![true; 4]);
    }

    #[test]
    fn gcd_and_factor_methods_agree() {
        let f3 = f(3, 1);
        let f2 = f(2, 1);
        for (m, x) in [
            (running(), vec![1]),
            (module(&f3, &[1], &[1, 0, 1]), vec![1]),
            (module(&f3, &[0, 1], &[2]), vec![1, 1]),
            (module(&f2, &[0, 1], &[1, 1]), vec![1, 1]),
        ] {
            let s = seq(&m, &x, 3);
            let a = zsigmondy_set(&s, Method::Gcd, 3, 0).unwrap();
            let b = zsigmondy_set(&s, Method::Factor, 3, 0).unwrap();
            assert_eq!(a.has_primitive, b.has_primitive, "{m:?}");
            assert_eq!(a.members_excluding_a0, b.members_excluding_a0);
        }
    }

    #[test]
    fn a0_changes_primitivity() {
        // F_2, g = T^2 + T + 1, Δ = 1, x = T: A_1 = T^2 + (T^2+T+1)T^2 + T^4 = T^3.
        let f2 = f(2, 1);
        let m = module(&f2, &[1, 1, 1], &[1]);
        let s = seq(&m, &[0, 1], 2);
        assert_eq!(s.a(1).unwrap(), &poly(&f2, &[0, 0, 0, 1]));
        for method in [Method::Gcd, Method::Factor] {
            let z = zsigmondy_set(&s, method, 2, 0).unwrap();
            assert!(z.members.contains(&1));
            assert!(!z.members_excluding_a0.contains(&1));
        }
    }

    #[test]
    fn apparition_examples() {
        let m = running();
        let f3 = m.field().clone();
        let s = seq(&m, &[1], 3);
        let v = Place::finite(&poly(&f3, &[2, 1])).unwrap();
        assert_eq!(rank_of_apparition(&v, &s).unwrap(), Apparition::At(1));
        assert!(verify_apparition_lemma(&v, &s).unwrap().is_verified());
        let t = Place::Finite(Polynomial::t(&f3));
        assert_eq!(rank_of_apparition(&t, &s).unwrap(), Apparition::Beyond(3));
        assert_eq!(verify_apparition_lemma(&t, &s).unwrap().status(), "inconclusive");
        // T^2 + 1 divides none of A_1, A_2, A_3: both clauses hold vacuously or trivially.
        let far = Place::finite(&poly(&f3, &[1, 0, 1])).unwrap();
        assert_eq!(rank_of_apparition(&far, &s).unwrap(), Apparition::Beyond(3));
        assert!(verify_apparition_lemma(&far, &s).unwrap().is_verified());
        for v in sample_places(&s, 3, 0).unwrap() {
            assert!(verify_apparition_lemma(&v, &s).unwrap().is_verified());
            assert!(valuations_monotone(&v, &s).unwrap());
        }
    }

    #[test]
    fn local_vanishing_examples() {
        let m = running();
        let f3 = m.field().clone();
        let s_places = compute_s(&m, 0).unwrap();
        let h = check_hypotheses(&m, &RationalFunction::one(&f3), 0, B).unwrap();
        let s = seq(&m, &[1], 4);
        assert!(verify_local_vanishing(&m, &s, &s_places, &h).unwrap().is_verified());

        let f2 = f(2, 1);
        let bad = module(&f2, &[1], &[1]);
        let hb = check_hypotheses(&bad, &RationalFunction::one(&f2), 0, B).unwrap();
        let sb = seq(&bad, &[1], 3);
        let sp = compute_s(&bad, 0).unwrap();
        let r = verify_local_vanishing(&bad, &sb, &sp, &hb).unwrap();
        assert!(r.detail().starts_with("preconditions unmet"));
    }

    #[test]
    fn local_vanishing_needs_x_coprime_to_s() {
        // x = T: T divides every term of φ_T(T), so T | A_1 even though the stated hypotheses hold.
        let m = running();
        let f3 = m.field().clone();
        let x: RationalFunction = Polynomial::t(&f3).into();
        let h = check_hypotheses(&m, &x, 0, B).unwrap();
        assert!(h.all_passed() && h.delta_splits);
        let s = seq(&m, &[0, 1], 2);
        let t = Place::Finite(Polynomial::t(&f3));
        // A_1 = T^2 + T^3 + T^9
        assert_eq!(heights::valuation_poly(&t, s.a(1).unwrap()).unwrap(), Valuation::Finite(2));
        let sp = compute_s(&m, 0).unwrap();
        let r = verify_local_vanishing(&m, &s, &sp, &h).unwrap();
        assert_eq!(r.status(), "inconclusive");
        assert!(r.detail().contains("x a unit at (T)"));
    }

    #[test]
    fn growth_on_running_instance() {
        let m = running();
        let k = m.height_constants();
        assert_eq!(growth_threshold(3, &k.m_phi_prime, &rational(47, 432)), 2);
        let s = seq(&m, &[1], 5);
        let sp = compute_s(&m, 0).unwrap();
        let g = verify_growth_inequality(&m, &s, &sp, true).unwrap();
        assert!(g.overall.is_verified(), "{:?}", g.overall);
        assert_eq!(g.rows.iter().map(|r| r.n).collect::<Vec<_>>(), vec![3, 4, 5]);
        assert_eq!(g.rows[0].lhs, 72);
        let unmet = verify_growth_inequality(&m, &s, &sp, false).unwrap();
        assert_eq!(unmet.overall.status(), "inconclusive");
    }

    #[test]
    fn base_change_example() {
        let f3 = f(3, 1);
        let m = module(&f3, &[1], &[1, 0, 1]);
        let chk = verify_zsigmondy_equality(&m, &Polynomial::one(&f3), 3, 0, B).unwrap();
        assert_eq!(chk.degree, 2);
        assert_eq!(chk.extension_cardinality, 9);
        assert!(chk.splits_completely && chk.distinct_factors);
        assert_eq!(chk.delta_factors.len(), 2);
        assert!(chk.verification.is_verified(), "{:?}", chk.verification);

        let trivial = verify_zsigmondy_equality(&running(), &Polynomial::one(&f3), 3, 0, B).unwrap();
        assert!(trivial.verification.is_verified());
        assert_eq!(trivial.degree, 1);
    }

    #[test]
    fn verdict_examples() {
        let m = running();
        let b = theorem_bound(&m, 0).unwrap();
        let s = seq(&m, &[1], 3);
        let z = zsigmondy_set(&s, Method::Gcd, 3, 0).unwrap();
        assert_eq!(verdict(&z, &b, true), Verdict::Consistent { max: None });
        assert_eq!(verdict(&z, &b, false), Verdict::Suppressed);
        let mut fake = z.clone();
        fake.members.insert(101);
        assert_eq!(verdict(&fake, &b, true), Verdict::Exceeds { max: 101 });
    }

    #[test]
    fn records_carry_norms_and_valuations() {
        let m = running();
        let s = seq(&m, &[1], 3);
        let sp = compute_s(&m, 0).unwrap();
        let recs = orbit_records(&s, &sp).unwrap();
        assert_eq!(recs.len(), 4);
        assert_eq!(recs[0].primitive_part_degree, None);
        assert_eq!(recs[2].primitive_part_degree, Some(8));
        for r in &recs[1..] {
            assert_eq!(r.norm_s_log, r.deg_a.map(|d| d as u64));
            assert!(r.b.is_one());
        }
    }

    #[test]
    fn combine_prefers_worst() {
        let v = Verification::Verified("a".into());
        let i = Verification::Inconclusive("b".into());
        let x = Verification::Violated("c".into());
        assert!(Verification::combine([v.clone(), i.clone()], "").status() == "inconclusive");
        assert!(Verification::combine([v.clone(), i, x], "").is_violated());
        assert!(Verification::combine([v], "").is_verified());
        assert_eq!(Verification::combine([], "none").status(), "inconclusive");
    }
}
