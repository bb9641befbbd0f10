//! Drinfeld modules `φ: F_q[T] → End(G_a)` over `F_q(T)`, their orbits and
//! canonical-height bounds.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::gf::{Embedding, Field};
use crate::heights::{self, HeightError, PlaceSet};
use crate::polyring::{PolyError, Polynomial, RationalFunction};

/// Default cap on the degree of any orbit term.
pub const DEFAULT_DEGREE_BUDGET: usize = 200_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DrinfeldError {
    #[error("a Drinfeld module needs at least one τ-coefficient")]
    ZeroRank,
    #[error("the top coefficient c_r must be nonzero")]
    ZeroTopCoefficient,
    #[error("{q} is not a subfield cardinality of F_{card}")]
    BadFrobenius { q: u64, card: u64 },
    #[error("Θ = q^r does not fit in 64 bits")]
    ThetaOverflow,
    #[error("operation requires rank 2, module has rank {0}")]
    RankNotTwo(usize),
    #[error("{0} has coefficients outside F_q")]
    NotOverFq(String),
    #[error("the point must lie in F_q[T]")]
    NotPolynomial,
    #[error("degree budget {budget} exceeded computing term n = {n}")]
    BudgetExceeded { n: usize, budget: usize },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Height(#[from] HeightError),
}

/// A twisted polynomial `Σ a_i τ^i` with `τ c = c^q τ`.
#[derive(Clone, PartialEq, Eq)]
pub struct SkewPolynomial {
    field: Field,
    q: u64,
    coeffs: Vec<Polynomial>,
}

impl fmt::Debug for SkewPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter().map(|c| c.to_string())).finish()
    }
}

impl SkewPolynomial {
    pub fn new(field: &Field, q: u64, mut coeffs: Vec<Polynomial>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        SkewPolynomial { field: field.clone(), q, coeffs }
    }

    /// `c τ^0`.
    pub fn scalar(field: &Field, q: u64, c: Polynomial) -> Self {
        Self::new(field, q, vec![c])
    }

    pub fn coeffs(&self) -> &[Polynomial] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Polynomial {
        self.coeffs.get(i).cloned().unwrap_or_else(|| Polynomial::zero(&self.field))
    }

    /// Degree in `τ`; `None` for zero.
    pub fn tau_degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n).map(|i| self.coeff(i).add(&other.coeff(i))).collect();
        Self::new(&self.field, self.q, coeffs)
    }

    /// `(Σ a_i τ^i)(Σ b_j τ^j) = Σ a_i b_j^{q^i} τ^{i+j}`.
    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::new(&self.field, self.q, Vec::new());
        }
        let mut out = vec![Polynomial::zero(&self.field); self.coeffs.len() + other.coeffs.len() - 1];
        // twisted[j] holds b_j^{q^i} for the current i.
        let mut twisted: Vec<Polynomial> = other.coeffs.clone();
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                twisted = twisted.iter().map(|b| b.frobenius(self.q)).collect();
            }
            if a.is_zero() {
                continue;
            }
            for (j, b) in twisted.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(&self.field, self.q, out)
    }

    /// `Σ a_i x^{q^i}`.
    pub fn eval(&self, x: &RationalFunction) -> Result<RationalFunction, PolyError> {
        let mut acc = RationalFunction::zero(&self.field);
        let mut power = x.clone();
        for (i, a) in self.coeffs.iter().enumerate() {
            if i > 0 {
                power = power.frobenius(self.q);
            }
            if !a.is_zero() {
                acc = acc.add(&RationalFunction::from(a.clone()).mul(&power)?)?;
            }
        }
        Ok(acc)
    }
}

/// `φ_T = T + c_1 τ + ... + c_r τ^r` with coefficients in `F_q[T]`.
///
/// The coefficient field may be an extension of `F_q` (after base change);
/// `q` is always the Frobenius twist of the module.
#[derive(Clone, PartialEq, Eq)]
pub struct DrinfeldModule {
    field: Field,
    q: u64,
    coeffs: Vec<Polynomial>,
    theta: u64,
}

impl fmt::Debug for DrinfeldModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "DrinfeldModule(q={}, F_{}, c={:?})", self.q, self.field.cardinality(), cs)
    }
}

/// The pair of constants bounding `h - ĥ` and `ĥ - h` on `F_q[T]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightConstants {
    /// Upper bound for `h(x) - ĥ(x)`.
    pub m_phi: BigRational,
    /// Upper bound for `ĥ(x) - h(x)`.
    pub m_phi_prime: BigRational,
    /// Set when some `c_i = 0` (`i < r`) was left out of the maxima.
    pub zero_coefficients_excluded: bool,
}

/// Two-sided bound on `ĥ(x)` obtained from `h(A_n)` at `level = n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeightEnclosure {
    pub lower: BigRational,
    pub upper: BigRational,
    pub level: usize,
}

impl HeightEnclosure {
    pub fn width(&self) -> BigRational {
        &self.upper - &self.lower
    }

    pub fn contains(&self, v: &BigRational) -> bool {
        &self.lower <= v && v <= &self.upper
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.lower <= other.upper && other.lower <= self.upper
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TorsionVerdict {
    Torsion { level: usize },
    NonTorsion { level: usize },
    /// The degree budget ran out at `level` before either bound fired.
    Undecided { level: usize },
}

/// `φ_{T^n}(x) = A_n / B_n` in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitTerm {
    pub n: usize,
    pub value: RationalFunction,
}

impl OrbitTerm {
    pub fn numerator(&self) -> &Polynomial {
        self.value.numerator()
    }

    pub fn denominator(&self) -> &Polynomial {
        self.value.denominator()
    }

    pub fn monic_numerator(&self) -> Polynomial {
        self.numerator().monic()
    }

    /// Leading coefficient of `A_n` (zero when `A_n = 0`).
    pub fn leading_unit(&self) -> u32 {
        self.numerator().leading()
    }
}

/// Orbit prefix; `stopped_at` names the first index the budget refused.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub terms: Vec<OrbitTerm>,
    pub stopped_at: Option<usize>,
}

impl Orbit {
    pub fn numerators(&self) -> Vec<Polynomial> {
        self.terms.iter().map(|t| t.numerator().clone()).collect()
    }
}

fn pow_big(base: u64, e: usize) -> BigInt {
    num_traits::pow(BigInt::from(base), e)
}

impl DrinfeldModule {
    /// `coeffs = [c_1, ..., c_r]`; `q` must be a subfield cardinality of `field`.
    pub fn new(field: &Field, q: u64, coeffs: Vec<Polynomial>) -> Result<Self, DrinfeldError> {
        if coeffs.is_empty() {
            return Err(DrinfeldError::ZeroRank);
        }
        if coeffs.last().is_some_and(|c| c.is_zero()) {
            return Err(DrinfeldError::ZeroTopCoefficient);
        }
        if !field.has_subfield(q) {
            return Err(DrinfeldError::BadFrobenius { q, card: field.cardinality() });
        }
        for c in &coeffs {
            if **c.field() != **field {
                return Err(PolyError::FieldMismatch(c.field().cardinality(), field.cardinality()).into());
            }
        }
        let theta = q.checked_pow(coeffs.len() as u32).ok_or(DrinfeldError::ThetaOverflow)?;
        Ok(DrinfeldModule { field: field.clone(), q, coeffs, theta })
    }

    /// `φ_T(x) = Tx + g x^q + Δ x^{q^2}` with `q` the size of the coefficient field.
    pub fn rank2(g: Polynomial, delta: Polynomial) -> Result<Self, DrinfeldError> {
        let field = g.field().clone();
        let q = field.cardinality();
        Self::new(&field, q, vec![g, delta])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn rank(&self) -> usize {
        self.coeffs.len()
    }

    /// `Θ = q^r`.
    pub fn theta(&self) -> u64 {
        self.theta
    }

    /// `[c_1, ..., c_r]`.
    pub fn coeffs(&self) -> &[Polynomial] {
        &self.coeffs
    }

    pub fn g(&self) -> &Polynomial {
        &self.coeffs[0]
    }

    pub fn delta(&self) -> &Polynomial {
        self.coeffs.last().expect("rank >= 1")
    }

    pub fn require_rank2(&self) -> Result<(), DrinfeldError> {
        match self.rank() {
            2 => Ok(()),
            r => Err(DrinfeldError::RankNotTwo(r)),
        }
    }

    /// Same `φ_T`, coefficients read in a larger field.
    pub fn base_change(&self, e: &Embedding) -> Result<Self, DrinfeldError> {
        let coeffs = self.coeffs.iter().map(|c| c.lift(e)).collect::<Result<Vec<_>, _>>()?;
        Self::new(e.target(), self.q, coeffs)
    }

    pub fn phi_t(&self) -> SkewPolynomial {
        let mut cs = vec![Polynomial::t(&self.field)];
        cs.extend(self.coeffs.iter().cloned());
        SkewPolynomial::new(&self.field, self.q, cs)
    }

    /// `φ_a` by Horner's rule in `φ_T`.
    pub fn phi_of(&self, a: &Polynomial) -> Result<SkewPolynomial, DrinfeldError> {
        a.same_field(&Polynomial::zero(&self.field))?;
        if !a.in_subfield(self.q) {
            return Err(DrinfeldError::NotOverFq(a.to_string()));
        }
        let phi_t = self.phi_t();
        let mut acc = SkewPolynomial::new(&self.field, self.q, Vec::new());
        for (i, &c) in a.coeffs().iter().enumerate().rev() {
            if i + 1 < a.coeffs().len() {
                acc = acc.mul(&phi_t);
            }
            let cst = SkewPolynomial::scalar(&self.field, self.q, Polynomial::constant(&self.field, c));
            acc = acc.add(&cst);
        }
        Ok(acc)
    }

    pub fn phi_eval(&self, a: &Polynomial, x: &RationalFunction) -> Result<RationalFunction, DrinfeldError> {
        Ok(self.phi_of(a)?.eval(x)?)
    }

    /// `φ_T(a) = T a + Σ c_i a^{q^i}` for a polynomial `a`.
    pub fn apply_t_poly(&self, a: &Polynomial) -> Polynomial {
        let mut acc = a.shift(1);
        let mut power = a.clone();
        for c in &self.coeffs {
            power = power.frobenius(self.q);
            if !c.is_zero() {
                acc = acc.add(&c.mul(&power));
            }
        }
        acc
    }

    pub fn apply_t(&self, x: &RationalFunction) -> Result<RationalFunction, DrinfeldError> {
        if x.is_polynomial() {
            return Ok(self.apply_t_poly(x.numerator()).into());
        }
        Ok(self.phi_t().eval(x)?)
    }

    /// Upper bound on `deg A_{n+1}` given `h(φ_{T^n}(x)) = h`.
    fn next_degree_bound(&self, h: usize) -> u128 {
        let mut bound = 1 + h as u128;
        let mut qi = 1u128;
        for c in &self.coeffs {
            qi = qi.saturating_mul(self.q as u128);
            let dc = c.deg().unwrap_or(0) as u128;
            bound = bound.max(dc + qi.saturating_mul(h as u128));
        }
        bound
    }

    /// Terms `n = 0..=n_max`, stopping early (without error) if the budget is hit.
    pub fn orbit_within_budget(
        &self,
        x: &RationalFunction,
        n_max: usize,
        budget: usize,
    ) -> Result<Orbit, DrinfeldError> {
        if **x.field() != *self.field {
            return Err(PolyError::FieldMismatch(x.field().cardinality(), self.field.cardinality()).into());
        }
        let mut terms = vec![OrbitTerm { n: 0, value: x.clone() }];
        for n in 1..=n_max {
            let prev = &terms[n - 1].value;
            if self.next_degree_bound(heights::height(prev) as usize) > budget as u128 {
                return Ok(Orbit { terms, stopped_at: Some(n) });
            }
            let value = self.apply_t(prev)?;
            terms.push(OrbitTerm { n, value });
        }
        Ok(Orbit { terms, stopped_at: None })
    }

    pub fn orbit(&self, x: &RationalFunction, n_max: usize, budget: usize) -> Result<Vec<OrbitTerm>, DrinfeldError> {
        let orbit = self.orbit_within_budget(x, n_max, budget)?;
        match orbit.stopped_at {
            Some(n) => Err(DrinfeldError::BudgetExceeded { n, budget }),
            None => Ok(orbit.terms),
        }
    }

    /// `M_φ = q/((Θ-1)(q-1)) · max{1 - deg c_r, deg c_i - deg c_r, 0}` and
    /// `M'_φ = max{1, deg c_1, ..., deg c_r}/(Θ-1)`; zero `c_i` are skipped.
    pub fn height_constants(&self) -> HeightConstants {
        let r = self.rank();
        let deg_top = self.delta().deg().expect("c_r != 0") as i64;
        let mut excluded = false;
        let mut inner = (1 - deg_top).max(0);
        let mut outer = 1i64.max(deg_top);
        for c in &self.coeffs[..r - 1] {
            match c.deg() {
                Some(d) => {
                    inner = inner.max(d as i64 - deg_top);
                    outer = outer.max(d as i64);
                }
                None => excluded = true,
            }
        }
        let theta_m1 = BigInt::from(self.theta - 1);
        let q = BigInt::from(self.q);
        let q_m1 = BigInt::from(self.q - 1);
        HeightConstants {
            m_phi: BigRational::new(q * BigInt::from(inner), &theta_m1 * q_m1),
            m_phi_prime: BigRational::new(BigInt::from(outer), theta_m1),
            zero_coefficients_excluded: excluded,
        }
    }

    /// `[(h - M_φ)/Θ^n, (h + M'_φ)/Θ^n]` for `h = h(A_n)`.
    pub fn enclosure_from_height(&self, h: u64, level: usize) -> HeightEnclosure {
        let k = self.height_constants();
        let scale = BigRational::from_integer(pow_big(self.theta, level));
        let h = BigRational::from_integer(BigInt::from(h));
        HeightEnclosure {
            lower: (&h - &k.m_phi) / &scale,
            upper: (&h + &k.m_phi_prime) / &scale,
            level,
        }
    }

    pub fn canonical_height_enclosure(
        &self,
        x: &Polynomial,
        n: usize,
        budget: usize,
    ) -> Result<HeightEnclosure, DrinfeldError> {
        let terms = self.orbit(&x.clone().into(), n, budget)?;
        let h = heights::height(&terms[n].value);
        Ok(self.enclosure_from_height(h, n))
    }

    /// `L` with `ĥ(x) > q^L` for every non-torsion `x`: `L = -(6 + 12(q^2 - 1)|S|)`.
    pub fn ghioca_log_lower_bound(&self, s: &PlaceSet) -> Result<i64, DrinfeldError> {
        self.require_rank2()?;
        let q = self.q as i64;
        Ok(-(6 + 12 * (q * q - 1) * s.len() as i64))
    }

    /// Decides torsion by iterating until the enclosure either leaves 0
    /// behind or drops below the floor `q^L`.
    pub fn is_torsion(&self, x: &Polynomial, s: &PlaceSet, budget: usize) -> Result<TorsionVerdict, DrinfeldError> {
        let floor_exp = self.ghioca_log_lower_bound(s)?;
        if x.is_zero() {
            return Ok(TorsionVerdict::Torsion { level: 0 });
        }
        let consts = self.height_constants();
        // h + M' < Θ^n q^L  ⟺  (h + M') q^{-L} < Θ^n
        let inv_floor = BigRational::from_integer(pow_big(self.q, (-floor_exp) as usize));
        let mut cur = x.clone();
        let mut level = 0usize;
        loop {
            if self.next_degree_bound(cur.deg().unwrap_or(0)) > budget as u128 {
                return Ok(TorsionVerdict::Undecided { level });
            }
            cur = self.apply_t_poly(&cur);
            level += 1;
            if cur.is_zero() {
                return Ok(TorsionVerdict::Torsion { level });
            }
            let h = BigRational::from_integer(BigInt::from(cur.deg().expect("nonzero")));
            if (&h - &consts.m_phi).is_positive() {
                return Ok(TorsionVerdict::NonTorsion { level });
            }
            let theta_n = BigRational::from_integer(pow_big(self.theta, level));
            if (&h + &consts.m_phi_prime) * &inv_floor < theta_n {
                return Ok(TorsionVerdict::Torsion { level });
            }
        }
    }
}

/// `q^e` as an exact rational, `e` possibly negative.
pub fn rational_power(q: u64, e: i64) -> BigRational {
    let p = pow_big(q, e.unsigned_abs() as usize);
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Nonnegative rational from `num/den`.
pub fn ratio(num: i64, den: i64) -> BigRational {
    if den.is_zero() {
        panic!("zero denominator");
    }
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
