//! Irreducibility testing and factorization over `F_Q`, where `Q` is the
//! cardinality of the coefficient field.
//!
//! Factorization runs squarefree decomposition (with `p`-th root extraction),
//! distinct-degree splitting and seeded Cantor–Zassenhaus equal-degree
//! splitting. Even `Q` uses the trace map in place of the `(Q^d-1)/2` power.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PolyError, Polynomial};
use crate::gf::prime_factors;

/// `unit · ∏ factor^multiplicity` with monic irreducible factors sorted by
/// degree, then coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub unit: u32,
    pub factors: Vec<(Polynomial, u32)>,
}

impl Factorization {
    pub fn expand(&self, field: &crate::gf::Field) -> Polynomial {
        self.factors
            .iter()
            .fold(Polynomial::constant(field, self.unit), |acc, (f, m)| acc.mul(&f.pow(*m as u64)))
    }

    pub fn primes(&self) -> impl Iterator<Item = &Polynomial> {
        self.factors.iter().map(|(f, _)| f)
    }
}

impl Polynomial {
    fn powmod(&self, mut e: u64, m: &Polynomial) -> Result<Polynomial, PolyError> {
        let mut base = self.rem(m)?;
        let mut acc = Polynomial::one(&self.field).rem(m)?;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mulmod(&base, m)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mulmod(&base, m)?;
            }
        }
        Ok(acc)
    }

    /// Deterministic Rabin test: `T^{Q^n} ≡ T (mod a)` and
    /// `gcd(T^{Q^{n/l}} - T, a) = 1` for every prime `l | n`.
    pub fn is_irreducible(&self) -> Result<bool, PolyError> {
        let n = match self.deg() {
            None => return Err(PolyError::Zero),
            Some(0) => return Err(PolyError::Constant),
            Some(n) => n,
        };
        if n == 1 {
            return Ok(true);
        }
        let f = self.monic();
        let big_q = self.field.cardinality();
        let t = Polynomial::t(&self.field);
        let mut frob = vec![t.clone()];
        for _ in 0..n {
            let next = frob.last().expect("nonempty").powmod(big_q, &f)?;
            frob.push(next);
        }
        if frob[n] != t.rem(&f)? {
            return Ok(false);
        }
        for l in prime_factors(n as u64) {
            let h = frob[n / l as usize].sub(&t);
            if !h.gcd(&f)?.is_one() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Squarefree decomposition of a monic polynomial: pairwise coprime
    /// squarefree parts with their multiplicities.
    pub fn squarefree_decomposition(&self) -> Result<Vec<(Polynomial, u32)>, PolyError> {
        if self.is_zero() {
            return Err(PolyError::Zero);
        }
        let f = self.monic();
        let mut out = Vec::new();
        squarefree_rec(&f, 1, &mut out)?;
        out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
        Ok(out)
    }

    /// Full factorization; `seed` drives the equal-degree splitting.
    pub fn factor(&self, seed: u64) -> Result<Factorization, PolyError> {
        match self.deg() {
            None => return Err(PolyError::Zero),
            Some(0) => return Err(PolyError::Constant),
            _ => {}
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut factors = Vec::new();
        for (part, mult) in self.squarefree_decomposition()? {
            for (block, d) in distinct_degree(&part)? {
                for irr in equal_degree(&block, d, &mut rng)? {
                    factors.push((irr, mult));
                }
            }
        }
        factors.sort();
        Ok(Factorization { unit: self.leading(), factors })
    }
}

fn squarefree_rec(f: &Polynomial, scale: u32, out: &mut Vec<(Polynomial, u32)>) -> Result<(), PolyError> {
    if f.is_constant() {
        return Ok(());
    }
    let mut c = f.gcd(&f.derivative())?;
    let mut w = f.exact_div(&c)?;
    let mut i = 1u32;
    while !w.is_one() {
        let y = w.gcd(&c)?;
        let fac = w.exact_div(&y)?;
        if !fac.is_constant() {
            out.push((fac, i * scale));
        }
        c = c.exact_div(&y)?;
        w = y;
        i += 1;
    }
    if !c.is_constant() {
        let p = f.field.characteristic() as u32;
        squarefree_rec(&c.pth_root(), scale * p, out)?;
    }
    Ok(())
}

/// Splits a squarefree monic polynomial into products of equal-degree irreducibles.
fn distinct_degree(f: &Polynomial) -> Result<Vec<(Polynomial, usize)>, PolyError> {
    let big_q = f.field.cardinality();
    let t = Polynomial::t(&f.field);
    let mut rest = f.clone();
    let mut h = t.rem(&rest)?;
    let mut out = Vec::new();
    let mut d = 0usize;
    while rest.deg().unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        h = h.powmod(big_q, &rest)?;
        let g = rest.gcd(&h.sub(&t))?;
        if !g.is_one() {
            rest = rest.exact_div(&g)?;
            h = h.rem(&rest)?;
            out.push((g, d));
        }
    }
    if let Some(n) = rest.deg() {
        if n > 0 {
            out.push((rest, n));
        }
    }
    Ok(out)
}

fn random_below(f: &Polynomial, n: usize, rng: &mut ChaCha8Rng) -> Polynomial {
    let q = f.field.cardinality() as u32;
    Polynomial::from_raw(f.field.clone(), (0..n).map(|_| rng.gen_range(0..q)).collect())
}

/// Cantor–Zassenhaus splitting of a product of distinct degree-`d` irreducibles.
fn equal_degree(f: &Polynomial, d: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Polynomial>, PolyError> {
    let n = f.deg().expect("nonzero");
    if n == d {
        return Ok(vec![f.clone()]);
    }
    let field = f.field.clone();
    let big_q = field.cardinality();
    let p = field.characteristic();
    loop {
        let a = random_below(f, n, rng);
        if a.is_constant() {
            continue;
        }
        let b = if p == 2 {
            // Absolute trace of F_{Q^d}: a + a^2 + ... + a^{2^{md-1}}.
            let m = field.degree() as usize * d;
            let mut t = a.clone();
            let mut s = a.clone();
            for _ in 1..m {
                t = t.mulmod(&t, f)?;
                s = s.add(&t);
            }
            s
        } else {
            // a^{(Q^d-1)/2} = (a^{1+Q+...+Q^{d-1}})^{(Q-1)/2}.
            let mut t = a.clone();
            let mut s = a.clone();
            for _ in 1..d {
                t = t.powmod(big_q, f)?;
                s = s.mulmod(&t, f)?;
            }
            s.powmod((big_q - 1) / 2, f)?.sub(&Polynomial::one(&field))
        };
        let g = f.gcd(&b)?;
        let dg = g.deg().unwrap_or(0);
        if dg > 0 && dg < n {
            let mut out = equal_degree(&g, d, rng)?;
            out.extend(equal_degree(&f.exact_div(&g)?, d, rng)?);
            return Ok(out);
        }
    }
}
