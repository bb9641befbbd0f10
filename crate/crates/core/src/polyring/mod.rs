//! Exact arithmetic in `F_q[T]` and `F_q(T)`.
//!
//! [`Polynomial`] stores packed field elements in ascending powers of `T`.
//! The representation is canonical: the coefficient vector is empty for the
//! zero polynomial and otherwise ends in a nonzero coefficient.

mod factor;
mod mul;
mod ratfunc;
mod text;

pub use factor::Factorization;
pub use mul::{karatsuba_threshold, set_karatsuba_threshold, DEFAULT_KARATSUBA_THRESHOLD};
pub use ratfunc::RationalFunction;

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::gf::{Embedding, Field, FieldElement, GfError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("gcd of two zero polynomials")]
    BothZero,
    #[error("operation undefined for the zero polynomial")]
    Zero,
    #[error("operation undefined for a constant polynomial")]
    Constant,
    #[error("polynomials live over different fields (F_{0} vs F_{1})")]
    FieldMismatch(u64, u64),
    #[error("{0} does not divide exactly")]
    NotDivisible(String),
    #[error("cannot parse polynomial {input:?}: {reason}")]
    Parse { input: String, reason: String },
    #[error(transparent)]
    Gf(#[from] GfError),
}

/// Degree of a polynomial; the zero polynomial has degree `NegInfinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => f.write_str("-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

#[derive(Clone)]
pub struct Polynomial {
    field: Field,
    coeffs: Vec<u32>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.coeffs == other.coeffs
    }
}

impl Eq for Polynomial {}

impl std::hash::Hash for Polynomial {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.field.cardinality().hash(state);
        self.coeffs.hash(state);
    }
}

impl PartialOrd for Polynomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// By field, then degree, then coefficients from the constant term upward
/// (each compared in the field's lexicographic order).
impl Ord for Polynomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let fa = (self.field.characteristic(), self.field.degree());
        let fb = (other.field.characteristic(), other.field.degree());
        fa.cmp(&fb)
            .then_with(|| self.degree().cmp(&other.degree()))
            .then_with(|| {
                for (&a, &b) in self.coeffs.iter().zip(&other.coeffs) {
                    let c = self.field.lex_cmp(a, b);
                    if c != Ordering::Equal {
                        return c;
                    }
                }
                Ordering::Equal
            })
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

impl Polynomial {
    fn normalize(mut self) -> Self {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
        self
    }

    /// Builds from packed coefficients (ascending powers), trimming trailing zeros.
    pub fn from_raw(field: Field, coeffs: Vec<u32>) -> Self {
        debug_assert!(coeffs.iter().all(|&c| (c as u64) < field.cardinality()));
        Polynomial { field, coeffs }.normalize()
    }

    /// Coefficients taken as integers mod `p` (prime-subfield elements).
    pub fn from_ints(field: &Field, coeffs: &[u64]) -> Self {
        Self::from_raw(field.clone(), coeffs.iter().map(|&c| field.from_int(c)).collect())
    }

    pub fn from_elements(field: &Field, coeffs: &[FieldElement]) -> Result<Self, PolyError> {
        for c in coeffs {
            if **c.field() != **field {
                return Err(PolyError::FieldMismatch(c.field().cardinality(), field.cardinality()));
            }
        }
        Ok(Self::from_raw(field.clone(), coeffs.iter().map(|c| c.raw()).collect()))
    }

    pub fn zero(field: &Field) -> Self {
        Polynomial { field: field.clone(), coeffs: Vec::new() }
    }

    pub fn one(field: &Field) -> Self {
        Self::constant(field, 1)
    }

    pub fn constant(field: &Field, c: u32) -> Self {
        Self::from_raw(field.clone(), vec![c])
    }

    /// The indeterminate `T`.
    pub fn t(field: &Field) -> Self {
        Self::monomial(field, 1, 1)
    }

    pub fn monomial(field: &Field, c: u32, e: usize) -> Self {
        let mut coeffs = vec![0u32; e + 1];
        coeffs[e] = c;
        Self::from_raw(field.clone(), coeffs)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn coefficient(&self, i: usize) -> FieldElement {
        FieldElement::from_raw(&self.field, self.coeff(i))
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInfinity,
            n => Degree::Finite(n - 1),
        }
    }

    /// Degree with zero mapped to `None`.
    pub fn deg(&self) -> Option<usize> {
        self.degree().finite()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs == [1]
    }

    /// True for the zero polynomial and nonzero constants.
    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last() == Some(&1)
    }

    /// Leading coefficient; zero for the zero polynomial.
    pub fn leading(&self) -> u32 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub(crate) fn same_field(&self, other: &Self) -> Result<(), PolyError> {
        if *self.field == *other.field {
            Ok(())
        } else {
            Err(PolyError::FieldMismatch(self.field.cardinality(), other.field.cardinality()))
        }
    }

    fn assert_same_field(&self, other: &Self) {
        if let Err(e) = self.same_field(other) {
            panic!("{e}");
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_field(other);
        let f = &self.field;
        let (long, short) = if self.coeffs.len() >= other.coeffs.len() {
            (&self.coeffs, &other.coeffs)
        } else {
            (&other.coeffs, &self.coeffs)
        };
        let mut out = long.clone();
        for (d, &s) in out.iter_mut().zip(short) {
            *d = f.add(*d, s);
        }
        Self::from_raw(f.clone(), out)
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        Polynomial { field: f.clone(), coeffs: self.coeffs.iter().map(|&c| f.neg(c)).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Product; Karatsuba above the configured threshold.
    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_field(other);
        Self::from_raw(self.field.clone(), mul::mul_slices(&self.field, &self.coeffs, &other.coeffs))
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.field);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Multiplies every coefficient by the packed scalar `c`.
    pub fn scale(&self, c: u32) -> Self {
        let f = &self.field;
        Self::from_raw(f.clone(), self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    /// Multiplies by `T^e`.
    pub fn shift(&self, e: usize) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = vec![0u32; e];
        coeffs.extend_from_slice(&self.coeffs);
        Polynomial { field: self.field.clone(), coeffs }
    }

    /// Divides by the leading coefficient; zero stays zero.
    pub fn monic(&self) -> Self {
        match self.coeffs.last() {
            None | Some(&1) => self.clone(),
            Some(&lc) => self.scale(self.field.inv(lc).expect("leading coefficient is nonzero")),
        }
    }

    /// Quotient and remainder with `deg r < deg b`.
    pub fn divrem(&self, b: &Self) -> Result<(Self, Self), PolyError> {
        self.same_field(b)?;
        let f = &self.field;
        let db = match b.deg() {
            None => return Err(PolyError::DivisionByZero),
            Some(d) => d,
        };
        if self.coeffs.len() <= db {
            return Ok((Self::zero(f), self.clone()));
        }
        let inv_lc = f.inv(b.leading())?;
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u32; rem.len() - db];
        let bb = &b.coeffs[..db];
        for top in (db..rem.len()).rev() {
            let c = rem[top];
            if c == 0 {
                continue;
            }
            let qc = f.mul(c, inv_lc);
            quot[top - db] = qc;
            let nq = f.neg(qc);
            let base = top - db;
            for (i, &bc) in bb.iter().enumerate() {
                if bc != 0 {
                    rem[base + i] = f.add(rem[base + i], f.mul(nq, bc));
                }
            }
            rem[top] = 0;
        }
        rem.truncate(db);
        Ok((Self::from_raw(f.clone(), quot), Self::from_raw(f.clone(), rem)))
    }

    pub fn rem(&self, b: &Self) -> Result<Self, PolyError> {
        Ok(self.divrem(b)?.1)
    }

    /// Quotient of an exact division; errors if a remainder is left.
    pub fn exact_div(&self, b: &Self) -> Result<Self, PolyError> {
        let (q, r) = self.divrem(b)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(PolyError::NotDivisible(format!("{b}")))
        }
    }

    pub fn divides(&self, other: &Self) -> Result<bool, PolyError> {
        Ok(other.rem(self)?.is_zero())
    }

    /// Formal derivative in `T`.
    pub fn derivative(&self) -> Self {
        let f = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| f.mul(c, f.from_int(i as u64)))
            .collect();
        Self::from_raw(f.clone(), coeffs)
    }

    pub fn eval_raw(&self, x: u32) -> u32 {
        let f = &self.field;
        self.coeffs.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn eval(&self, x: &FieldElement) -> Result<FieldElement, PolyError> {
        if **x.field() != *self.field {
            return Err(PolyError::FieldMismatch(x.field().cardinality(), self.field.cardinality()));
        }
        Ok(FieldElement::from_raw(&self.field, self.eval_raw(x.raw())))
    }

    /// Monic greatest common divisor; `gcd(a, 0) = monic(a)`.
    pub fn gcd(&self, other: &Self) -> Result<Self, PolyError> {
        self.same_field(other)?;
        if self.is_zero() && other.is_zero() {
            return Err(PolyError::BothZero);
        }
        let (mut a, mut b) = if self.coeffs.len() >= other.coeffs.len() {
            (self.clone(), other.clone())
        } else {
            (other.clone(), self.clone())
        };
        while !b.is_zero() {
            let r = a.rem(&b)?;
            a = b;
            b = r;
        }
        Ok(a.monic())
    }

    pub fn is_coprime(&self, other: &Self) -> Result<bool, PolyError> {
        Ok(self.gcd(other)?.is_one())
    }

    /// Largest monic divisor of `self` sharing no irreducible factor with `b`.
    pub fn coprime_part(&self, b: &Self) -> Result<Self, PolyError> {
        self.same_field(b)?;
        if self.is_zero() {
            return Err(PolyError::Zero);
        }
        let mut c = self.monic();
        if b.is_zero() {
            // Every irreducible divides 0.
            return Ok(Self::one(&self.field));
        }
        loop {
            let g = c.gcd(b)?;
            if g.is_one() {
                return Ok(c);
            }
            c = c.exact_div(&g)?;
        }
    }

    /// `self(T)^q` for `q` a power of the characteristic:
    /// coefficients raised to `q`, exponents multiplied by `q`.
    pub fn frobenius(&self, q: u64) -> Self {
        let f = &self.field;
        if self.coeffs.len() <= 1 {
            return Self::from_raw(f.clone(), self.coeffs.iter().map(|&c| f.frobenius(c, q)).collect());
        }
        let q = q as usize;
        let mut coeffs = vec![0u32; (self.coeffs.len() - 1) * q + 1];
        for (i, &c) in self.coeffs.iter().enumerate() {
            coeffs[i * q] = f.frobenius(c, q as u64);
        }
        Polynomial { field: f.clone(), coeffs }
    }

    /// Inverse of `frobenius(p)`; requires every exponent to be a multiple of `p`.
    pub(crate) fn pth_root(&self) -> Self {
        let f = &self.field;
        let p = f.characteristic() as usize;
        let coeffs = self.coeffs.iter().step_by(p).map(|&c| f.pth_root(c)).collect();
        Self::from_raw(f.clone(), coeffs)
    }

    /// Coefficient-wise image under a field embedding.
    pub fn lift(&self, e: &Embedding) -> Result<Self, PolyError> {
        if **e.source() != *self.field {
            return Err(PolyError::FieldMismatch(self.field.cardinality(), e.source().cardinality()));
        }
        Ok(Self::from_raw(e.target().clone(), self.coeffs.iter().map(|&c| e.apply_raw(c)).collect()))
    }

    /// Whether every coefficient lies in the subfield of cardinality `q`.
    pub fn in_subfield(&self, q: u64) -> bool {
        self.coeffs.iter().all(|&c| self.field.in_subfield(c, q))
    }

    /// Multiplicity of `prime` in `self` by repeated exact division.
    /// Returns `None` for the zero polynomial.
    pub fn multiplicity(&self, prime: &Self) -> Result<Option<u64>, PolyError> {
        if prime.is_constant() {
            return Err(PolyError::Constant);
        }
        if self.is_zero() {
            return Ok(None);
        }
        let mut cur = self.clone();
        let mut n = 0u64;
        loop {
            let (q, r) = cur.divrem(prime)?;
            if !r.is_zero() {
                return Ok(Some(n));
            }
            cur = q;
            n += 1;
        }
    }

    pub(crate) fn mulmod(&self, other: &Self, m: &Self) -> Result<Self, PolyError> {
        self.mul(other).rem(m)
    }
}
