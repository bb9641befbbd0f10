use std::fmt;

use super::{PolyError, Polynomial};
use crate::gf::Field;

/// Element of `F_q(T)` in lowest terms with a monic denominator; zero is `0/1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalFunction({self})")
    }
}

impl From<Polynomial> for RationalFunction {
    fn from(num: Polynomial) -> Self {
        let den = Polynomial::one(num.field());
        RationalFunction { num, den }
    }
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self, PolyError> {
        num.same_field(&den)?;
        if den.is_zero() {
            return Err(PolyError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self::zero(num.field()));
        }
        let g = num.gcd(&den)?;
        let (num, den) = if g.is_one() { (num, den) } else { (num.exact_div(&g)?, den.exact_div(&g)?) };
        let lc = den.leading();
        if lc == 1 {
            return Ok(RationalFunction { num, den });
        }
        let inv = num.field().inv(lc)?;
        Ok(RationalFunction { num: num.scale(inv), den: den.scale(inv) })
    }

    pub fn zero(field: &Field) -> Self {
        Polynomial::zero(field).into()
    }

    pub fn one(field: &Field) -> Self {
        Polynomial::one(field).into()
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn field(&self) -> &Field {
        self.num.field()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_one()
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        if self.den == other.den {
            return Self::new(self.num.add(&other.num), self.den.clone());
        }
        let num = self.num.mul(&other.den).add(&other.num.mul(&self.den));
        Self::new(num, self.den.mul(&other.den))
    }

    pub fn neg(&self) -> Self {
        RationalFunction { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PolyError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PolyError> {
        Self::new(self.num.mul(&other.num), self.den.mul(&other.den))
    }

    pub fn inv(&self) -> Result<Self, PolyError> {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn scale(&self, c: u32) -> Self {
        if c == 0 {
            return Self::zero(self.field());
        }
        RationalFunction { num: self.num.scale(c), den: self.den.clone() }
    }

    /// `x^q` for `q` a power of the characteristic; stays in lowest terms.
    pub fn frobenius(&self, q: u64) -> Self {
        RationalFunction { num: self.num.frobenius(q), den: self.den.frobenius(q) }
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}
