//! Places of `F_q(T)`, valuations and heights.
//!
//! Every quantity here is a base-`q` logarithm of an absolute value or norm,
//! which for the rational function field is always an integer.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::polyring::{PolyError, Polynomial, RationalFunction};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeightError {
    #[error("{0} is not irreducible")]
    NotIrreducible(String),
    #[error("the zero polynomial has no norm")]
    ZeroArgument,
    #[error("place set must contain the infinite place")]
    MissingInfinitePlace,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// A place of `F_q(T)`: a monic irreducible of `F_q[T]`, or the infinite place.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Finite(Polynomial),
    Infinite,
}

impl fmt::Debug for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Finite(p) => write!(f, "({p})"),
            Place::Infinite => f.write_str("inf"),
        }
    }
}

impl Place {
    /// Finite place of an irreducible; a non-monic input is normalized.
    pub fn finite(prime: &Polynomial) -> Result<Self, HeightError> {
        if !prime.is_irreducible()? {
            return Err(HeightError::NotIrreducible(prime.to_string()));
        }
        Ok(Place::Finite(prime.monic()))
    }

    /// Caller guarantees `prime` is monic irreducible (e.g. it came out of `factor`).
    pub(crate) fn finite_unchecked(prime: Polynomial) -> Self {
        debug_assert!(prime.is_monic());
        Place::Finite(prime)
    }

    pub fn degree(&self) -> u64 {
        match self {
            Place::Infinite => 1,
            Place::Finite(p) => p.deg().expect("prime is nonconstant") as u64,
        }
    }

    pub fn prime(&self) -> Option<&Polynomial> {
        match self {
            Place::Finite(p) => Some(p),
            Place::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Place::Infinite)
    }
}

/// Order of vanishing; `Infinity` only for zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Valuation {
    Finite(i64),
    Infinity,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinity => None,
        }
    }
}

/// A finite set of places, deduplicated and ordered (finite places first).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PlaceSet {
    places: BTreeSet<Place>,
}

impl PlaceSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_infinite() -> Self {
        let mut s = Self::new();
        s.insert(Place::Infinite);
        s
    }

    pub fn insert(&mut self, v: Place) -> bool {
        self.places.insert(v)
    }

    pub fn contains(&self, v: &Place) -> bool {
        self.places.contains(v)
    }

    pub fn contains_infinite(&self) -> bool {
        self.places.contains(&Place::Infinite)
    }

    pub fn len(&self) -> usize {
        self.places.len()
    }

    pub fn is_empty(&self) -> bool {
        self.places.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Place> {
        self.places.iter()
    }

    pub fn finite_places(&self) -> impl Iterator<Item = &Place> {
        self.places.iter().filter(|v| !v.is_infinite())
    }
}

impl FromIterator<Place> for PlaceSet {
    fn from_iter<I: IntoIterator<Item = Place>>(iter: I) -> Self {
        PlaceSet { places: iter.into_iter().collect() }
    }
}

/// Valuation of a polynomial at `v`.
pub fn valuation_poly(v: &Place, a: &Polynomial) -> Result<Valuation, HeightError> {
    if a.is_zero() {
        return Ok(Valuation::Infinity);
    }
    Ok(match v {
        Place::Infinite => Valuation::Finite(-(a.deg().expect("nonzero") as i64)),
        Place::Finite(p) => Valuation::Finite(a.multiplicity(p)?.expect("nonzero") as i64),
    })
}

/// `ord_v(num) - ord_v(den)`; at infinity `deg den - deg num`.
pub fn valuation(v: &Place, x: &RationalFunction) -> Result<Valuation, HeightError> {
    match (valuation_poly(v, x.numerator())?, valuation_poly(v, x.denominator())?) {
        (Valuation::Finite(a), Valuation::Finite(b)) => Ok(Valuation::Finite(a - b)),
        _ => Ok(Valuation::Infinity),
    }
}

/// `h(a/b) = max(deg a, deg b)`, with `h(0) = 0`.
pub fn height(x: &RationalFunction) -> u64 {
    if x.is_zero() {
        return 0;
    }
    let dn = x.numerator().deg().unwrap_or(0);
    let dd = x.denominator().deg().unwrap_or(0);
    dn.max(dd) as u64
}

/// `log_q max(1, |x|_v) = deg(v) · max(-v(x), 0)`.
pub fn local_height(v: &Place, x: &RationalFunction) -> Result<u64, HeightError> {
    Ok(match valuation(v, x)? {
        Valuation::Infinity => 0,
        Valuation::Finite(e) => v.degree() * (-e).max(0) as u64,
    })
}

/// `log_q Nr^S(a)`: the degree of `a` after removing every prime in `S`.
pub fn norm_s_log(a: &Polynomial, s: &PlaceSet) -> Result<u64, HeightError> {
    if a.is_zero() {
        return Err(HeightError::ZeroArgument);
    }
    if !s.contains_infinite() {
        return Err(HeightError::MissingInfinitePlace);
    }
    let mut total = a.deg().expect("nonzero") as u64;
    for v in s.finite_places() {
        if let Valuation::Finite(e) = valuation_poly(v, a)? {
            total -= v.degree() * e.max(0) as u64;
        }
    }
    Ok(total)
}

/// Both sides of `h(x) = log_q Nr^S(a) + Σ_{v∈S} log_q max(1, |x|_v^{-1})`
/// for `x = a/b` in lowest terms.
pub fn height_decomposition_check(x: &RationalFunction, s: &PlaceSet) -> Result<(u64, u64), HeightError> {
    if !s.contains_infinite() {
        return Err(HeightError::MissingInfinitePlace);
    }
    if x.is_zero() {
        return Err(HeightError::ZeroArgument);
    }
    let lhs = height(x);
    let mut rhs = norm_s_log(x.numerator(), s)?;
    for v in s.iter() {
        if let Valuation::Finite(e) = valuation(v, x)? {
            rhs += v.degree() * e.max(0) as u64;
        }
    }
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{Field, FieldDescriptor};

    fn p(f: &Field, c: &[u64]) -> Polynomial {
        Polynomial::from_ints(f, c)
    }

    fn rf(f: &Field, n: &[u64], d: &[u64]) -> RationalFunction {
        RationalFunction::new(p(f, n), p(f, d)).unwrap()
    }

    #[test]
    fn valuation_examples() {
        let f2 = FieldDescriptor::new(2, 1).unwrap();
        let t_place = Place::finite(&Polynomial::t(&f2)).unwrap();
        assert_eq!(valuation(&Place::Infinite, &rf(&f2, &[1], &[0, 1])).unwrap(), Valuation::Finite(1));
        assert_eq!(valuation(&t_place, &rf(&f2, &[0, 1, 1], &[1])).unwrap(), Valuation::Finite(1));
        assert_eq!(valuation(&t_place, &RationalFunction::zero(&f2)).unwrap(), Valuation::Infinity);

        let f3 = FieldDescriptor::new(3, 1).unwrap();
        let v = Place::finite(&p(&f3, &[2, 1])).unwrap();
        let a2 = rf(&f3, &[1, 2, 1, 1, 0, 0, 0, 0, 0, 1], &[1]);
        assert_eq!(valuation(&v, &a2).unwrap(), Valuation::Finite(1));
    }

    #[test]
    fn place_construction_normalizes() {
        let f3 = FieldDescriptor::new(3, 1).unwrap();
        let v = Place::finite(&p(&f3, &[2, 0, 2])).unwrap();
        assert_eq!(v.prime().unwrap(), &p(&f3, &[1, 0, 1]));
        assert_eq!(v.degree(), 2);
        assert!(matches!(Place::finite(&p(&f3, &[1, 2, 1])), Err(HeightError::NotIrreducible(_))));
    }

    #[test]
    fn height_examples() {
        let f3 = FieldDescriptor::new(3, 1).unwrap();
        assert_eq!(height(&rf(&f3, &[1, 0, 1], &[0, 1])), 2);
        assert_eq!(height(&rf(&f3, &[2], &[1])), 0);
        assert_eq!(height(&RationalFunction::zero(&f3)), 0);
        assert_eq!(height(&rf(&f3, &[1, 2, 1, 1, 0, 0, 0, 0, 0, 1], &[1])), 9);
    }

    #[test]
    fn local_height_examples() {
        let f3 = FieldDescriptor::new(3, 1).unwrap();
        let t = Place::finite(&Polynomial::t(&f3)).unwrap();
        assert_eq!(local_height(&Place::Infinite, &rf(&f3, &[0, 0, 1], &[1])).unwrap(), 2);
        assert_eq!(local_height(&t, &rf(&f3, &[1], &[0, 1])).unwrap(), 1);

        // Product-formula cross-check: x = (T^2+1)/T has poles only at (T) and infinity.
        let x = rf(&f3, &[1, 0, 1], &[0, 1]);
        let poles = [t, Place::Infinite];
        let total: u64 = poles.iter().map(|v| local_height(v, &x).unwrap()).sum();
        assert_eq!(total, height(&x));
        let other = Place::finite(&p(&f3, &[1, 0, 1])).unwrap();
        assert_eq!(local_height(&other, &x).unwrap(), 0);
    }

    #[test]
    fn norm_examples() {
        let f2 = FieldDescriptor::new(2, 1).unwrap();
        let s: PlaceSet = [Place::finite(&Polynomial::t(&f2)).unwrap(), Place::Infinite].into_iter().collect();
        assert_eq!(norm_s_log(&p(&f2, &[0, 0, 1, 1]), &s).unwrap(), 1);
        assert_eq!(norm_s_log(&p(&f2, &[1]), &s).unwrap(), 0);
        assert_eq!(norm_s_log(&Polynomial::zero(&f2), &s).unwrap_err(), HeightError::ZeroArgument);
        let no_inf: PlaceSet = [Place::finite(&Polynomial::t(&f2)).unwrap()].into_iter().collect();
        assert_eq!(norm_s_log(&p(&f2, &[1, 1]), &no_inf).unwrap_err(), HeightError::MissingInfinitePlace);

        let f3 = FieldDescriptor::new(3, 1).unwrap();
        let s3: PlaceSet = [Place::finite(&Polynomial::t(&f3)).unwrap(), Place::Infinite].into_iter().collect();
        assert_eq!(norm_s_log(&p(&f3, &[1, 2, 1, 1, 0, 0, 0, 0, 0, 1]), &s3).unwrap(), 9);
    }

    #[test]
    fn decomposition_examples() {
        let f2 = FieldDescriptor::new(2, 1).unwrap();
        let s: PlaceSet = [Place::finite(&Polynomial::t(&f2)).unwrap(), Place::Infinite].into_iter().collect();
        assert_eq!(height_decomposition_check(&rf(&f2, &[1], &[0, 1]), &s).unwrap(), (1, 1));
        assert_eq!(height_decomposition_check(&rf(&f2, &[1, 1], &[0, 0, 1]), &s).unwrap(), (2, 2));
        let inf_only = PlaceSet::with_infinite();
        let x = rf(&f2, &[1, 1, 0, 1], &[1]);
        assert_eq!(height_decomposition_check(&x, &inf_only).unwrap(), (3, 3));
        let no_inf: PlaceSet = [Place::finite(&Polynomial::t(&f2)).unwrap()].into_iter().collect();
        assert!(height_decomposition_check(&x, &no_inf).is_err());
    }
}
