//! Finite fields `F_{p^k}`.
//!
//! Elements are packed into a `u32` as the base-`p` integer of their
//! coordinates: `c_0 + c_1 p + ... + c_{k-1} p^{k-1}` where `c_i` is the
//! coefficient of `x^i` in `F_p[x]/(modulus)`. Extension fields keep
//! exp/log tables for multiplication; prime fields reduce directly.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::polyring::Polynomial;

/// Default upper bound on `p^k`.
pub const DEFAULT_SIZE_CAP: u64 = 1 << 20;

/// Extension fields up to this size get a full addition table.
const ADD_TABLE_LIMIT: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field size {p}^{k} exceeds the cap {cap}")]
    TooLarge { p: u64, k: u32, cap: u64 },
    #[error("inversion of zero")]
    DivisionByZero,
    #[error("elements belong to different fields (F_{0} vs F_{1})")]
    Mismatch(u64, u64),
    #[error("no embedding of F_{src} into F_{dst}")]
    Incompatible { src: u64, dst: u64 },
    #[error("{q} is not a subfield cardinality of F_{card}")]
    NotSubfield { q: u64, card: u64 },
    #[error("coordinate tuple {0:?} does not describe an element")]
    BadCoordinates(Vec<u32>),
}

/// Shared handle to a field descriptor.
pub type Field = Arc<FieldDescriptor>;

/// Deterministic primality by trial division; inputs are bounded by the size cap.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A finite field `F_{p^k}` with its canonical modulus.
pub struct FieldDescriptor {
    p: u32,
    k: u32,
    q: u32,
    /// Ascending coefficients, monic, length `k + 1`. For `k = 1` this is `x`.
    modulus: Vec<u32>,
    /// `p^i` for `i < k`.
    digit_weights: Vec<u32>,
    /// `exp[i] = g^i` for `i < 2(q-1)`; empty for prime fields.
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    add_table: Vec<u32>,
}

impl fmt::Debug for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldDescriptor")
            .field("p", &self.p)
            .field("k", &self.k)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldDescriptor {
    fn eq(&self, other: &Self) -> bool {
        // The modulus is canonical, so (p, k) pins the field.
        self.p == other.p && self.k == other.k
    }
}

impl Eq for FieldDescriptor {}

impl FieldDescriptor {
    /// `F_{p^k}` with the default size cap.
    pub fn new(p: u64, k: u32) -> Result<Field, GfError> {
        Self::with_cap(p, k, DEFAULT_SIZE_CAP)
    }

    pub fn with_cap(p: u64, k: u32, cap: u64) -> Result<Field, GfError> {
        if k == 0 {
            return Err(GfError::ZeroDegree);
        }
        let size = (p as u128).checked_pow(k);
        match size {
            Some(s) if s <= cap as u128 && s <= u32::MAX as u128 => {}
            _ => return Err(GfError::TooLarge { p, k, cap }),
        }
        if !is_prime(p) {
            return Err(GfError::NotPrime(p));
        }
        let prime = Arc::new(Self::prime_field(p as u32));
        if k == 1 {
            return Ok(prime);
        }
        let modulus = canonical_modulus(&prime, k);
        Ok(Arc::new(Self::extension(p as u32, k, modulus)))
    }

    fn prime_field(p: u32) -> Self {
        FieldDescriptor {
            p,
            k: 1,
            q: p,
            modulus: vec![0, 1],
            digit_weights: vec![1],
            exp: Vec::new(),
            log: Vec::new(),
            neg: Vec::new(),
            add_table: Vec::new(),
        }
    }

    fn extension(p: u32, k: u32, modulus: Vec<u32>) -> Self {
        let q = p.pow(k);
        let digit_weights: Vec<u32> = (0..k).map(|i| p.pow(i)).collect();
        let mut f = FieldDescriptor {
            p,
            k,
            q,
            modulus,
            digit_weights,
            exp: Vec::new(),
            log: Vec::new(),
            neg: Vec::new(),
            add_table: Vec::new(),
        };
        f.neg = (0..q).map(|a| f.neg_digits(a)).collect();
        if q <= ADD_TABLE_LIMIT {
            let mut table = vec![0u32; (q * q) as usize];
            for a in 0..q {
                for b in 0..q {
                    table[(a * q + b) as usize] = f.add_digits(a, b);
                }
            }
            f.add_table = table;
        }
        let generator = f.find_primitive();
        let order = (q - 1) as usize;
        let mut exp = vec![0u32; 2 * order];
        let mut log = vec![0u32; q as usize];
        let mut cur = 1u32;
        for (i, e) in exp[..order].iter_mut().enumerate() {
            *e = cur;
            log[cur as usize] = i as u32;
            cur = f.slow_mul(cur, generator);
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        f.exp = exp;
        f.log = log;
        f
    }

    fn find_primitive(&self) -> u32 {
        let order = (self.q - 1) as u64;
        let factors = prime_factors(order);
        (1..self.q)
            .find(|&g| factors.iter().all(|&l| self.slow_pow(g, order / l) != 1))
            .expect("multiplicative group of a finite field is cyclic")
    }

    fn slow_pow(&self, mut base: u32, mut e: u64) -> u32 {
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.slow_mul(acc, base);
            }
            base = self.slow_mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplication by coordinate convolution and reduction by the modulus.
    fn slow_mul(&self, a: u32, b: u32) -> u32 {
        let p = self.p as u64;
        let k = self.k as usize;
        let da = self.digits(a);
        let db = self.digits(b);
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p;
            }
        }
        for top in (k..prod.len()).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            for (i, &m) in self.modulus[..k].iter().enumerate() {
                let idx = top - k + i;
                prod[idx] = (prod[idx] + (p - c) * m as u64) % p;
            }
            prod[top] = 0;
        }
        self.pack_digits(prod[..k].iter().map(|&c| c as u32))
    }

    fn add_digits(&self, a: u32, b: u32) -> u32 {
        let p = self.p;
        let (mut a, mut b) = (a, b);
        let mut out = 0u32;
        for &w in &self.digit_weights {
            let s = (a % p + b % p) % p;
            out += s * w;
            a /= p;
            b /= p;
        }
        out
    }

    fn neg_digits(&self, a: u32) -> u32 {
        let p = self.p;
        let mut a = a;
        let mut out = 0u32;
        for &w in &self.digit_weights {
            let d = a % p;
            out += ((p - d) % p) * w;
            a /= p;
        }
        out
    }

    fn pack_digits(&self, digits: impl Iterator<Item = u32>) -> u32 {
        digits.zip(&self.digit_weights).map(|(d, &w)| d * w).sum()
    }

    pub fn characteristic(&self) -> u64 {
        self.p as u64
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    /// Number of elements `q = p^k`.
    pub fn cardinality(&self) -> u64 {
        self.q as u64
    }

    pub fn is_prime_field(&self) -> bool {
        self.k == 1
    }

    /// Ascending coefficients of the defining polynomial over `F_p`.
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn modulus_polynomial(self: &Arc<Self>) -> Polynomial {
        let prime = Arc::new(Self::prime_field(self.p));
        Polynomial::from_raw(prime, self.modulus.clone())
    }

    /// Coordinates of a packed element, ascending powers of the generator.
    pub fn digits(&self, mut a: u32) -> Vec<u32> {
        let p = self.p;
        (0..self.k)
            .map(|_| {
                let d = a % p;
                a /= p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, coords: &[u32]) -> Result<u32, GfError> {
        if coords.len() != self.k as usize || coords.iter().any(|&c| c >= self.p) {
            return Err(GfError::BadCoordinates(coords.to_vec()));
        }
        Ok(self.pack_digits(coords.iter().copied()))
    }

    /// The prime-field element `n mod p`.
    pub fn from_int(&self, n: u64) -> u32 {
        (n % self.p as u64) as u32
    }

    /// Key realizing the lexicographic order on coordinate tuples with the
    /// constant coordinate most significant.
    pub fn lex_key(&self, a: u32) -> u64 {
        let p = self.p as u64;
        self.digits(a).iter().fold(0u64, |acc, &d| acc * p + d as u64)
    }

    pub fn lex_cmp(&self, a: u32, b: u32) -> Ordering {
        self.lex_key(a).cmp(&self.lex_key(b))
    }

    /// All elements in ascending lexicographic order.
    pub fn elements_lex(&self) -> impl Iterator<Item = u32> + '_ {
        let p = self.p;
        let k = self.k;
        (0..self.q).map(move |key| {
            // key's most significant base-p digit is c_0.
            let mut rest = key;
            let mut digits = vec![0u32; k as usize];
            for i in (0..k as usize).rev() {
                digits[i] = rest % p;
                rest /= p;
            }
            self.pack_digits(digits.into_iter())
        })
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            let s = a + b;
            if s >= self.p {
                s - self.p
            } else {
                s
            }
        } else if self.p == 2 {
            a ^ b
        } else if !self.add_table.is_empty() {
            self.add_table[(a * self.q + b) as usize]
        } else {
            self.add_digits(a, b)
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if self.k == 1 {
            if a == 0 {
                0
            } else {
                self.p - a
            }
        } else {
            self.neg[a as usize]
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if self.k == 1 {
            ((a as u64 * b as u64) % self.p as u64) as u32
        } else if a == 0 || b == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    pub fn inv(&self, a: u32) -> Result<u32, GfError> {
        if a == 0 {
            return Err(GfError::DivisionByZero);
        }
        if self.k == 1 {
            Ok(self.pow(a, self.p as u64 - 2))
        } else {
            let order = self.q - 1;
            Ok(self.exp[((order - self.log[a as usize]) % order) as usize])
        }
    }

    pub fn pow(&self, a: u32, e: u64) -> u32 {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        if self.k == 1 {
            let p = self.p as u64;
            let (mut base, mut e, mut acc) = (a as u64, e, 1u64);
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc * base % p;
                }
                base = base * base % p;
                e >>= 1;
            }
            acc as u32
        } else {
            let order = (self.q - 1) as u64;
            let l = self.log[a as usize] as u64;
            self.exp[((l * (e % order)) % order) as usize]
        }
    }

    /// `a^(p^j)` where `q = p^j`; valid for any power of the characteristic.
    pub fn frobenius(&self, a: u32, q: u64) -> u32 {
        self.pow(a, q)
    }

    /// `p`-th root, the inverse of the absolute Frobenius.
    pub fn pth_root(&self, a: u32) -> u32 {
        if self.k == 1 {
            a
        } else {
            self.pow(a, (self.q / self.p) as u64)
        }
    }

    /// Whether `q` is the cardinality of a subfield.
    pub fn has_subfield(&self, q: u64) -> bool {
        let p = self.p as u64;
        let mut j = 0u32;
        let mut cur = 1u64;
        while cur < q {
            cur *= p;
            j += 1;
        }
        cur == q && j >= 1 && self.k.is_multiple_of(j)
    }

    /// Whether `a` lies in the subfield of cardinality `q`.
    pub fn in_subfield(&self, a: u32, q: u64) -> bool {
        self.frobenius(a, q) == a
    }
}

/// Lexicographically least monic irreducible of degree `k` over the prime field.
fn canonical_modulus(prime: &Field, k: u32) -> Vec<u32> {
    let p = prime.p as u64;
    let count = p.pow(k);
    for key in 0..count {
        // Most significant base-p digit of `key` is the constant coefficient.
        let mut coeffs = vec![0u32; k as usize + 1];
        let mut rest = key;
        for i in (0..k as usize).rev() {
            coeffs[i] = (rest % p) as u32;
            rest /= p;
        }
        coeffs[k as usize] = 1;
        if coeffs[0] == 0 {
            continue;
        }
        let poly = Polynomial::from_raw(prime.clone(), coeffs.clone());
        if poly.is_irreducible().unwrap_or(false) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// An element together with its field.
#[derive(Clone)]
pub struct FieldElement {
    field: Field,
    value: u32,
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords())
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field && self.value == other.value
    }
}

impl Eq for FieldElement {}

impl FieldElement {
    pub fn new(field: &Field, coords: &[u32]) -> Result<Self, GfError> {
        let value = field.from_digits(coords)?;
        Ok(FieldElement { field: field.clone(), value })
    }

    pub fn from_raw(field: &Field, value: u32) -> Self {
        debug_assert!(value < field.q);
        FieldElement { field: field.clone(), value }
    }

    pub fn zero(field: &Field) -> Self {
        Self::from_raw(field, 0)
    }

    pub fn one(field: &Field) -> Self {
        Self::from_raw(field, 1)
    }

    /// The class of `x` in `F_p[x]/(modulus)`.
    pub fn generator(field: &Field) -> Self {
        if field.k == 1 {
            Self::from_raw(field, 0)
        } else {
            Self::from_raw(field, field.p)
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn raw(&self) -> u32 {
        self.value
    }

    pub fn coords(&self) -> Vec<u32> {
        self.field.digits(self.value)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(&self, other: &Self) -> Result<(), GfError> {
        if *self.field == *other.field {
            Ok(())
        } else {
            Err(GfError::Mismatch(self.field.cardinality(), other.field.cardinality()))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, GfError> {
        self.check(other)?;
        Ok(Self::from_raw(&self.field, self.field.add(self.value, other.value)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, GfError> {
        self.check(other)?;
        Ok(Self::from_raw(&self.field, self.field.sub(self.value, other.value)))
    }

    pub fn mul(&self, other: &Self) -> Result<Self, GfError> {
        self.check(other)?;
        Ok(Self::from_raw(&self.field, self.field.mul(self.value, other.value)))
    }

    pub fn neg(&self) -> Self {
        Self::from_raw(&self.field, self.field.neg(self.value))
    }

    pub fn inv(&self) -> Result<Self, GfError> {
        Ok(Self::from_raw(&self.field, self.field.inv(self.value)?))
    }

    pub fn pow(&self, e: u64) -> Self {
        Self::from_raw(&self.field, self.field.pow(self.value, e))
    }

    /// `e ↦ e^q` for a subfield of cardinality `q`.
    pub fn frobenius(&self, q: u64) -> Result<Self, GfError> {
        if !self.field.has_subfield(q) {
            return Err(GfError::NotSubfield { q, card: self.field.cardinality() });
        }
        Ok(Self::from_raw(&self.field, self.field.frobenius(self.value, q)))
    }
}

impl PartialOrd for FieldElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.field.lex_cmp(self.value, other.value)
    }
}

/// The canonical embedding `F_{p^a} ↪ F_{p^b}` for `a | b`.
#[derive(Clone, Debug)]
pub struct Embedding {
    src: Field,
    dst: Field,
    images: Vec<u32>,
}

impl Embedding {
    /// Sends the source generator to the lexicographically least root of the
    /// source modulus in the destination.
    pub fn canonical(src: &Field, dst: &Field) -> Result<Self, GfError> {
        if src.p != dst.p || !dst.k.is_multiple_of(src.k) {
            return Err(GfError::Incompatible {
                src: src.cardinality(),
                dst: dst.cardinality(),
            });
        }
        if src.k == 1 {
            return Ok(Embedding {
                src: src.clone(),
                dst: dst.clone(),
                images: (0..src.q).collect(),
            });
        }
        let root = dst
            .elements_lex()
            .find(|&r| {
                src.modulus
                    .iter()
                    .rev()
                    .fold(0u32, |acc, &c| dst.add(dst.mul(acc, r), c))
                    == 0
            })
            .expect("the source modulus splits in any extension of degree divisible by k");
        let mut powers = Vec::with_capacity(src.k as usize);
        let mut cur = 1u32;
        for _ in 0..src.k {
            powers.push(cur);
            cur = dst.mul(cur, root);
        }
        let images = (0..src.q)
            .map(|v| {
                src.digits(v)
                    .iter()
                    .zip(&powers)
                    .fold(0u32, |acc, (&d, &pw)| dst.add(acc, dst.mul(d, pw)))
            })
            .collect();
        Ok(Embedding { src: src.clone(), dst: dst.clone(), images })
    }

    pub fn source(&self) -> &Field {
        &self.src
    }

    pub fn target(&self) -> &Field {
        &self.dst
    }

    #[inline]
    pub fn apply_raw(&self, a: u32) -> u32 {
        self.images[a as usize]
    }

    pub fn apply(&self, e: &FieldElement) -> Result<FieldElement, GfError> {
        if *e.field != *self.src {
            return Err(GfError::Mismatch(e.field.cardinality(), self.src.cardinality()));
        }
        Ok(FieldElement::from_raw(&self.dst, self.apply_raw(e.value)))
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Embedding) -> Result<Embedding, GfError> {
        if *self.dst != *next.src {
            return Err(GfError::Incompatible {
                src: self.dst.cardinality(),
                dst: next.src.cardinality(),
            });
        }
        Ok(Embedding {
            src: self.src.clone(),
            dst: next.dst.clone(),
            images: self.images.iter().map(|&v| next.apply_raw(v)).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn prime_field_has_identity_modulus() {
        let f = FieldDescriptor::new(2, 1).unwrap();
        assert_eq!(f.cardinality(), 2);
        assert_eq!(f.modulus(), &[0, 1]);
    }

    #[test]
    fn canonical_moduli() {
        assert_eq!(FieldDescriptor::new(2, 2).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(FieldDescriptor::new(3, 2).unwrap().modulus(), &[1, 0, 1]);
    }

    #[test]
    fn f9_modulus_precedes_other_irreducible_quadratics() {
        // Exhaustive oracle: monic quadratics over F_3 without a root, in the defined order.
        let mut irreducible = Vec::new();
        for c0 in 0..3u32 {
            for c1 in 0..3u32 {
                let has_root = (0..3u32).any(|t| (t * t + c1 * t + c0) % 3 == 0);
                if !has_root {
                    irreducible.push(vec![c0, c1, 1]);
                }
            }
        }
        assert_eq!(irreducible[0], vec![1, 0, 1]);
        assert_eq!(irreducible.len(), 3);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert_eq!(FieldDescriptor::new(4, 1).unwrap_err(), GfError::NotPrime(4));
        assert_eq!(FieldDescriptor::new(3, 0).unwrap_err(), GfError::ZeroDegree);
        assert!(matches!(FieldDescriptor::new(2, 21), Err(GfError::TooLarge { .. })));
        assert!(matches!(FieldDescriptor::new(1_000_003, 2), Err(GfError::TooLarge { .. })));
    }

    #[test]
    fn f4_generator_squares_to_a_plus_one() {
        let f = FieldDescriptor::new(2, 2).unwrap();
        let a = FieldElement::generator(&f);
        assert_eq!(a.mul(&a).unwrap().coords(), vec![1, 1]);
    }

    #[test]
    fn inverse_of_one_and_zero() {
        for (p, k) in [(2, 1), (3, 2), (5, 3)] {
            let f = FieldDescriptor::new(p, k).unwrap();
            assert_eq!(FieldElement::one(&f).inv().unwrap(), FieldElement::one(&f));
            assert_eq!(FieldElement::zero(&f).inv().unwrap_err(), GfError::DivisionByZero);
        }
    }

    #[test]
    fn frobenius_on_f9() {
        let f = FieldDescriptor::new(3, 2).unwrap();
        for c0 in 0..3 {
            for c1 in 0..3 {
                let e = FieldElement::new(&f, &[c0, c1]).unwrap();
                let expected = FieldElement::new(&f, &[c0, (3 - c1) % 3]).unwrap();
                assert_eq!(e.frobenius(3).unwrap(), expected);
            }
        }
        assert!(FieldElement::one(&f).frobenius(2).is_err());
    }

    #[test]
    fn mismatched_fields_are_rejected() {
        let f4 = FieldDescriptor::new(2, 2).unwrap();
        let f8 = FieldDescriptor::new(2, 3).unwrap();
        let e = FieldElement::one(&f4).add(&FieldElement::one(&f8));
        assert!(matches!(e, Err(GfError::Mismatch(4, 8))));
    }

    #[test]
    fn field_axioms_and_frobenius_orbit() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (p, k) in [(2, 1), (2, 4), (3, 2), (5, 2), (7, 3), (2, 10)] {
            let f = FieldDescriptor::new(p, k).unwrap();
            let q = f.cardinality();
            for _ in 0..200 {
                let a = rng.gen_range(0..q as u32);
                let b = rng.gen_range(0..q as u32);
                let c = rng.gen_range(0..q as u32);
                assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                assert_eq!(f.mul(a, b), f.slow_mul(a, b));
                assert_eq!(f.sub(f.add(a, b), b), a);
                assert_eq!(f.pow(a, q), a);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
            }
        }
    }

    #[test]
    fn deterministic_construction() {
        let a = FieldDescriptor::new(5, 3).unwrap();
        let b = FieldDescriptor::new(5, 3).unwrap();
        assert_eq!(a.modulus(), b.modulus());
    }

    #[test]
    fn prime_subfield_embedding_is_identity() {
        let f3 = FieldDescriptor::new(3, 1).unwrap();
        let f9 = FieldDescriptor::new(3, 2).unwrap();
        let e = Embedding::canonical(&f3, &f9).unwrap();
        for c in 0..3 {
            let img = e.apply(&FieldElement::new(&f3, &[c]).unwrap()).unwrap();
            assert_eq!(img.coords(), vec![c, 0]);
        }
        let f2 = FieldDescriptor::new(2, 1).unwrap();
        let f4 = FieldDescriptor::new(2, 2).unwrap();
        let e = Embedding::canonical(&f2, &f4).unwrap();
        assert_eq!(e.apply(&FieldElement::one(&f2)).unwrap(), FieldElement::one(&f4));
    }

    #[test]
    fn f4_into_f16_uses_least_root() {
        let f4 = FieldDescriptor::new(2, 2).unwrap();
        let f16 = FieldDescriptor::new(2, 4).unwrap();
        // Oracle: every element of F_16 evaluated in x^2 + x + 1.
        let mut roots: Vec<FieldElement> = (0..16u32)
            .map(|v| FieldElement::from_raw(&f16, v))
            .filter(|r| {
                let sq = r.mul(r).unwrap();
                sq.add(r).unwrap().add(&FieldElement::one(&f16)).unwrap().is_zero()
            })
            .collect();
        assert_eq!(roots.len(), 2);
        roots.sort();
        let e = Embedding::canonical(&f4, &f16).unwrap();
        let img = e.apply(&FieldElement::generator(&f4)).unwrap();
        assert_eq!(img, roots[0]);
    }

    #[test]
    fn embeddings_are_injective_homomorphisms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for ((p, a), b) in [((2, 2), 4), ((3, 2), 4), ((2, 3), 6), ((5, 1), 2)] {
            let src = FieldDescriptor::new(p, a).unwrap();
            let dst = FieldDescriptor::new(p, b).unwrap();
            let e = Embedding::canonical(&src, &dst).unwrap();
            let mut seen = std::collections::HashSet::new();
            for v in 0..src.cardinality() as u32 {
                assert!(seen.insert(e.apply_raw(v)));
            }
            for _ in 0..200 {
                let x = rng.gen_range(0..src.cardinality() as u32);
                let y = rng.gen_range(0..src.cardinality() as u32);
                assert_eq!(e.apply_raw(src.add(x, y)), dst.add(e.apply_raw(x), e.apply_raw(y)));
                assert_eq!(e.apply_raw(src.mul(x, y)), dst.mul(e.apply_raw(x), e.apply_raw(y)));
            }
        }
    }

    #[test]
    fn embedding_rejects_incompatible_fields() {
        let f4 = FieldDescriptor::new(2, 2).unwrap();
        let f8 = FieldDescriptor::new(2, 3).unwrap();
        let f9 = FieldDescriptor::new(3, 2).unwrap();
        assert!(Embedding::canonical(&f4, &f8).is_err());
        assert!(Embedding::canonical(&f4, &f9).is_err());
    }

    #[test]
    fn tower_composition() {
        let f2 = FieldDescriptor::new(2, 1).unwrap();
        let f4 = FieldDescriptor::new(2, 2).unwrap();
        let f16 = FieldDescriptor::new(2, 4).unwrap();
        let a = Embedding::canonical(&f2, &f4).unwrap();
        let b = Embedding::canonical(&f4, &f16).unwrap();
        let c = a.then(&b).unwrap();
        assert_eq!(c.apply_raw(1), 1);
        assert_eq!(c.apply_raw(0), 0);
        assert!(b.then(&a).is_err());
    }
}
