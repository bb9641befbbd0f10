//! Dense multiplication kernels: schoolbook below a threshold, Karatsuba above.

use std::sync::atomic::{AtomicUsize, Ordering};

use crate::gf::FieldDescriptor;

/// Operand length (in coefficients) below which schoolbook multiplication is used.
pub const DEFAULT_KARATSUBA_THRESHOLD: usize = 64;

static KARATSUBA_THRESHOLD: AtomicUsize = AtomicUsize::new(DEFAULT_KARATSUBA_THRESHOLD);

pub fn karatsuba_threshold() -> usize {
    KARATSUBA_THRESHOLD.load(Ordering::Relaxed)
}

/// Tunes the crossover; values below 2 are clamped.
pub fn set_karatsuba_threshold(t: usize) {
    KARATSUBA_THRESHOLD.store(t.max(2), Ordering::Relaxed);
}

trait Ops: Copy {
    fn add(self, a: u32, b: u32) -> u32;
    fn sub(self, a: u32, b: u32) -> u32;
    fn mul(self, a: u32, b: u32) -> u32;
    fn school(self, a: &[u32], b: &[u32], out: &mut [u32]) {
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.add(out[i + j], self.mul(x, y));
            }
        }
    }
}

#[derive(Clone, Copy)]
struct Binary;

impl Ops for Binary {
    #[inline]
    fn add(self, a: u32, b: u32) -> u32 {
        a ^ b
    }
    #[inline]
    fn sub(self, a: u32, b: u32) -> u32 {
        a ^ b
    }
    #[inline]
    fn mul(self, a: u32, b: u32) -> u32 {
        a & b
    }
}

#[derive(Clone, Copy)]
struct Prime(u32);

impl Ops for Prime {
    #[inline]
    fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }
    #[inline]
    fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }
    #[inline]
    fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }
    fn school(self, a: &[u32], b: &[u32], out: &mut [u32]) {
        // Products are < 2^40, so a row of up to 2^23 of them fits in u64.
        let p = self.0 as u64;
        let mut acc = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                acc[i + j] += x as u64 * y as u64;
            }
            if i % 4096 == 4095 {
                acc.iter_mut().for_each(|v| *v %= p);
            }
        }
        for (o, v) in out.iter_mut().zip(acc) {
            *o = ((*o as u64 + v) % p) as u32;
        }
    }
}

#[derive(Clone, Copy)]
struct Ext<'a>(&'a FieldDescriptor);

impl Ops for Ext<'_> {
    #[inline]
    fn add(self, a: u32, b: u32) -> u32 {
        self.0.add(a, b)
    }
    #[inline]
    fn sub(self, a: u32, b: u32) -> u32 {
        self.0.sub(a, b)
    }
    #[inline]
    fn mul(self, a: u32, b: u32) -> u32 {
        self.0.mul(a, b)
    }
}

/// Product of two coefficient slices (ascending powers); empty means zero.
pub(crate) fn mul_slices(f: &FieldDescriptor, a: &[u32], b: &[u32]) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; a.len() + b.len() - 1];
    let t = karatsuba_threshold();
    if f.is_prime_field() && f.characteristic() == 2 {
        mul_acc(Binary, t, a, b, &mut out);
    } else if f.is_prime_field() {
        mul_acc(Prime(f.characteristic() as u32), t, a, b, &mut out);
    } else {
        mul_acc(Ext(f), t, a, b, &mut out);
    }
    out
}

fn add_into<O: Ops>(o: O, out: &mut [u32], src: &[u32]) {
    for (d, &s) in out.iter_mut().zip(src) {
        *d = o.add(*d, s);
    }
}

/// `out += a * b`, with `out.len() >= a.len() + b.len() - 1`.
fn mul_acc<O: Ops>(o: O, threshold: usize, a: &[u32], b: &[u32], out: &mut [u32]) {
    let (a, b) = if a.len() >= b.len() { (a, b) } else { (b, a) };
    let (n, m) = (a.len(), b.len());
    if m == 0 {
        return;
    }
    if m < threshold {
        o.school(a, b, out);
        return;
    }
    if n >= 2 * m {
        for (i, chunk) in a.chunks(m).enumerate() {
            mul_acc(o, threshold, chunk, b, &mut out[i * m..]);
        }
        return;
    }
    let h = n.div_ceil(2);
    let (a0, a1) = a.split_at(h);
    if m <= h {
        mul_acc(o, threshold, a0, b, out);
        mul_acc(o, threshold, a1, b, &mut out[h..]);
        return;
    }
    let (b0, b1) = b.split_at(h);

    let mut z0 = vec![0u32; 2 * h - 1];
    mul_acc(o, threshold, a0, b0, &mut z0);
    let mut z2 = vec![0u32; a1.len() + b1.len() - 1];
    mul_acc(o, threshold, a1, b1, &mut z2);

    let mut sa = a0.to_vec();
    add_into(o, &mut sa, a1);
    let mut sb = b0.to_vec();
    add_into(o, &mut sb, b1);
    let mut z1 = vec![0u32; 2 * h - 1];
    mul_acc(o, threshold, &sa, &sb, &mut z1);
    for (d, &s) in z1.iter_mut().zip(&z0) {
        *d = o.sub(*d, s);
    }
    for (d, &s) in z1.iter_mut().zip(&z2) {
        *d = o.sub(*d, s);
    }

    add_into(o, out, &z0);
    add_into(o, &mut out[h..], &z1);
    add_into(o, &mut out[2 * h..], &z2);
}
