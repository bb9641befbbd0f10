//! Deterministic suite of hypothesis-passing `(φ, x)` pairs shared by the
//! integration tests. Degrees are kept small enough that `A_3` can be
//! factored quickly.

#![allow(dead_code)]

use drinfeld_zsig::drinfeld::{DrinfeldModule, DEFAULT_DEGREE_BUDGET};
use drinfeld_zsig::gf::{Field, FieldDescriptor};
use drinfeld_zsig::polyring::{Polynomial, RationalFunction};
use drinfeld_zsig::zsigmondy::{check_hypotheses, splits_completely};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SUITE_SEED: u64 = 0x5eed_2024;
pub const SUITE_NMAX: usize = 4;

#[derive(Clone, Debug)]
pub struct Sample {
    pub module: DrinfeldModule,
    pub x: Polynomial,
    pub splits: bool,
}

impl Sample {
    pub fn label(&self) -> String {
        format!("q={} g={} Δ={} x={}", self.module.q(), self.module.g(), self.module.delta(), self.x)
    }
}

pub fn field(p: u64, k: u32) -> Field {
    FieldDescriptor::new(p, k).unwrap()
}

pub fn random_poly(rng: &mut ChaCha8Rng, f: &Field, max_deg: usize) -> Polynomial {
    let d = rng.gen_range(0..=max_deg);
    let q = f.cardinality() as u32;
    Polynomial::from_raw(f.clone(), (0..=d).map(|_| rng.gen_range(0..q)).collect())
}

pub fn running_instance() -> Sample {
    let f = field(3, 1);
    let module = DrinfeldModule::rank2(Polynomial::one(&f), Polynomial::one(&f)).unwrap();
    Sample { module, x: Polynomial::one(&f), splits: true }
}

/// `(p, k, max deg g, max deg Δ, max deg x)` per field.
const SHAPES: &[(u64, u32, usize, usize, usize)] = &[(2, 1, 2, 2, 2), (3, 1, 1, 2, 0), (2, 2, 1, 1, 0)];

/// The running instance followed by `count - 1` random hypothesis-passing samples.
pub fn sample_suite(count: usize) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    let mut out = vec![running_instance()];
    let mut i = 0usize;
    while out.len() < count {
        let (p, k, dg, dd, dx) = SHAPES[i % SHAPES.len()];
        i += 1;
        let f = field(p, k);
        let g = random_poly(&mut rng, &f, dg);
        let delta = random_poly(&mut rng, &f, dd);
        let x = random_poly(&mut rng, &f, dx);
        if delta.is_zero() || x.is_zero() {
            continue;
        }
        let module = DrinfeldModule::rank2(g, delta).unwrap();
        let xr: RationalFunction = x.clone().into();
        let h = check_hypotheses(&module, &xr, 0, DEFAULT_DEGREE_BUDGET).unwrap();
        if !h.all_passed() {
            continue;
        }
        if out.iter().any(|s| s.module == module && s.x == x) {
            continue;
        }
        let splits = splits_completely(module.delta(), 0).unwrap();
        out.push(Sample { module, x, splits });
    }
    out
}
