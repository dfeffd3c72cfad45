//! Counter-based sampling keyed by `(seed, index)`.
//!
//! Sample `i` of seed `s` is drawn from ChaCha8 keyed by `s` on stream `i`, so
//! any subset of indices can be generated in any order, on any thread, with
//! the same result.

use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::complex::{self, C64, ONE};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterSampler {
    seed: u64,
}

impl CounterSampler {
    pub fn new(seed: u64) -> Self {
        CounterSampler { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The generator owning sample `index`.
    pub fn stream(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        rng
    }
}

/// Uniform in the open unit disk.
pub fn unit_disk<R: Rng>(rng: &mut R) -> C64 {
    loop {
        let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if z.norm_sqr() < 1.0 {
            return z;
        }
    }
}

/// Uniform in the annulus `inner ≤ |z − center| ≤ outer` (by area).
pub fn annulus<R: Rng>(rng: &mut R, center: C64, inner: f64, outer: f64) -> C64 {
    let u: f64 = rng.gen();
    let r = libm::sqrt(inner * inner + u * (outer * outer - inner * inner));
    let theta = rng.gen_range(0.0..2.0 * PI);
    center + C64::from_polar(r, theta)
}

/// Uniform in the rectangle `[re.0, re.1) × [im.0, im.1)`.
pub fn rectangle<R: Rng>(rng: &mut R, re: (f64, f64), im: (f64, f64)) -> C64 {
    C64::new(rng.gen_range(re.0..re.1), rng.gen_range(im.0..im.1))
}

/// Pairs with `|λ1 λ2 − 1|` below this are rejected before any evaluation.
pub const PRODUCT_ONE_GUARD: f64 = 1e-14;

pub fn near_product_one(l1: C64, l2: C64) -> bool {
    complex::abs(l1 * l2 - ONE) < PRODUCT_ONE_GUARD
}

/// A pair uniform in the open bidisk, redrawn from the same stream while
/// `λ1 λ2` is within [`PRODUCT_ONE_GUARD`] of 1.
pub fn bidisk_pair<R: Rng>(rng: &mut R) -> (C64, C64) {
    loop {
        let pair = (unit_disk(rng), unit_disk(rng));
        if !near_product_one(pair.0, pair.1) {
            return pair;
        }
    }
}
