//! Deterministic per-sample random streams.
//!
//! Each sample draws from its own generator derived from `(seed, tag, index)`,
//! so parallel loops produce identical results regardless of scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::event::{Direction, Event, MAX_DIM};
use crate::scalar::Scalar;

pub type SampleRng = ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Root seed plus derivation of independent sub-streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStream {
    seed: u64,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Child stream for a named stage, e.g. checking vs fitting.
    pub fn child(&self, tag: u64) -> Self {
        Self {
            seed: splitmix64(self.seed ^ splitmix64(tag.wrapping_add(0x51_7cc1_b727_220a))),
        }
    }

    pub fn rng(&self, index: u64) -> SampleRng {
        SampleRng::seed_from_u64(splitmix64(self.seed.wrapping_add(splitmix64(index))))
    }
}

pub fn uniform<T: Scalar, R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> T {
    T::lit(rng.random_range(lo..=hi))
}

/// Event uniform in `[-scale, scale]^dim`.
pub fn uniform_event<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
    scale: f64,
) -> Result<Event<T>> {
    let mut buf = [T::zero(); MAX_DIM];
    for c in buf.iter_mut().take(dim) {
        *c = uniform(rng, -scale, scale);
    }
    Event::new(&buf[..dim])
}

/// Direction with spatial part uniform on the unit sphere.
pub fn random_direction<T: Scalar, R: Rng + ?Sized>(
    rng: &mut R,
    dim: usize,
) -> Result<Direction<T>> {
    loop {
        let mut buf = [T::zero(); MAX_DIM];
        let mut norm = 0.0;
        for c in buf.iter_mut().take(dim - 1) {
            let g: f64 = rng.sample(StandardNormal);
            norm += g * g;
            *c = T::lit(g);
        }
        if norm > 1e-12 {
            return Direction::from_spatial(&buf[..dim - 1]);
        }
    }
}
