//! Seeded normal-variate streams for Monte Carlo runs.
//!
//! Every stream is a ChaCha8 generator whose key is derived from the base
//! seed and a stream domain, and whose 64-bit stream id is the path index.
//! A stream therefore depends only on `(base_seed, domain, path_index)` and
//! never on which thread draws it or in what order paths are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Disjoint families of streams sharing one base seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StreamDomain {
    /// Brownian increments driving the stochastic equation.
    Brownian,
    /// Multiplicative measurement noise on the observations.
    Measurement,
}

impl StreamDomain {
    fn tag(self) -> u64 {
        match self {
            StreamDomain::Brownian => 0x4252_4f57_4e49_414e,
            StreamDomain::Measurement => 0x4d45_4153_5552_4531,
        }
    }
}

/// Single-owner stream of standard normal variates.
#[derive(Debug, Clone)]
pub struct NormalStream {
    rng: ChaCha8Rng,
}

impl NormalStream {
    pub fn new(base_seed: u64, domain: StreamDomain, path_index: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&base_seed.to_le_bytes());
        key[8..16].copy_from_slice(&domain.tag().to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(path_index);
        Self { rng }
    }

    pub fn next_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    pub fn take_vec(&mut self, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.next_normal()).collect()
    }
}

impl Iterator for NormalStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.next_normal())
    }
}

/// Brownian-increment stream for path `path_index`.
pub fn rng_stream(base_seed: u64, path_index: u64) -> NormalStream {
    NormalStream::new(base_seed, StreamDomain::Brownian, path_index)
}

/// Measurement-noise stream for path `path_index`, disjoint from
/// [`rng_stream`].
pub fn noise_stream(base_seed: u64, path_index: u64) -> NormalStream {
    NormalStream::new(base_seed, StreamDomain::Measurement, path_index)
}
