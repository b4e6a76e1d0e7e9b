//! Reproducible uniform streams keyed by `(seed, stream_index)`.
//!
//! Each stream is a ChaCha8 keystream: the seed selects the key and the
//! stream index selects the nonce, so replicate `r` of a simulation can use
//! stream `r` and get the same draws regardless of which thread runs it.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream_index: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        RngStream { seed, stream_index }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn generator(&self) -> UniformGenerator {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_index);
        UniformGenerator { rng }
    }
}

/// Draws from one stream. Owned by the caller; nothing is shared.
#[derive(Debug, Clone)]
pub struct UniformGenerator {
    rng: ChaCha8Rng,
}

impl UniformGenerator {
    /// Uniform on the open interval (0, 1): the midpoint of one of 2^53
    /// equal cells, so neither 0 nor 1 is ever produced.
    pub fn next_open01(&mut self) -> f64 {
        let bits = self.rng.next_u64() >> 11;
        (bits as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
    }
}

impl Iterator for UniformGenerator {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        Some(self.next_open01())
    }
}

pub fn rng_uniform(stream: RngStream, count: usize) -> Vec<f64> {
    stream.generator().take(count).collect()
}
