//! Seeded, stream-addressed noise sources.
//!
//! Every Brownian increment in the crate comes from a ChaCha8 stream keyed by
//! `(seed, stream_id)`. Same pair, same draws, forever; distinct stream ids
//! give independent streams (2⁶⁴ of them per seed), which is what makes the
//! shared-B₂ coupling of the full system exact and Monte Carlo batches
//! scheduler-invariant.
//!
//! Stream id convention: path `i` of a batch uses base seed + i, and within a
//! path ids 1, 2, 3 drive B₁, B₂, B₃; id 0 is the jump clock of the switched
//! process.

use rand::distr::StandardUniform;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

/// A reproducible scalar noise stream.
#[derive(Debug, Clone)]
pub struct GaussianStream {
    rng: ChaCha8Rng,
}

/// Opens the stream identified by `(seed, stream_id)`.
pub fn gaussian_stream(seed: u64, stream_id: u64) -> GaussianStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    GaussianStream { rng }
}

impl GaussianStream {
    /// Next standard normal draw.
    pub fn next_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Next uniform draw in [0, 1).
    pub fn next_uniform(&mut self) -> f64 {
        StandardUniform.sample(&mut self.rng)
    }

    /// Next exponential holding time with the given rate.
    pub fn next_exp(&mut self, rate: f64) -> f64 {
        let e: f64 = Exp1.sample(&mut self.rng);
        e / rate
    }
}
