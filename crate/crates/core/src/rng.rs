//! Deterministic random substreams.
//!
//! Every stream is a ChaCha8 keystream keyed by the 64-bit seed and
//! positioned on its own 64-bit stream id, so substreams never overlap and
//! the output depends only on `(seed, index)`, never on thread scheduling.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// A reproducible source of uniforms and standard normals.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    index: u64,
    rng: ChaCha8Rng,
}

/// Creates the substream `index` of the generator family keyed by `seed`.
pub fn derive_stream(seed: u64, index: u64) -> RandomStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng.set_word_pos(0);
    RandomStream { seed, index, rng }
}

/// Roles of the independent streams a single Monte Carlo path may consume.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamRole {
    /// Driving Wiener noise.
    Wiener = 0,
    /// The independent time-changed noise of the interface diffusion.
    TimeChanged = 1,
    /// Direct sampling from a closed-form law.
    Law = 2,
}

const ROLES: u64 = 3;

/// Substream for `role` on Monte Carlo path `path`.
pub fn path_stream(seed: u64, path: u64, role: StreamRole) -> RandomStream {
    derive_stream(seed, path * ROLES + role as u64)
}

impl RandomStream {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Companion stream keyed by `(seed, index)` with the top bit of the
    /// stream id set; path stream ids never reach that range.
    pub fn companion(&self) -> RandomStream {
        derive_stream(self.seed, self.index ^ (1 << 63))
    }

    /// Raw 64-bit output.
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on the open interval (0, 1).
    pub fn uniform_open(&mut self) -> f64 {
        loop {
            let u: f64 = self.rng.random();
            if u > 0.0 {
                return u;
            }
        }
    }

    /// Uniform on [0, 1).
    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn fill_normal(&mut self, out: &mut [f64]) {
        for v in out {
            *v = self.rng.sample(StandardNormal);
        }
    }
}
