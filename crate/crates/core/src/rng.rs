//! Per-reference random substreams.
//!
//! Every reference fingerprint gets its own ChaCha8 stream derived from the
//! global seed, so parallel processing order never changes the draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Substreams {
    seed: u64,
}

impl Substreams {
    pub fn new(seed: u64) -> Self {
        Substreams { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn stream(&self, id: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(id);
        rng
    }

    /// Stream used to pick the members of the cluster anchored at `reference`.
    pub fn cluster_rng(&self, reference: usize) -> ChaCha8Rng {
        self.stream((reference as u64) << 1)
    }

    /// Stream used for crossover-and-mutate draws of the cluster anchored at `reference`.
    pub fn offspring_rng(&self, reference: usize) -> ChaCha8Rng {
        self.stream(((reference as u64) << 1) | 1)
    }
}
