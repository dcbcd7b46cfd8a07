use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Seeded pseudo-random source: ChaCha8 keyed by the 64-bit seed.
///
/// The same seed and stream always yield the same sequence. A source is
/// single-owner; wrap it in a lock to share it.
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        RandomSource { seed, rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Seeds from operating system entropy.
    pub fn from_entropy() -> Self {
        Self::new(rand::random())
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// An independent source with the same seed on a different ChaCha stream.
    pub fn fork(&self, stream: u64) -> RandomSource {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        RandomSource { seed: self.seed, rng }
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
