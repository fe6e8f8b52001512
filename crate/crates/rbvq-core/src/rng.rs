//! Seedable random source; every draw sequence is fully determined by the
//! seed (and stream id), which is what makes whole runs reproducible.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct RandomSource {
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent generator derived from the same seed. Distinct `stream`
    /// values give statistically independent sequences, so one experiment
    /// seed can feed the codebook init, the stream composer, and so on
    /// without their draws interleaving.
    pub fn substream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    /// Uniform draw from [0, 1).
    pub fn unit_f64(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Uniform draw from [lo, hi).
    pub fn range_f64(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    /// Uniform index in 0..len. `len` must be nonzero.
    pub fn index(&mut self, len: usize) -> usize {
        self.rng.random_range(0..len)
    }

    /// Standard normal via Box-Muller; consumes two uniforms per draw.
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.unit_f64(); // (0, 1], keeps ln finite
        let u2 = self.unit_f64();
        crate::math::sqrt(-2.0 * crate::math::ln(u1))
            * crate::math::cos(core::f64::consts::TAU * u2)
    }
}
