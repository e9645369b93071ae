//! Named, independent random streams derived from a trial seed.
//!
//! Every source of randomness in a trial gets its own ChaCha stream so that
//! algorithms sharing a trial see the same world, the same reward noise at
//! step `t` and the same feedback coin for feature `j` at step `t`,
//! whatever they chose before.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::environment::FeedbackCoins;

/// The generator used throughout the crate.
pub type RandomSource = ChaCha8Rng;

/// Purpose tag of a random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Pool,
    Theta,
    RewardNoise,
    Feedback,
    Subset,
    /// Exploration coins of one algorithm, keyed by a hash of its tag.
    Policy(u32),
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::Pool => 1,
            Stream::Theta => 2,
            Stream::RewardNoise => 3,
            Stream::Feedback => 4,
            Stream::Subset => 5,
            Stream::Policy(i) => 1 << 32 | u64::from(i),
        }
    }
}

fn key(seed: u64, stream: Stream) -> [u8; 32] {
    let mut k = [0u8; 32];
    k[..8].copy_from_slice(&seed.to_le_bytes());
    k[8..16].copy_from_slice(&stream.id().to_le_bytes());
    k
}

/// A generator for one purpose within one trial.
pub fn stream_rng(seed: u64, stream: Stream) -> RandomSource {
    ChaCha8Rng::from_seed(key(seed, stream))
}

/// A generator for one purpose at one step of one trial.
pub fn step_rng(seed: u64, stream: Stream, step: u64) -> RandomSource {
    let mut rng = stream_rng(seed, stream);
    rng.set_stream(step);
    rng
}

/// Feedback coins addressed by feature index: the coin for feature `j` at a
/// given step does not depend on which other features were examined.
#[derive(Debug, Clone)]
pub struct KeyedCoins {
    rng: RandomSource,
}

impl KeyedCoins {
    pub fn new(seed: u64, step: u64) -> Self {
        Self {
            rng: step_rng(seed, Stream::Feedback, step),
        }
    }
}

impl FeedbackCoins for KeyedCoins {
    fn coin(&mut self, feature: usize) -> f64 {
        // two 32-bit words per feature
        self.rng.set_word_pos(2 * feature as u128);
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}
