//! Counter-based random streams.
//!
//! Every source of randomness in an episode draws from its own named stream,
//! keyed by `(seed, stream_id)` and positioned by a 64-bit word counter. Two
//! streams with equal keys and counters produce identical draws, and advancing
//! one stream never shifts another.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Named stream identifiers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Stream {
    /// Cube placement, collected-cube relocation and target resampling.
    Layout = 1,
    /// Non-target cube teleportation.
    Teleport = 2,
    /// T-Maze corridor lengths.
    CorridorLength = 3,
    /// T-Maze cues.
    Cue = 4,
    /// Stochastic agents.
    Agent = 5,
}

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: Stream) -> Self {
        Self::at(seed, stream as u64, 0)
    }

    /// Stream positioned at an arbitrary word counter.
    pub fn at(seed: u64, stream_id: u64, counter: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        inner.set_word_pos(u128::from(counter));
        Self {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Number of 32-bit words consumed so far.
    pub fn counter(&self) -> u64 {
        self.inner.get_word_pos() as u64
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a base seed with a sequence of indices into a well-spread 64-bit seed.
pub fn derive_seed(base: u64, indices: &[u64]) -> u64 {
    indices
        .iter()
        .fold(splitmix64(base), |acc, &i| splitmix64(acc ^ splitmix64(i)))
}

/// Seed of one evaluation episode.
pub fn episode_seed(base_seed: u64, run: u64, episode: u64) -> u64 {
    derive_seed(base_seed, &[run, episode])
}
