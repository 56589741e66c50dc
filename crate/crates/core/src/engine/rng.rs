//! Seeded scheduler randomness.
//!
//! The random scheduler is realized with ChaCha8, seeded from a single
//! `u64`. ChaCha's output stream is specified independently of platform and
//! library version, so a `(seed, protocol, n, budget)` tuple pins down an
//! interaction sequence exactly, on any machine.
//!
//! Bounded draws use Lemire multiply-shift rejection on the raw 64-bit
//! stream: accept `x` when `(x * range) mod 2^64 >= (2^64 - range) mod
//! range`, answer `(x * range) >> 64`. The acceptance threshold is
//! precomputed per range, so a draw is one multiply, and the rule is part
//! of the reproducibility contract.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::AgentId;

/// Deterministic scheduler RNG. Identical seeds yield identical pair
/// sequences.
#[derive(Debug, Clone)]
pub struct SchedulerRng {
    inner: ChaCha8Rng,
    seed: u64,
}

impl SchedulerRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
            seed,
        }
    }

    /// The seed this generator was constructed from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw from `0..bound`. Cold-path convenience; hot loops use a
    /// prebuilt [`UniformIndex`].
    pub fn index(&mut self, bound: usize) -> usize {
        UniformIndex::new(bound).draw(self)
    }
}

impl RngCore for SchedulerRng {
    #[inline]
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    #[inline]
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

/// Exact uniform sampler over `0..range` with a precomputed rejection
/// threshold.
#[derive(Debug, Clone, Copy)]
pub struct UniformIndex {
    range: u64,
    threshold: u64,
}

impl UniformIndex {
    pub fn new(bound: usize) -> Self {
        let range = bound as u64;
        assert!(range >= 1, "empty range");
        Self {
            range,
            threshold: range.wrapping_neg() % range,
        }
    }

    #[inline]
    pub fn draw(&self, rng: &mut SchedulerRng) -> usize {
        loop {
            let wide = u128::from(rng.next_u64()) * u128::from(self.range);
            if wide as u64 >= self.threshold {
                return (wide >> 64) as usize;
            }
        }
    }
}

/// SplitMix64 finalizer; the standard avalanche from Steele et al.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Sub-seed for trial `trial` of a sweep at population size `n`.
///
/// Documented mix: two chained SplitMix64 finalizations of the master seed
/// xored with `n` and `trial`. A trial's seed depends only on
/// `(master, n, trial)`, so adding or removing other trials from a sweep
/// never changes its report.
pub fn trial_seed(master: u64, n: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(master ^ n.wrapping_mul(0xa076_1d64_78bd_642f)) ^ trial)
}

/// Prebuilt sampler for ordered (initiator, responder) pairs, uniform over
/// all `n(n-1)` of them.
///
/// Initiator is uniform over `[0, n)`; the responder is drawn over
/// `[0, n-1)` and shifted past the initiator, which is exact uniformity
/// without rejection across pairs.
#[derive(Debug, Clone, Copy)]
pub struct PairSampler {
    initiator: UniformIndex,
    responder: UniformIndex,
}

impl PairSampler {
    pub fn new(n: usize) -> Self {
        assert!(n >= 2, "pair sampling requires a population of at least 2");
        Self {
            initiator: UniformIndex::new(n),
            responder: UniformIndex::new(n - 1),
        }
    }

    #[inline]
    pub fn draw(&self, rng: &mut SchedulerRng) -> (AgentId, AgentId) {
        let initiator = self.initiator.draw(rng);
        let mut responder = self.responder.draw(rng);
        if responder >= initiator {
            responder += 1;
        }
        (initiator as AgentId, responder as AgentId)
    }
}

/// Draws one ordered (initiator, responder) pair uniformly from the
/// `n(n-1)` ordered pairs. Requires `n >= 2`. Cold-path convenience over
/// [`PairSampler`]; both produce the same stream for the same rng state.
#[inline]
pub fn draw_pair(rng: &mut SchedulerRng, n: usize) -> (AgentId, AgentId) {
    PairSampler::new(n).draw(rng)
}
