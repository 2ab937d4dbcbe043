//! Seeded random streams, block-parallel execution and streaming moments.
//!
//! Work is cut into fixed-size blocks and block `k` always draws from the
//! stream derived from `(master seed, domain, k)`. Results are merged in
//! block order, so the worker count never changes an output bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Master seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x00C0_FFEE;

/// Rounds per block.
pub const BLOCK_ROUNDS: u64 = 4096;

/// Keeps the streams of different consumers of one master seed apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamDomain {
    Estimate = 1,
    Search = 2,
    Confirm = 3,
}

/// Independent ChaCha stream for one block.
pub fn stream_rng(master: u64, domain: StreamDomain, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(((domain as u64) << 48) ^ block);
    rng
}

/// Evaluates `f` on every block index of `blocks`, on up to `workers`
/// threads, returning results in block order.
pub fn map_blocks<T, F>(workers: usize, blocks: std::ops::Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    if workers <= 1 || blocks.end - blocks.start <= 1 {
        return blocks.map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| blocks.into_par_iter().map(f).collect()),
        Err(_) => blocks.map(f).collect(),
    }
}

/// Number of blocks needed to cover `rounds` rounds.
pub fn block_count(rounds: u64) -> u64 {
    rounds.div_ceil(BLOCK_ROUNDS)
}

/// Rounds handled by block `k` out of `rounds`.
pub fn block_len(rounds: u64, k: u64) -> u64 {
    (rounds - k * BLOCK_ROUNDS).min(BLOCK_ROUNDS)
}

/// `(count, sum, sum of squares)`; merging is associative.
#[derive(Debug, Default, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub count: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, v: f64) {
        self.count += 1;
        self.sum += v;
        self.sum_sq += v * v;
    }

    pub fn merge(&mut self, other: &Moments) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.sum / self.count as f64
        }
    }

    /// Sample standard deviation (n - 1 denominator) over √n.
    pub fn std_error(&self) -> f64 {
        if self.count < 2 {
            return 0.0;
        }
        let n = self.count as f64;
        let var = ((self.sum_sq - self.sum * self.sum / n) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}
