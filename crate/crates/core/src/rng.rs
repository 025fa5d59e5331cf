//! Counter-based, stream-splittable randomness for Monte Carlo runs.
//!
//! Every sample block draws from its own ChaCha8 stream keyed by the master
//! seed, so the set of samples is independent of the thread count.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Samples per stream. Block `i` of a run always uses stream `i`.
pub const BLOCK_SAMPLES: u64 = 1 << 14;

/// A ChaCha8 generator that remembers which `(seed, stream)` it was built from.
#[derive(Clone, Debug)]
pub struct StreamRng {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl StreamRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Position in the stream, in 32-bit words.
    pub fn word_pos(&self) -> u128 {
        self.inner.get_word_pos()
    }

    pub fn tag(&self) -> StreamTag {
        StreamTag {
            seed: self.seed,
            stream: self.stream,
            word_pos: self.word_pos(),
        }
    }
}

impl RngCore for StreamRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

/// Where a random object came from: enough to regenerate it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct StreamTag {
    pub seed: u64,
    pub stream: u64,
    pub word_pos: u128,
}

/// Associative accumulation of per-block results.
pub trait Merge {
    fn merge(&mut self, other: Self);
}

/// How a Monte Carlo run is split and reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct McPlan {
    pub samples: u64,
    pub seed: u64,
    pub threads: usize,
    /// Merge block results in block order even when running in parallel.
    pub deterministic_reduce: bool,
}

impl McPlan {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self {
            samples,
            seed,
            threads: 1,
            deterministic_reduce: false,
        }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads.max(1);
        self
    }

    pub fn deterministic(mut self, on: bool) -> Self {
        self.deterministic_reduce = on;
        self
    }

    pub fn blocks(&self) -> u64 {
        self.samples.div_ceil(BLOCK_SAMPLES)
    }

    fn block_len(&self, block: u64) -> u64 {
        let start = block * BLOCK_SAMPLES;
        (self.samples - start).min(BLOCK_SAMPLES)
    }

    /// Runs `body(rng, first_sample_index, count, acc)` once per block and
    /// merges the block accumulators.
    ///
    /// With one thread, or with `deterministic_reduce`, blocks are merged in
    /// index order and the result is bit-reproducible.
    pub fn run<A, I, F>(&self, init: I, body: F) -> Result<A>
    where
        A: Merge + Send,
        I: Fn() -> A + Sync + Send,
        F: Fn(&mut StreamRng, u64, u64, &mut A) + Sync + Send,
    {
        let run_block = |block: u64| {
            let mut rng = StreamRng::new(self.seed, block);
            let mut acc = init();
            body(&mut rng, block * BLOCK_SAMPLES, self.block_len(block), &mut acc);
            acc
        };
        let blocks = self.blocks();
        if self.threads <= 1 {
            let mut total = init();
            for block in 0..blocks {
                total.merge(run_block(block));
            }
            return Ok(total);
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .map_err(|e| Error::ThreadPool(e.to_string()))?;
        Ok(pool.install(|| {
            if self.deterministic_reduce {
                let parts: Vec<A> = (0..blocks).into_par_iter().map(run_block).collect();
                let mut total = init();
                for part in parts {
                    total.merge(part);
                }
                total
            } else {
                (0..blocks)
                    .into_par_iter()
                    .map(run_block)
                    .reduce(&init, |mut a, b| {
                        a.merge(b);
                        a
                    })
            }
        }))
    }
}

impl<A: Merge> Merge for Vec<A> {
    fn merge(&mut self, other: Self) {
        if self.is_empty() {
            *self = other;
            return;
        }
        for (mine, theirs) in self.iter_mut().zip(other) {
            mine.merge(theirs);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::Moments;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let mut a = StreamRng::new(7, 3);
        let mut b = StreamRng::new(7, 3);
        let mut c = StreamRng::new(7, 4);
        let xa: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let xb: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        let xc: Vec<u64> = (0..8).map(|_| c.next_u64()).collect();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
        assert_eq!(a.tag().word_pos, 16);
    }

    #[test]
    fn sample_set_does_not_depend_on_threads() {
        let body = |rng: &mut StreamRng, _first: u64, count: u64, acc: &mut Moments| {
            for _ in 0..count {
                acc.push((rng.next_u32() >> 8) as f64);
            }
        };
        let plan = McPlan::new(100_000, 11);
        let serial = plan.run(Moments::default, body).unwrap();
        let parallel = plan
            .with_threads(4)
            .deterministic(true)
            .run(Moments::default, body)
            .unwrap();
        assert_eq!(serial, parallel);
        let loose = plan.with_threads(3).run(Moments::default, body).unwrap();
        assert_eq!(loose.count(), serial.count());
        assert!((loose.mean() - serial.mean()).abs() <= 1e-9 * serial.mean());
    }
}
