//! Deterministic, sample-indexed Monte Carlo driver.
//!
//! Samples are grouped into fixed blocks of [`BLOCK_SIZE`] consecutive
//! indices. Each block is accumulated sequentially into its own tally and the
//! block tallies are merged in index order, so the floating-point result is
//! the same for every worker count.

use crate::numerics::stats::StreamingStats;
use crate::sampling::{RandomStream, Seed};

pub const BLOCK_SIZE: u64 = 1 << 13;

/// A partial result that can absorb another partial result.
pub trait Tally: Default + Send {
    fn merge(&mut self, other: Self);
}

impl Tally for StreamingStats {
    fn merge(&mut self, other: Self) {
        StreamingStats::merge(self, &other);
    }
}

impl Tally for u64 {
    fn merge(&mut self, other: Self) {
        *self += other;
    }
}

impl<T: Tally> Tally for Vec<T> {
    fn merge(&mut self, other: Self) {
        if self.is_empty() {
            *self = other;
            return;
        }
        assert_eq!(self.len(), other.len(), "tally vectors must have equal length");
        for (a, b) in self.iter_mut().zip(other) {
            a.merge(b);
        }
    }
}

impl<A: Tally, B: Tally> Tally for (A, B) {
    fn merge(&mut self, other: Self) {
        self.0.merge(other.0);
        self.1.merge(other.1);
    }
}

impl<A: Tally, B: Tally, C: Tally> Tally for (A, B, C) {
    fn merge(&mut self, other: Self) {
        self.0.merge(other.0);
        self.1.merge(other.1);
        self.2.merge(other.2);
    }
}

/// Seed, sample count, and worker count for one Monte Carlo run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Experiment {
    pub seed: Seed,
    pub samples: u64,
    /// Worker threads; 0 means one per available core. Never affects results.
    pub workers: usize,
}

impl Experiment {
    pub fn new(seed: Seed, samples: u64) -> Self {
        Experiment {
            seed,
            samples,
            workers: 1,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    /// Runs `observe(index, stream, tally)` once per sample index.
    pub fn run<T, F>(&self, observe: F) -> T
    where
        T: Tally,
        F: Fn(u64, &mut RandomStream, &mut T) + Sync,
    {
        let key = self.seed.key();
        let samples = self.samples;
        let blocks = samples.div_ceil(BLOCK_SIZE);
        let run_block = |block: u64| {
            let mut tally = T::default();
            let end = ((block + 1) * BLOCK_SIZE).min(samples);
            for index in block * BLOCK_SIZE..end {
                let mut stream = RandomStream::from_key(key, index);
                observe(index, &mut stream, &mut tally);
            }
            tally
        };
        let partials = self.map_blocks(blocks, run_block);
        partials.into_iter().fold(T::default(), |mut acc, t| {
            acc.merge(t);
            acc
        })
    }

    #[cfg(feature = "parallel")]
    fn map_blocks<T, G>(&self, blocks: u64, run_block: G) -> Vec<T>
    where
        T: Send,
        G: Fn(u64) -> T + Sync,
    {
        use rayon::prelude::*;
        let workers = if self.workers == 0 {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            self.workers
        };
        if workers <= 1 || blocks <= 1 {
            return (0..blocks).map(run_block).collect();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            Ok(pool) => pool.install(|| (0..blocks).into_par_iter().map(&run_block).collect()),
            Err(_) => (0..blocks).map(run_block).collect(),
        }
    }

    #[cfg(not(feature = "parallel"))]
    fn map_blocks<T, G>(&self, blocks: u64, run_block: G) -> Vec<T>
    where
        G: Fn(u64) -> T,
    {
        (0..blocks).map(run_block).collect()
    }
}

/// Mean of an indicator, as a moment accumulator over 0/1 values.
pub fn indicator(stats: &mut StreamingStats, hit: bool) {
    stats.push(if hit { 1.0 } else { 0.0 });
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_mean(workers: usize, samples: u64) -> StreamingStats {
        Experiment::new(Seed(3), samples)
            .with_workers(workers)
            .run(|_, s, t: &mut StreamingStats| t.push(s.uniform()))
    }

    #[test]
    fn worker_count_does_not_change_bits() {
        let a = uniform_mean(1, 3 * BLOCK_SIZE + 17);
        let b = uniform_mean(8, 3 * BLOCK_SIZE + 17);
        let c = uniform_mean(0, 3 * BLOCK_SIZE + 17);
        assert_eq!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn every_index_visited_once() {
        let seen: u64 = Experiment::new(Seed(1), 20_000).run(|i, _, t: &mut u64| *t += i);
        assert_eq!(seen, 20_000 * 19_999 / 2);
    }

    #[test]
    fn uniform_moments() {
        let stats = uniform_mean(2, 1_000_000);
        let e = stats.finalize(Seed(3)).unwrap();
        assert!(e.within_sigmas(0.5, 4.0), "z = {}", e.z_score(0.5));
        let v = stats.variance_estimate(Seed(3)).unwrap();
        assert!(v.within_sigmas(1.0 / 12.0, 4.0), "z = {}", v.z_score(1.0 / 12.0));
    }

    #[test]
    fn zero_samples_is_empty_tally() {
        let t: StreamingStats = Experiment::new(Seed(1), 0).run(|_, s, t: &mut StreamingStats| t.push(s.uniform()));
        assert_eq!(t.count(), 0);
    }
}
