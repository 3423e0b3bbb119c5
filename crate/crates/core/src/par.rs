//! Data-parallel helpers with a sequential fallback.
//!
//! Work is always split into fixed-size chunks and partial results are
//! combined in chunk order, so the output of every helper is independent of
//! how many worker threads run it. Without the `parallel` feature
//! [`Execution::Parallel`] degrades to [`Execution::Serial`].

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Number of rows handled by one task in row-parallel kernels.
pub const ROW_CHUNK: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Serial,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Serial
        }
    }
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// `(0..len).map(f)` collected in index order.
    pub fn map<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }

    /// Applies `f` to consecutive ranges of at most `chunk` indices covering
    /// `0..len`, returning the per-chunk results in order.
    pub fn map_chunks<T, F>(self, len: usize, chunk: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(Range<usize>) -> T + Sync + Send,
    {
        let chunk = chunk.max(1);
        let count = len.div_ceil(chunk);
        self.map(count, |c| {
            let start = c * chunk;
            f(start..(start + chunk).min(len))
        })
    }

    /// Calls `f(first_index, block)` for consecutive blocks of `block_len`
    /// elements of `data`.
    pub fn for_each_block_mut<T, F>(self, data: &mut [T], block_len: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        let block_len = block_len.max(1);
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            data.par_chunks_mut(block_len)
                .enumerate()
                .for_each(|(b, block)| f(b * block_len, block));
            return;
        }
        data.chunks_mut(block_len)
            .enumerate()
            .for_each(|(b, block)| f(b * block_len, block));
    }

    /// Chunked vector reduction: each chunk of `0..len` produces a partial
    /// vector of length `dim`; partials are summed in chunk order.
    pub fn sum_vectors<F>(self, len: usize, chunk: usize, dim: usize, f: F) -> Vec<f64>
    where
        F: Fn(Range<usize>, &mut [f64]) + Sync + Send,
    {
        let partials = self.map_chunks(len, chunk, |range| {
            let mut acc = vec![0.0; dim];
            f(range, &mut acc);
            acc
        });
        let mut total = vec![0.0; dim];
        for part in &partials {
            for (t, v) in total.iter_mut().zip(part) {
                *t += v;
            }
        }
        total
    }
}

/// Runs `f` on a dedicated pool with `threads` workers (0 = rayon default).
/// Without the `parallel` feature this just calls `f`.
pub fn with_threads<T, F>(threads: usize, f: F) -> T
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}
