//! Reproducible parallel random streams.
//!
//! Work is cut into fixed-size blocks; block `b` draws from ChaCha8 stream `b`
//! under the master seed. Block results are merged in block order, so the
//! outcome depends on the seed alone and not on how many threads ran it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::{Error, Result};

/// Samples per block in [`par_blocks`].
pub const BLOCK_SIZE: u64 = 1 << 14;

pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Run `work(rng, count)` over `total` samples split into blocks on `workers`
/// threads and fold the per-block results in block order.
pub fn par_blocks<T, W, M>(total: u64, seed: u64, workers: usize, work: W, init: T, merge: M) -> Result<T>
where
    T: Send,
    W: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
    M: Fn(T, T) -> T,
{
    let blocks = total.div_ceil(BLOCK_SIZE);
    let run = || {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let count = BLOCK_SIZE.min(total - b * BLOCK_SIZE);
                work(&mut stream_rng(seed, b), count)
            })
            .collect::<Vec<T>>()
    };
    let parts = if workers == 0 {
        run()
    } else {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Unsupported(format!("cannot start worker pool: {e}")))?
            .install(run)
    };
    Ok(parts.into_iter().fold(init, merge))
}

/// Worker count to use when none is given: all available cores.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn sum_uniform(workers: usize) -> f64 {
        par_blocks(
            100_000,
            7,
            workers,
            |rng, n| (0..n).map(|_| rng.random::<f64>()).sum::<f64>(),
            0.0,
            |a, b| a + b,
        )
        .unwrap()
    }

    #[test]
    fn independent_of_worker_count() {
        let one = sum_uniform(1);
        assert_eq!(one.to_bits(), sum_uniform(3).to_bits());
        assert_eq!(one.to_bits(), sum_uniform(8).to_bits());
    }

    #[test]
    fn streams_differ() {
        let a: u64 = stream_rng(1, 0).random();
        let b: u64 = stream_rng(1, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, stream_rng(1, 0).random::<u64>());
    }
}
