//! Order-preserving parallel map used by the Monte Carlo sweeps.
//!
//! Work items are identified by index and every item derives its randomness
//! from its own seed, so results do not depend on scheduling. Callers reduce
//! the returned vector sequentially, which keeps floating-point sums
//! bit-identical for any worker count.

use rayon::prelude::*;

/// `(0..n).map(f)` evaluated on `jobs` workers (`0` = all cores, `1` = the
/// calling thread only). The output is in index order.
pub fn map_indexed<T, F>(jobs: usize, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if jobs == 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let run = || (0..n).into_par_iter().map(&f).collect();
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(run),
        Err(_) => (0..n).map(&f).collect(),
    }
}
