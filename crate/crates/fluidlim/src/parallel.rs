//! Replicate fan-out: rayon data-parallel when the `parallel` feature is
//! enabled, plain sequential iteration otherwise.
//!
//! Both paths produce results in replicate order, so downstream aggregation
//! is byte-identical regardless of thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over replicate indices `0..count`, sequentially.
pub fn map_replicates_seq<T, F>(count: u64, f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    (0..count).map(f).collect()
}

/// Map `f` over replicate indices `0..count` on the rayon pool.
#[cfg(feature = "parallel")]
pub fn map_replicates<T, F>(count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_replicates<T, F>(count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    map_replicates_seq(count, f)
}
