//! Replicate fan-out. With the `parallel` feature replicates run on the rayon
//! pool; results are always returned in replicate order.

use alloc::vec::Vec;

#[cfg(feature = "parallel")]
pub(crate) fn map_replicates<T, F>(count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_replicates<T, F>(count: u64, f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    (0..count).map(f).collect()
}
