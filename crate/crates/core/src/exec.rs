//! Data-parallel execution of independent Monte-Carlo trials.
//!
//! Results are collected in trial order, so parallel and sequential
//! execution produce identical output. `map_indexed` follows the `parallel`
//! feature; `map_indexed_seq` is always sequential and exists for the
//! benchmark suite comparing both paths.

/// Applies `f` to every index in `0..n`, in parallel when the `parallel`
/// feature is enabled.
#[cfg(feature = "parallel")]
pub fn map_indexed<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    map_indexed_seq(n, f)
}

/// Sequential reference path.
pub fn map_indexed_seq<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    (0..n).map(f).collect()
}
