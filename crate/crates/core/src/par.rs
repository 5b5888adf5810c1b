//! Data-parallel map with a sequential fallback.
//!
//! The engine has three embarrassingly parallel inner loops: box-vertex
//! recourse evaluations inside the robust subproblem, per-distribution-system
//! solves inside one coordination iteration, and batch LP solves. All of them
//! funnel through [`map_indexed`] so the `parallel` feature flag switches the
//! whole crate between rayon and plain iteration. Results are always returned
//! in input order, so the reduction downstream is deterministic either way.

/// Sequential map, always available. Kept public so benchmarks can compare
/// both paths in one binary.
pub fn map_indexed_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(usize, &T) -> U + Sync,
{
    items.iter().enumerate().map(|(i, t)| f(i, t)).collect()
}

/// Parallel map over `items`, preserving input order.
#[cfg(feature = "parallel")]
pub fn map_indexed_par<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(usize, &T) -> U + Sync,
{
    use rayon::prelude::*;
    items
        .par_iter()
        .enumerate()
        .map(|(i, t)| f(i, t))
        .collect()
}

/// Map used by the engine: rayon when the `parallel` feature is on,
/// sequential otherwise.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(usize, &T) -> U + Sync,
{
    map_indexed_par(items, f)
}

/// Map used by the engine: rayon when the `parallel` feature is on,
/// sequential otherwise.
#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(usize, &T) -> U + Sync,
{
    map_indexed_seq(items, f)
}
