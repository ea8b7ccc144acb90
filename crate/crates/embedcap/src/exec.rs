//! Data-parallel map helpers. With the `parallel` feature (default) these run
//! on the current rayon pool; without it they fall back to plain iteration.
//! Results are always collected in input order, and all reductions downstream
//! happen sequentially, so output is identical for any worker count.

#[cfg(feature = "parallel")]
pub(crate) fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub(crate) fn par_map_range<U, F>(count: u64, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(u64) -> U + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map_range<U, F>(count: u64, f: F) -> Vec<U>
where
    F: Fn(u64) -> U,
{
    (0..count).map(f).collect()
}
