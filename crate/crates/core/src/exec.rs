//! Fan-out helpers for independent work items.
//!
//! [`map`] and [`map_indices`] use the rayon pool when the `parallel`
//! feature is enabled (the default) and degrade to plain sequential
//! iteration otherwise. The explicit `_seq`/`_par` variants exist so the
//! bench suite can compare both strategies on identical workloads.

/// Maps `f` over `items`, in parallel when the `parallel` feature is on.
///
/// Results always come back in input order, so output is independent of
/// the execution strategy.
pub fn map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Maps `f` over `0..count`, in parallel when the `parallel` feature is on.
pub fn map_indices<U, F>(count: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..count).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).map(f).collect()
    }
}

/// Sequential reference implementation of [`map`].
pub fn map_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

/// Sequential reference implementation of [`map_indices`].
pub fn map_indices_seq<U, F>(count: usize, f: F) -> Vec<U>
where
    F: Fn(usize) -> U,
{
    (0..count).map(f).collect()
}

/// Rayon-backed map, available only with the `parallel` feature.
#[cfg(feature = "parallel")]
pub fn map_par<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// Rayon-backed index map, available only with the `parallel` feature.
#[cfg(feature = "parallel")]
pub fn map_indices_par<U, F>(count: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order() {
        let items: Vec<usize> = (0..1000).collect();
        let out = map(&items, |&i| 2 * i);
        let expected: Vec<usize> = (0..1000).map(|i| 2 * i).collect();
        assert_eq!(out, expected);
    }

    #[test]
    fn index_map_matches_sequential() {
        let par = map_indices(257, |i| (i as f64).sqrt());
        let seq = map_indices_seq(257, |i| (i as f64).sqrt());
        assert_eq!(par, seq);
    }
}
