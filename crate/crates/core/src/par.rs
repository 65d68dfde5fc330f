//! Order-preserving data-parallel helpers.
//!
//! With the `parallel` feature (default) the maps below run on rayon's
//! current pool; without it they are plain sequential iterators. Results are
//! always returned in input order, so anything built on top is independent
//! of the worker count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, returning results in input order.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Maps `f` over `0..len`, returning results in index order.
pub fn map_range<R, F>(len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}

/// Runs `f` with at most `workers` threads available to the maps above.
///
/// `workers == 0` means "use the global default". Without the `parallel`
/// feature this simply calls `f`.
pub fn with_workers<R, F>(workers: usize, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        if workers == 0 {
            return f();
        }
        match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        f()
    }
}

/// Number of worker threads the maps would use right now.
pub fn current_workers() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_preserves_order_for_any_worker_count() {
        let items: Vec<u64> = (0..1000).collect();
        let one = with_workers(1, || map(&items, |x| x * x));
        let many = with_workers(8, || map(&items, |x| x * x));
        assert_eq!(one, many);
        assert_eq!(one[999], 999 * 999);
    }

    #[test]
    fn map_range_matches_sequential() {
        let got = with_workers(4, || map_range(17, |i| i + 1));
        assert_eq!(got, (1..=17).collect::<Vec<_>>());
    }
}
