//! Path-level parallelism with an ordered, sequential reduction.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// `f(0), …, f(n−1)` on a pool of `threads` workers, returned in index order.
///
/// Each path draws from its own RNG substream, so the result does not depend
/// on the worker count.
pub fn map_paths<T, F>(n: usize, threads: Option<usize>, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Argument(format!("thread pool: {e}")))?;
    pool.install(|| (0..n as u64).into_par_iter().map(&f).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let a = map_paths(100, Some(1), |i| Ok(i * i)).unwrap();
        let b = map_paths(100, Some(4), |i| Ok(i * i)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a[7], 49);
        assert!(map_paths(3, None, |i| if i == 2 { Err(Error::Argument("x".into())) } else { Ok(i) }).is_err());
    }
}
