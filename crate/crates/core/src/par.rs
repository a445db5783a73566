//! Data-parallel helpers. With the `parallel` feature off, or with
//! [`Exec::Sequential`], everything runs on the calling thread.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// Maps `f` over `items` keeping input order.
    pub fn map<T, U, F>(self, items: &[T], f: F) -> Vec<U>
    where
        T: Sync,
        U: Send,
        F: Fn(&T) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Maps `f` over `lo..hi` keeping order.
    pub fn map_range<U, F>(self, lo: i64, hi: i64, f: F) -> Vec<U>
    where
        U: Send,
        F: Fn(i64) -> U + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return (lo..hi).into_par_iter().map(f).collect();
        }
        (lo..hi).map(f).collect()
    }

    /// Sum of `f(i)` over `lo..hi`.
    pub fn sum_range<F>(self, lo: u64, hi: u64, f: F) -> i64
    where
        F: Fn(u64) -> i64 + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel {
            use rayon::prelude::*;
            return (lo..hi).into_par_iter().map(f).sum();
        }
        (lo..hi).map(f).sum()
    }
}

/// Runs `f` with at most `jobs` worker threads.
pub fn with_jobs<R: Send>(jobs: usize, f: impl FnOnce() -> R + Send) -> R {
    #[cfg(feature = "parallel")]
    if jobs > 0 {
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            return pool.install(f);
        }
    }
    let _ = jobs;
    f()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let v: Vec<i64> = (0..100).collect();
        let a = Exec::Parallel.map(&v, |x| x * x);
        let b = Exec::Sequential.map(&v, |x| x * x);
        assert_eq!(a, b);
        assert_eq!(Exec::Parallel.sum_range(0, 1000, |i| i as i64), 499500);
        assert_eq!(Exec::Sequential.sum_range(0, 1000, |i| i as i64), 499500);
        assert_eq!(with_jobs(2, || Exec::Parallel.map_range(-3, 3, |i| i)), vec![-3, -2, -1, 0, 1, 2]);
    }
}
