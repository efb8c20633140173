//! Data-parallel helpers.
//!
//! With the `parallel` feature (on by default) [`Execution::Parallel`] maps
//! work items over the rayon thread pool. Without it every call runs on the
//! current thread. Both paths produce identical, index-ordered output, so
//! seeded computations do not depend on the execution mode.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Evaluates `f(0..n)` and returns the results in index order.
    pub fn map<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n).into_par_iter().map(f).collect();
        }
        (0..n).map(f).collect()
    }

    /// Fallible variant of [`Execution::map`]; returns the first error by index.
    pub fn try_map<T, E, F>(self, n: usize, f: F) -> Result<Vec<T>, E>
    where
        T: Send,
        E: Send,
        F: Fn(usize) -> Result<T, E> + Sync + Send,
    {
        self.map(n, f).into_iter().collect()
    }

    /// Maximum of `f(0..n)`, ignoring NaN. Returns `f64::NEG_INFINITY` for `n == 0`.
    pub fn max_f64<F>(self, n: usize, f: F) -> f64
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return (0..n)
                .into_par_iter()
                .map(f)
                .reduce(|| f64::NEG_INFINITY, f64::max);
        }
        (0..n).map(f).fold(f64::NEG_INFINITY, f64::max)
    }
}
