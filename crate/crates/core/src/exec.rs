//! Data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature (on by default) [`ExecMode::Parallel`] runs
//! on rayon; without it every mode runs sequentially. Results always come
//! back in input order, so exact verdicts never depend on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    /// Parallel with the given worker count; `None` uses the global pool.
    Parallel(Option<usize>),
    #[default]
    Auto,
}

impl ExecMode {
    /// `jobs = 1` is sequential, `0` means "all cores".
    pub fn from_jobs(jobs: usize) -> Self {
        match jobs {
            1 => ExecMode::Sequential,
            0 => ExecMode::Parallel(None),
            k => ExecMode::Parallel(Some(k)),
        }
    }

    pub fn is_parallel(&self) -> bool {
        cfg!(feature = "parallel") && !matches!(self, ExecMode::Sequential)
    }
}

/// Map `f` over `items`, preserving order.
pub fn map<T, R, F>(items: Vec<T>, mode: ExecMode, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        match mode {
            ExecMode::Sequential => items.into_iter().map(f).collect(),
            ExecMode::Auto | ExecMode::Parallel(None) => items.into_par_iter().map(f).collect(),
            ExecMode::Parallel(Some(k)) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
                Ok(pool) => pool.install(|| items.into_par_iter().map(f).collect()),
                Err(_) => items.into_par_iter().map(f).collect(),
            },
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = mode;
        items.into_iter().map(f).collect()
    }
}

/// Sum of `f(i)` for `i in 0..len` with a caller-supplied associative
/// reduction.
pub fn map_reduce<R, F, G>(len: usize, mode: ExecMode, identity: R, f: F, reduce: G) -> R
where
    R: Send + Sync + Clone,
    F: Fn(usize) -> R + Send + Sync,
    G: Fn(R, R) -> R + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        if mode.is_parallel() {
            return (0..len)
                .into_par_iter()
                .map(&f)
                .reduce(|| identity.clone(), &reduce);
        }
    }
    let _ = mode;
    (0..len).map(f).fold(identity, reduce)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let items: Vec<u64> = (0..1000).collect();
        for mode in [ExecMode::Sequential, ExecMode::Auto, ExecMode::Parallel(Some(3))] {
            let out = map(items.clone(), mode, |v| v * v);
            assert_eq!(out, items.iter().map(|v| v * v).collect::<Vec<_>>());
        }
    }

    #[test]
    fn reduce_matches_sequential() {
        let seq = map_reduce(500, ExecMode::Sequential, 0u64, |i| i as u64, |a, b| a + b);
        let par = map_reduce(500, ExecMode::Auto, 0u64, |i| i as u64, |a, b| a + b);
        assert_eq!(seq, par);
        assert_eq!(seq, 499 * 500 / 2);
    }

    #[test]
    fn jobs_mapping() {
        assert_eq!(ExecMode::from_jobs(1), ExecMode::Sequential);
        assert_eq!(ExecMode::from_jobs(0), ExecMode::Parallel(None));
        assert_eq!(ExecMode::from_jobs(4), ExecMode::Parallel(Some(4)));
    }
}
