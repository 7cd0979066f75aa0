//! Execution-mode switch: data-parallel map over independent work items
//! (branches, golden cases, probes) with a sequential fallback.
//!
//! With the `parallel` feature enabled (the default) both modes are
//! available at runtime; without it everything degrades to sequential and
//! rayon is not linked at all.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    Parallel,
}

impl Default for ExecMode {
    #[cfg(feature = "parallel")]
    fn default() -> Self {
        ExecMode::Parallel
    }
    #[cfg(not(feature = "parallel"))]
    fn default() -> Self {
        ExecMode::Sequential
    }
}

/// Map `f` over `items`, parallel when requested and available.
pub fn map_collect<T, U, F>(mode: ExecMode, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode == ExecMode::Parallel {
        return items.par_iter().map(&f).collect();
    }
    let _ = mode;
    items.iter().map(&f).collect()
}

/// Fallible variant of [`map_collect`]; the first error wins.
pub fn try_map_collect<T, U, E, F>(mode: ExecMode, items: &[T], f: F) -> Result<Vec<U>, E>
where
    T: Sync,
    U: Send,
    E: Send,
    F: Fn(&T) -> Result<U, E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode == ExecMode::Parallel {
        return items.par_iter().map(&f).collect();
    }
    let _ = mode;
    items.iter().map(&f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_modes_agree() {
        let items: Vec<u64> = (0..100).collect();
        let seq = map_collect(ExecMode::Sequential, &items, |x| x * x);
        let par = map_collect(ExecMode::default(), &items, |x| x * x);
        assert_eq!(seq, par);
    }
}
