/// How data-parallel loops (sweep rows, assembly rows, element kernels) are run.
///
/// `Parallel` uses the rayon global pool when the `parallel` feature is enabled
/// and silently degrades to `Sequential` otherwise. Both produce bit-identical
/// results: work items are computed independently and gathered in index order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Evaluate `f(0..n)` and collect the results in index order.
pub(crate) fn map_range<R, F>(n: usize, exec: Execution, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}
