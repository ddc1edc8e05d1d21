//! Thread-pool executor for the core fan-out points.

use onshell_core::multiscatter::Executor;
use rayon::prelude::*;

/// Runs work items on the current rayon pool; results keep index order.
#[derive(Debug, Clone, Copy, Default)]
pub struct RayonExecutor;

impl Executor for RayonExecutor {
    fn map<T, F>(&self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..n).into_par_iter().map(f).collect()
    }
}
