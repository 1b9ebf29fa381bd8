//! Batches of independent seeded runs.
//!
//! A single run is strictly sequential; parallelism happens only across
//! runs, each of which owns its own [`RngStream`](crate::RngStream). Results
//! are always returned in run-index order, so the output of a batch does not
//! depend on the execution mode.

use crate::error::Result;
use crate::problem::{Optimizer, Problem, RunResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential when built without the `parallel` feature.
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this mode actually uses worker threads in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// `(0..count).map(f)` in index order, on the rayon pool when requested.
pub fn map_indexed<T, F>(count: usize, exec: Execution, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Execution::Parallel {
        use rayon::prelude::*;
        return (0..count).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..count).map(f).collect()
}

/// Seed of run `index` within a batch.
pub fn run_seed(base_seed: u64, index: usize) -> u64 {
    base_seed.wrapping_add(index as u64)
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub run: usize,
    pub seed: u64,
    pub result: RunResult,
}

/// Runs `runs` independent seeds of `optimizer` on `problem`.
pub fn run_batch(
    optimizer: &dyn Optimizer,
    problem: &dyn Problem,
    runs: usize,
    base_seed: u64,
    max_fe: u64,
    exec: Execution,
) -> Result<Vec<RunRecord>> {
    map_indexed(runs, exec, |run| {
        let seed = run_seed(base_seed, run);
        optimizer.run(problem, max_fe, seed).map(|result| RunRecord { run, seed, result })
    })
    .into_iter()
    .collect()
}
