use std::time::Instant;

use crate::bits::BitString;
use crate::error::Result;
use crate::metrics::MetricSeries;
use crate::problem::{evaluate, Optimizer, Problem, RunResult};
use crate::rng::RngStream;

/// Uniform random sampling; the baseline every search should beat.
#[derive(Debug, Clone, Copy, Default)]
pub struct RandomSearch;

impl Optimizer for RandomSearch {
    fn name(&self) -> &str {
        "random"
    }

    fn run(&self, problem: &dyn Problem, max_fe: u64, seed: u64) -> Result<RunResult> {
        let mut rng = RngStream::new(seed);
        let start = Instant::now();
        let n = problem.n_bits();
        let mut fe = 0;
        let mut best = BitString::random(n, &mut rng);
        let mut best_fitness = evaluate(problem, &best, &mut fe, &mut rng)?;
        while fe < max_fe {
            let x = BitString::random(n, &mut rng);
            let f = evaluate(problem, &x, &mut fe, &mut rng)?;
            if f > best_fitness {
                best = x;
                best_fitness = f;
            }
        }
        Ok(RunResult {
            success: problem.is_success(best_fitness),
            best,
            best_fitness,
            fe_used: fe,
            generations: 0,
            wall_time: start.elapsed(),
            metrics: MetricSeries::default(),
        })
    }
}
