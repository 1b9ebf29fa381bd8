//! Objective and optimizer interfaces shared by every benchmark and algorithm.

use std::time::Duration;

use crate::bits::BitString;
use crate::error::Result;
use crate::metrics::MetricSeries;
use crate::rng::RngStream;

/// A binary maximization problem.
pub trait Problem: Send + Sync {
    fn name(&self) -> &str;

    fn n_bits(&self) -> usize;

    /// Objective value of `bits`. Callers guarantee `bits.len() == self.n_bits()`.
    ///
    /// Noisy problems draw their noise from `rng`, so a run stays reproducible
    /// under its seed.
    fn fitness(&self, bits: &BitString, rng: &mut RngStream) -> f64;

    fn known_max(&self) -> Option<f64> {
        None
    }

    fn success_tol(&self) -> f64 {
        0.0
    }

    fn deterministic(&self) -> bool {
        true
    }

    fn is_success(&self, best: f64) -> bool {
        self.known_max().is_some_and(|m| best >= m - self.success_tol())
    }
}

/// Evaluates `bits`, charging one evaluation to `fe_count`.
pub fn evaluate(
    problem: &dyn Problem,
    bits: &BitString,
    fe_count: &mut u64,
    rng: &mut RngStream,
) -> Result<f64> {
    bits.check_len(problem.n_bits())?;
    *fe_count += 1;
    Ok(problem.fitness(bits, rng))
}

/// Outcome of a single seeded run.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub best: BitString,
    pub best_fitness: f64,
    pub fe_used: u64,
    pub generations: usize,
    pub wall_time: Duration,
    pub success: bool,
    pub metrics: MetricSeries,
}

/// A search algorithm that can be dropped into the batch harness.
pub trait Optimizer: Send + Sync {
    fn name(&self) -> &str;

    fn run(&self, problem: &dyn Problem, max_fe: u64, seed: u64) -> Result<RunResult>;
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;

    /// Same value everywhere.
    pub struct Flat {
        pub n: usize,
    }

    impl Problem for Flat {
        fn name(&self) -> &str {
            "flat"
        }
        fn n_bits(&self) -> usize {
            self.n
        }
        fn fitness(&self, _bits: &BitString, _rng: &mut RngStream) -> f64 {
            1.0
        }
    }

    /// Number of ones.
    pub struct OneMax {
        pub n: usize,
    }

    impl Problem for OneMax {
        fn name(&self) -> &str {
            "onemax"
        }
        fn n_bits(&self) -> usize {
            self.n
        }
        fn fitness(&self, bits: &BitString, _rng: &mut RngStream) -> f64 {
            bits.count_ones() as f64
        }
        fn known_max(&self) -> Option<f64> {
            Some(self.n as f64)
        }
    }
}
