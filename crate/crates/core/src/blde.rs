//! Binary learning differential evolution.
//!
//! Every individual `w` gets one trial per generation. The trial starts as
//! the fitter of `y` (drawn from the population) and `z` (drawn from the
//! archive, i.e. the previous population). On every bit where `y` and `z`
//! agree, the trial copies the population best wherever a third draw `x`
//! disagrees with it, and otherwise re-samples the bit with probability `p`.
//! The trial replaces `w` when it is at least as fit.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::metrics::{refinement_metric, renewal_metric, MetricSeries};
use crate::population::PopulationState;
use crate::problem::{Optimizer, Problem, RunResult};
use crate::rng::RngStream;

/// `max(0.05, min(0.15, 10 / n))`.
pub fn default_p(n: usize) -> f64 {
    assert!(n >= 1, "bit length must be positive");
    (10.0 / n as f64).clamp(0.05, 0.15)
}

/// Which population the archive receives at the end of a generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArchiveSnapshot {
    /// The population as it stood before the generation's replacements.
    #[default]
    Pre,
    /// The population after all replacements of the generation.
    Post,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BldeConfig {
    pub mu: usize,
    pub p: f64,
    pub max_fe: u64,
    pub seed: u64,
    pub archive_snapshot: ArchiveSnapshot,
    /// Charge the initial population's evaluations to `max_fe`.
    pub count_init_fe: bool,
    /// Stop as soon as the problem's success condition holds.
    pub early_stop: bool,
}

impl BldeConfig {
    /// Defaults for a problem of `n` bits: `mu = 50`, `p = default_p(n)`,
    /// budget `300 n`.
    pub fn for_bits(n: usize, seed: u64) -> Self {
        BldeConfig {
            mu: 50,
            p: default_p(n),
            max_fe: 300 * n as u64,
            seed,
            archive_snapshot: ArchiveSnapshot::default(),
            count_init_fe: true,
            early_stop: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::InvalidConfig(format!("p must lie in (0, 1), got {}", self.p)));
        }
        if self.mu < 3 {
            return Err(Error::InvalidConfig(format!("mu must be at least 3, got {}", self.mu)));
        }
        if self.count_init_fe && self.max_fe < self.mu as u64 {
            return Err(Error::InvalidConfig(format!(
                "budget {} cannot cover the initial population of {}",
                self.max_fe, self.mu
            )));
        }
        Ok(())
    }

    fn charged(&self, state: &PopulationState) -> u64 {
        if self.count_init_fe {
            state.fe_count
        } else {
            state.fe_count - state.init_fe
        }
    }
}

/// What happened during one generation.
#[derive(Debug, Clone)]
pub struct GenerationTrace {
    /// Trial produced for each individual, in sweep order.
    pub trials: Vec<BitString>,
    pub accepted: Vec<bool>,
    /// Best of the population at the start of the generation.
    pub gbest_before: BitString,
    /// Population at the start of the generation.
    pub population_before: Vec<BitString>,
    /// Best solution evaluated before the generation started.
    pub best_explored: BitString,
}

impl GenerationTrace {
    /// Renewal and refinement values for this generation.
    pub fn metrics(&self) -> Result<(f64, f64)> {
        Ok((
            renewal_metric(&self.population_before, &self.trials)?,
            refinement_metric(&self.population_before, &self.best_explored)?,
        ))
    }
}

/// Builds one trial solution.
///
/// `fy` and `fz` are the recorded fitness values of `y` and `z`; `y` wins ties.
#[allow(clippy::too_many_arguments)]
pub fn make_trial(
    x: &BitString,
    y: &BitString,
    z: &BitString,
    gbest: &BitString,
    fy: f64,
    fz: f64,
    p: f64,
    rng: &mut RngStream,
) -> Result<BitString> {
    let n = y.len();
    x.check_len(n)?;
    z.check_len(n)?;
    gbest.check_len(n)?;

    let mut trial = if fy >= fz { y.clone() } else { z.clone() };
    for j in 0..n {
        if y[j] != z[j] {
            continue;
        }
        if gbest[j] != x[j] {
            trial.set(j, gbest[j]);
        } else if rng.uniform() <= p {
            trial.set(j, rng.bit());
        }
    }
    Ok(trial)
}

/// Runs one generation in place.
///
/// Returns `None`, leaving `state` untouched, when the remaining budget cannot
/// cover a full generation.
pub fn blde_generation(
    state: &mut PopulationState,
    problem: &dyn Problem,
    cfg: &BldeConfig,
    rng: &mut RngStream,
) -> Result<Option<GenerationTrace>> {
    let mu = state.mu();
    if cfg.charged(state) + mu as u64 > cfg.max_fe {
        return Ok(None);
    }

    let gbest = state.population[state.best_index()].clone();
    let population_before = state.population.clone();
    let fitness_before = state.fitness.clone();
    let best_explored = state.best.clone();

    let mut trials = Vec::with_capacity(mu);
    let mut accepted = Vec::with_capacity(mu);
    for i in 0..mu {
        let xi = rng.below(mu);
        let yi = rng.below(mu);
        let zi = rng.below(mu);
        let trial = make_trial(
            &state.population[xi],
            &state.population[yi],
            &state.archive[zi],
            &gbest,
            state.fitness[yi],
            state.archive_fitness[zi],
            cfg.p,
            rng,
        )?;
        let f = state.evaluate(problem, &trial, rng)?;
        let keep = f >= state.fitness[i];
        if keep {
            state.population[i] = trial.clone();
            state.fitness[i] = f;
        }
        trials.push(trial);
        accepted.push(keep);
    }

    match cfg.archive_snapshot {
        ArchiveSnapshot::Pre => {
            state.archive = population_before.clone();
            state.archive_fitness = fitness_before;
        }
        ArchiveSnapshot::Post => {
            state.archive = state.population.clone();
            state.archive_fitness = state.fitness.clone();
        }
    }
    state.generation += 1;

    Ok(Some(GenerationTrace {
        trials,
        accepted,
        gbest_before: gbest,
        population_before,
        best_explored,
    }))
}

/// Full run until the budget is exhausted (or, with `early_stop`, until the
/// problem reports success).
pub fn blde_run(problem: &dyn Problem, cfg: &BldeConfig) -> Result<RunResult> {
    cfg.validate()?;
    let mut rng = RngStream::new(cfg.seed);
    let start = Instant::now();
    let mut state = PopulationState::initialize(problem, cfg.mu, &mut rng)?;
    let mut metrics = MetricSeries::default();

    while !(cfg.early_stop && problem.is_success(state.best_fitness)) {
        let Some(trace) = blde_generation(&mut state, problem, cfg, &mut rng)? else {
            break;
        };
        let (alpha, beta) = trace.metrics()?;
        metrics.push(alpha, beta);
    }

    Ok(RunResult {
        success: problem.is_success(state.best_fitness),
        best: state.best,
        best_fitness: state.best_fitness,
        fe_used: state.fe_count,
        generations: state.generation,
        wall_time: start.elapsed(),
        metrics,
    })
}

/// BLDE behind the [`Optimizer`] interface.
#[derive(Debug, Clone)]
pub struct Blde {
    pub mu: usize,
    /// Mutation probability; `None` applies [`default_p`] to the problem size.
    pub p: Option<f64>,
    pub archive_snapshot: ArchiveSnapshot,
    pub count_init_fe: bool,
    pub early_stop: bool,
}

impl Default for Blde {
    fn default() -> Self {
        Blde {
            mu: 50,
            p: None,
            archive_snapshot: ArchiveSnapshot::default(),
            count_init_fe: true,
            early_stop: false,
        }
    }
}

impl Blde {
    pub fn config(&self, n_bits: usize, max_fe: u64, seed: u64) -> BldeConfig {
        BldeConfig {
            mu: self.mu,
            p: self.p.unwrap_or_else(|| default_p(n_bits)),
            max_fe,
            seed,
            archive_snapshot: self.archive_snapshot,
            count_init_fe: self.count_init_fe,
            early_stop: self.early_stop,
        }
    }
}

impl Optimizer for Blde {
    fn name(&self) -> &str {
        "BLDE"
    }

    fn run(&self, problem: &dyn Problem, max_fe: u64, seed: u64) -> Result<RunResult> {
        blde_run(problem, &self.config(problem.n_bits(), max_fe, seed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmarks::LeadingOnes;
    use crate::problem::testing::{Flat, OneMax};

    fn bs(s: &str) -> BitString {
        BitString::parse(s).unwrap()
    }

    #[test]
    fn default_p_examples() {
        assert_eq!(default_p(30), 0.15);
        assert_eq!(default_p(480), 0.05);
        assert!((default_p(100) - 0.10).abs() < 1e-15);
    }

    #[test]
    fn trial_copies_gbest_when_x_disagrees_everywhere() {
        let y = bs("0110");
        let x = bs("1010");
        let g = x.complement();
        let mut rng = RngStream::new(0);
        for _ in 0..100 {
            let t = make_trial(&x, &y, &y, &g, 1.0, 2.0, 0.9, &mut rng).unwrap();
            assert_eq!(t, g);
        }
    }

    #[test]
    fn trial_is_winner_when_y_and_z_disagree_everywhere() {
        let y = bs("010101");
        let z = y.complement();
        let x = bs("000000");
        let g = bs("111111");
        let mut rng = RngStream::new(1);
        assert_eq!(make_trial(&x, &y, &z, &g, 3.0, 3.0, 0.99, &mut rng).unwrap(), y);
        assert_eq!(make_trial(&x, &y, &z, &g, 2.0, 3.0, 0.99, &mut rng).unwrap(), z);
    }

    #[test]
    fn trial_mutation_rate() {
        // y = z = 0 and x = gbest = 1: only the p-branch can flip the bit,
        // and it lands on 1 half the time
        let (y, x) = (bs("0"), bs("1"));
        let mut rng = RngStream::new(2024);
        let draws = 100_000;
        let ones = (0..draws)
            .filter(|_| make_trial(&x, &y, &y, &x, 0.0, 0.0, 0.15, &mut rng).unwrap()[0])
            .count();
        let freq = ones as f64 / draws as f64;
        assert!((freq - 0.075).abs() <= 0.005, "frequency {freq}");
    }

    #[test]
    fn trial_rejects_mismatched_lengths() {
        let mut rng = RngStream::new(0);
        assert!(make_trial(&bs("01"), &bs("010"), &bs("010"), &bs("010"), 0.0, 0.0, 0.1, &mut rng).is_err());
    }

    #[test]
    fn flat_landscape_accepts_every_trial() {
        let problem = Flat { n: 12 };
        let cfg = BldeConfig { max_fe: 10_000, ..BldeConfig::for_bits(12, 3) };
        let mut rng = RngStream::new(3);
        let mut state = PopulationState::initialize(&problem, cfg.mu, &mut rng).unwrap();
        for _ in 0..5 {
            let trace = blde_generation(&mut state, &problem, &cfg, &mut rng).unwrap().unwrap();
            assert!(trace.accepted.iter().all(|&a| a));
            assert_eq!(trace.trials.len(), cfg.mu);
        }
    }

    #[test]
    fn uniform_population_changes_only_through_mutation() {
        // all individuals identical: x == gbest on every bit, so the only
        // source of change is the p-branch; with a tiny p nothing moves
        let problem = OneMax { n: 16 };
        let cfg = BldeConfig { p: 1e-12, max_fe: 1000, ..BldeConfig::for_bits(16, 0) };
        let mut rng = RngStream::new(4);
        let mut state = PopulationState::initialize(&problem, 10, &mut rng).unwrap();
        let cfg = BldeConfig { mu: 10, ..cfg };
        let w = bs("1010101010101010");
        state.population = vec![w.clone(); 10];
        state.fitness = vec![8.0; 10];
        state.archive = vec![w.clone(); 10];
        state.archive_fitness = vec![8.0; 10];
        let trace = blde_generation(&mut state, &problem, &cfg, &mut rng).unwrap().unwrap();
        assert!(trace.trials.iter().all(|t| *t == w));
    }

    #[test]
    fn archive_receives_population_before_sweep() {
        let problem = OneMax { n: 20 };
        let cfg = BldeConfig { max_fe: 100_000, ..BldeConfig::for_bits(20, 8) };
        let mut rng = RngStream::new(8);
        let mut state = PopulationState::initialize(&problem, cfg.mu, &mut rng).unwrap();
        for _ in 0..10 {
            let before = state.population.clone();
            let trace = blde_generation(&mut state, &problem, &cfg, &mut rng).unwrap().unwrap();
            assert_eq!(state.archive, before);
            assert_eq!(trace.population_before, before);
        }
    }

    #[test]
    fn post_snapshot_archive_matches_final_population() {
        let problem = OneMax { n: 20 };
        let cfg = BldeConfig {
            max_fe: 100_000,
            archive_snapshot: ArchiveSnapshot::Post,
            ..BldeConfig::for_bits(20, 8)
        };
        let mut rng = RngStream::new(8);
        let mut state = PopulationState::initialize(&problem, cfg.mu, &mut rng).unwrap();
        blde_generation(&mut state, &problem, &cfg, &mut rng).unwrap().unwrap();
        assert_eq!(state.archive, state.population);
        assert_eq!(state.archive_fitness, state.fitness);
    }

    #[test]
    fn trial_guard_positions_untouched() {
        // where y and z differ, the trial equals the (y, z) winner
        let mut rng = RngStream::new(77);
        for _ in 0..500 {
            let x = BitString::random(24, &mut rng);
            let y = BitString::random(24, &mut rng);
            let z = BitString::random(24, &mut rng);
            let g = BitString::random(24, &mut rng);
            let (fy, fz) = (rng.uniform(), rng.uniform());
            let winner = if fy >= fz { &y } else { &z };
            let t = make_trial(&x, &y, &z, &g, fy, fz, 0.5, &mut rng).unwrap();
            for j in 0..24 {
                if y[j] != z[j] {
                    assert_eq!(t[j], winner[j]);
                }
            }
        }
    }

    #[test]
    fn exhausted_budget_leaves_state_unchanged() {
        let problem = OneMax { n: 10 };
        let cfg = BldeConfig { mu: 5, max_fe: 9, ..BldeConfig::for_bits(10, 1) };
        let mut rng = RngStream::new(1);
        let mut state = PopulationState::initialize(&problem, 5, &mut rng).unwrap();
        let before = state.clone();
        assert!(blde_generation(&mut state, &problem, &cfg, &mut rng).unwrap().is_none());
        assert_eq!(state.population, before.population);
        assert_eq!(state.fe_count, before.fe_count);
        assert_eq!(state.generation, 0);
    }

    #[test]
    fn fe_count_is_mu_times_generations_plus_one() {
        let problem = OneMax { n: 30 };
        for (mu, max_fe) in [(50, 9000), (7, 100), (3, 3)] {
            let cfg = BldeConfig { mu, max_fe, ..BldeConfig::for_bits(30, 5) };
            let r = blde_run(&problem, &cfg).unwrap();
            assert_eq!(r.fe_used, (mu * (r.generations + 1)) as u64);
            assert!(r.fe_used <= max_fe);
            assert!(r.fe_used + mu as u64 > max_fe);
            assert_eq!(r.metrics.len(), r.generations);
        }
    }

    #[test]
    fn init_only_budget_returns_best_initial() {
        let problem = OneMax { n: 30 };
        let cfg = BldeConfig { max_fe: 50, ..BldeConfig::for_bits(30, 21) };
        let r = blde_run(&problem, &cfg).unwrap();
        let mut rng = RngStream::new(21);
        let init = PopulationState::initialize(&problem, 50, &mut rng).unwrap();
        assert_eq!(r.generations, 0);
        assert_eq!(r.best_fitness, init.best_fitness);
        assert_eq!(r.best, init.best);
    }

    #[test]
    fn uncounted_init_extends_budget() {
        let problem = OneMax { n: 30 };
        let cfg = BldeConfig { count_init_fe: false, max_fe: 500, ..BldeConfig::for_bits(30, 2) };
        let r = blde_run(&problem, &cfg).unwrap();
        assert_eq!(r.generations, 10);
        assert_eq!(r.fe_used, 550);
    }

    #[test]
    fn elitist_population_max_never_drops() {
        let problem = LeadingOnes::new(40);
        let cfg = BldeConfig { max_fe: 100_000, ..BldeConfig::for_bits(40, 12) };
        let mut rng = RngStream::new(12);
        let mut state = PopulationState::initialize(&problem, cfg.mu, &mut rng).unwrap();
        let mut prev = state.fitness[state.best_index()];
        for _ in 0..100 {
            blde_generation(&mut state, &problem, &cfg, &mut rng).unwrap().unwrap();
            let now = state.fitness[state.best_index()];
            assert!(now >= prev);
            prev = now;
        }
    }

    #[test]
    fn same_seed_same_run() {
        let problem = LeadingOnes::new(30);
        let cfg = BldeConfig::for_bits(30, 99);
        let a = blde_run(&problem, &cfg).unwrap();
        let b = blde_run(&problem, &cfg).unwrap();
        assert_eq!(a.best, b.best);
        assert_eq!(a.best_fitness, b.best_fitness);
        assert_eq!(a.metrics, b.metrics);
        assert_eq!(a.fe_used, b.fe_used);
    }

    #[test]
    fn early_stop_halts_at_success() {
        let problem = LeadingOnes::new(30);
        let cfg = BldeConfig { early_stop: true, ..BldeConfig::for_bits(30, 4) };
        let r = blde_run(&problem, &cfg).unwrap();
        assert!(r.success);
        assert!(r.fe_used < 9000);
    }

    #[test]
    fn p1_seeded_run_reaches_thirty() {
        let r = blde_run(&LeadingOnes::new(30), &BldeConfig::for_bits(30, 1)).unwrap();
        assert_eq!(r.best_fitness, 30.0);
        assert!(r.fe_used <= 9000);
    }

    #[test]
    fn invalid_configs_rejected() {
        let base = BldeConfig::for_bits(10, 0);
        for bad in [
            BldeConfig { p: 0.0, ..base.clone() },
            BldeConfig { p: 1.0, ..base.clone() },
            BldeConfig { mu: 2, ..base.clone() },
            BldeConfig { max_fe: 10, ..base.clone() },
        ] {
            assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        }
    }
}
