//! Config-driven experiment batches and their CSV artifacts.
//!
//! An experiment writes, under its output directory:
//!
//! - `runs.csv`: one row per run, deterministic for a fixed config;
//! - `timings.csv`: wall time of every run;
//! - `summary.csv`: AveFit, StdDev, SR and mean runtime per problem;
//! - `metrics/<algorithm>_<problem>_run<k>.csv`: renewal/refinement curves.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::batch::{run_batch, Execution, RunRecord};
use crate::benchmarks::problem_by_name;
use crate::blde::{ArchiveSnapshot, Blde};
use crate::error::{Error, Result};
use crate::metrics::MetricSeries;
use crate::mkp::{MkpInstance, MkpProblem};
use crate::problem::{Optimizer, Problem};
use crate::random_search::RandomSearch;
use crate::stats::{summarize, wilcoxon_ranksum, RunBatch, Summary, Verdict};

/// Environment variable that replaces the configured output directory.
pub const OUTPUT_DIR_ENV: &str = "BLDE_OUTPUT_DIR";

pub const METRIC_HEADER: [&str; 3] = ["generation", "alpha", "beta"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[default]
    Blde,
    Random,
}

impl Algorithm {
    pub fn label(self) -> &'static str {
        match self {
            Algorithm::Blde => "BLDE",
            Algorithm::Random => "random",
        }
    }
}

/// One entry of the problem list. Unset fields inherit the experiment's.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemSpec {
    /// Benchmark name (`P1`..`P7`); defaults to the instance file stem.
    pub name: Option<String>,
    /// MKP instance file in OR-Library layout.
    pub instance: Option<PathBuf>,
    pub runs: Option<usize>,
    pub mu: Option<usize>,
    pub p: Option<f64>,
    pub budget_multiplier: Option<u64>,
    /// Absolute evaluation budget, overriding the multiplier.
    pub budget: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub algorithm: Algorithm,
    pub runs: usize,
    pub base_seed: u64,
    pub mu: usize,
    /// Mutation probability; the size-dependent default when unset.
    pub p: Option<f64>,
    /// Budget is this times the bit length (times `m` for MKP instances).
    pub budget_multiplier: u64,
    pub archive_snapshot: ArchiveSnapshot,
    pub count_init_fe: bool,
    /// Runs per problem whose metric curves are written.
    pub metric_runs: usize,
    pub sequential: bool,
    pub output_dir: PathBuf,
    pub problems: Vec<ProblemSpec>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            algorithm: Algorithm::Blde,
            runs: 50,
            base_seed: 1,
            mu: 50,
            p: None,
            budget_multiplier: 300,
            archive_snapshot: ArchiveSnapshot::default(),
            count_init_fe: true,
            metric_runs: 1,
            sequential: false,
            output_dir: PathBuf::from("results"),
            problems: Vec::new(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file; relative instance paths resolve against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg = Self::from_toml(&text)?;
        if let Some(dir) = path.parent() {
            for spec in &mut cfg.problems {
                if let Some(inst) = spec.instance.as_mut() {
                    if inst.is_relative() {
                        *inst = dir.join(&*inst);
                    }
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.runs == 0 {
            return bad("runs must be at least 1".into());
        }
        if self.budget_multiplier == 0 {
            return bad("budget_multiplier must be positive".into());
        }
        if self.problems.is_empty() {
            return bad("no problems listed".into());
        }
        for (i, spec) in self.problems.iter().enumerate() {
            if spec.name.is_none() && spec.instance.is_none() {
                return bad(format!("problem {}: needs a name or an instance", i + 1));
            }
            if spec.runs == Some(0) {
                return bad(format!("problem {}: runs must be at least 1", i + 1));
            }
            if spec.budget_multiplier == Some(0) || spec.budget == Some(0) {
                return bad(format!("problem {}: budget must be positive", i + 1));
            }
        }
        Ok(())
    }

    /// The configured directory unless [`OUTPUT_DIR_ENV`] is set.
    /// [`run_experiment`] itself always writes to `output_dir`.
    pub fn resolved_output_dir(&self) -> PathBuf {
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if !dir.is_empty() => PathBuf::from(dir),
            _ => self.output_dir.clone(),
        }
    }

    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

/// A problem ready to run, with its budget.
pub struct PreparedProblem {
    pub label: String,
    pub problem: Box<dyn Problem>,
    pub max_fe: u64,
    pub runs: usize,
    pub optimizer: Box<dyn Optimizer>,
}

pub fn prepare(cfg: &ExperimentConfig, spec: &ProblemSpec) -> Result<PreparedProblem> {
    let multiplier = spec.budget_multiplier.unwrap_or(cfg.budget_multiplier);
    let (problem, scale): (Box<dyn Problem>, u64) = match &spec.instance {
        Some(path) => {
            let mut inst = MkpInstance::load(path)?;
            if let Some(name) = &spec.name {
                inst.name = name.clone();
            }
            let scale = (inst.n() * inst.m()) as u64;
            (Box::new(MkpProblem::new(inst)), scale)
        }
        None => {
            let problem = problem_by_name(spec.name.as_deref().unwrap_or_default())?;
            let scale = problem.n_bits() as u64;
            (problem, scale)
        }
    };
    let optimizer: Box<dyn Optimizer> = match cfg.algorithm {
        Algorithm::Blde => Box::new(Blde {
            mu: spec.mu.unwrap_or(cfg.mu),
            p: spec.p.or(cfg.p),
            archive_snapshot: cfg.archive_snapshot,
            count_init_fe: cfg.count_init_fe,
            early_stop: false,
        }),
        Algorithm::Random => Box::new(RandomSearch),
    };
    Ok(PreparedProblem {
        label: problem.name().to_string(),
        max_fe: spec.budget.unwrap_or(multiplier * scale),
        runs: spec.runs.unwrap_or(cfg.runs),
        problem,
        optimizer,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub algorithm: String,
    pub problem: String,
    pub run: usize,
    pub seed: u64,
    pub best_fitness: f64,
    pub fes: u64,
    pub generations: usize,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub algorithm: String,
    pub problem: String,
    pub run: usize,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: String,
    pub problem: String,
    pub runs: usize,
    pub ave_fit: f64,
    pub std_dev: f64,
    pub sr: f64,
    pub runtime_s: f64,
}

impl SummaryRow {
    pub fn summary(&self) -> Summary {
        Summary { ave_fit: self.ave_fit, std_dev: self.std_dev, sr_percent: self.sr, mean_runtime: self.runtime_s }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub output_dir: PathBuf,
    pub summaries: Vec<SummaryRow>,
    pub metric_files: Vec<PathBuf>,
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    if !path.exists() {
        return Err(Error::io(path, std::io::Error::from(std::io::ErrorKind::NotFound)));
    }
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// Writes `series` as `generation,alpha,beta` rows, generations counted from 1.
pub fn emit_metric_curves(series: &MetricSeries, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if series.is_empty() {
        return Err(Error::EmptySample);
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(METRIC_HEADER)?;
    for (g, (a, b)) in series.alpha.iter().zip(&series.beta).enumerate() {
        w.write_record([(g + 1).to_string(), a.to_string(), b.to_string()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Turns batch records into per-run and timing rows.
pub fn record_rows(algorithm: &str, problem: &str, records: &[RunRecord]) -> (Vec<RunRow>, Vec<TimingRow>) {
    records
        .iter()
        .map(|r| {
            (
                RunRow {
                    algorithm: algorithm.to_string(),
                    problem: problem.to_string(),
                    run: r.run,
                    seed: r.seed,
                    best_fitness: r.result.best_fitness,
                    fes: r.result.fe_used,
                    generations: r.result.generations,
                    success: r.result.success,
                },
                TimingRow {
                    algorithm: algorithm.to_string(),
                    problem: problem.to_string(),
                    run: r.run,
                    wall_time_s: r.result.wall_time.as_secs_f64(),
                },
            )
        })
        .unzip()
}

/// Summary of per-run rows, joined with their timings by run index.
pub fn summarize_rows(runs: &[RunRow], timings: &[TimingRow]) -> Result<Summary> {
    let mut batch = RunBatch::default();
    for row in runs {
        let wall = timings
            .iter()
            .find(|t| t.algorithm == row.algorithm && t.problem == row.problem && t.run == row.run)
            .map_or(0.0, |t| t.wall_time_s);
        batch.push(row.best_fitness, Duration::from_secs_f64(wall), row.success);
    }
    summarize(&batch)
}

/// Runs every problem of `cfg` and writes the CSV artifacts.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let prepared: Vec<PreparedProblem> = cfg.problems.iter().map(|spec| prepare(cfg, spec)).collect::<Result<_>>()?;

    let out = cfg.output_dir.clone();
    let metrics_dir = out.join("metrics");
    fs::create_dir_all(&metrics_dir).map_err(|e| Error::io(&metrics_dir, e))?;

    let (mut all_runs, mut all_timings, mut summaries, mut metric_files) = (vec![], vec![], vec![], vec![]);
    for prep in &prepared {
        let algorithm = prep.optimizer.name();
        let records = run_batch(
            prep.optimizer.as_ref(),
            prep.problem.as_ref(),
            prep.runs,
            cfg.base_seed,
            prep.max_fe,
            cfg.execution(),
        )?;
        for rec in records.iter().take(cfg.metric_runs) {
            if rec.result.metrics.is_empty() {
                continue;
            }
            let path = metrics_dir.join(format!("{algorithm}_{}_run{}.csv", prep.label, rec.run));
            emit_metric_curves(&rec.result.metrics, &path)?;
            metric_files.push(path);
        }
        let (runs, timings) = record_rows(algorithm, &prep.label, &records);
        let s = summarize_rows(&runs, &timings)?;
        summaries.push(SummaryRow {
            algorithm: algorithm.to_string(),
            problem: prep.label.clone(),
            runs: runs.len(),
            ave_fit: s.ave_fit,
            std_dev: s.std_dev,
            sr: s.sr_percent,
            runtime_s: s.mean_runtime,
        });
        all_runs.extend(runs);
        all_timings.extend(timings);
    }

    write_rows(&out.join("runs.csv"), &all_runs)?;
    write_rows(&out.join("timings.csv"), &all_timings)?;
    write_rows(&out.join("summary.csv"), &summaries)?;
    Ok(ExperimentReport { output_dir: out, summaries, metric_files })
}

pub fn read_runs(path: impl AsRef<Path>) -> Result<Vec<RunRow>> {
    read_rows(path.as_ref())
}

pub fn read_timings(path: impl AsRef<Path>) -> Result<Vec<TimingRow>> {
    read_rows(path.as_ref())
}

pub fn read_summary(path: impl AsRef<Path>) -> Result<Vec<SummaryRow>> {
    read_rows(path.as_ref())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub problem: String,
    pub reference: String,
    pub candidate: String,
    pub u: f64,
    pub p_value: f64,
    /// `+` when the candidate is significantly better than the reference.
    pub verdict: Verdict,
}

fn group_by_problem(rows: &[RunRow]) -> Vec<(String, String, Vec<f64>)> {
    let mut groups: Vec<(String, String, Vec<f64>)> = Vec::new();
    for row in rows {
        match groups.iter_mut().find(|(p, _, _)| *p == row.problem) {
            Some((_, _, v)) => v.push(row.best_fitness),
            None => groups.push((row.problem.clone(), row.algorithm.clone(), vec![row.best_fitness])),
        }
    }
    groups
}

/// Rank-sum verdicts of `candidate` against `reference` for every problem
/// present in both run tables, in reference order.
pub fn compare_runs(reference: &[RunRow], candidate: &[RunRow], alpha: f64) -> Result<Vec<ComparisonRow>> {
    let cand = group_by_problem(candidate);
    let mut rows = Vec::new();
    for (problem, ref_alg, a) in group_by_problem(reference) {
        let Some((_, cand_alg, b)) = cand.iter().find(|(p, _, _)| *p == problem) else {
            continue;
        };
        let test = wilcoxon_ranksum(b, &a, alpha)?;
        rows.push(ComparisonRow {
            problem,
            reference: ref_alg,
            candidate: cand_alg.clone(),
            u: test.u,
            p_value: test.p_value,
            verdict: test.verdict,
        });
    }
    if rows.is_empty() {
        return Err(Error::InvalidConfig("the run tables share no problem".into()));
    }
    Ok(rows)
}

pub fn compare_files(reference: impl AsRef<Path>, candidate: impl AsRef<Path>, alpha: f64) -> Result<Vec<ComparisonRow>> {
    compare_runs(&read_runs(reference)?, &read_runs(candidate)?, alpha)
}

pub fn write_comparison(rows: &[ComparisonRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["problem", "reference", "candidate", "u", "p_value", "verdict"])?;
    for r in rows {
        w.write_record([
            r.problem.clone(),
            r.reference.clone(),
            r.candidate.clone(),
            r.u.to_string(),
            r.p_value.to_string(),
            r.verdict.symbol().to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
