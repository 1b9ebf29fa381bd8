//! Multi-run summaries and the Wilcoxon rank-sum comparison.

use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Per-run outcomes of one algorithm on one problem.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunBatch {
    pub best_fitness: Vec<f64>,
    pub wall_times: Vec<Duration>,
    pub success_flags: Vec<bool>,
}

impl RunBatch {
    pub fn push(&mut self, best: f64, wall: Duration, success: bool) {
        self.best_fitness.push(best);
        self.wall_times.push(wall);
        self.success_flags.push(success);
    }

    pub fn len(&self) -> usize {
        self.best_fitness.len()
    }

    pub fn is_empty(&self) -> bool {
        self.best_fitness.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub ave_fit: f64,
    /// Sample standard deviation (divisor `N - 1`; zero for a single run).
    pub std_dev: f64,
    pub sr_percent: f64,
    /// Mean wall time per run, in seconds.
    pub mean_runtime: f64,
}

impl Summary {
    /// `AveFit±StdDev (SR, RunTime)` in scientific notation.
    pub fn table_cell(&self) -> String {
        format!(
            "{}±{} ({}, {})",
            sci(self.ave_fit),
            sci(self.std_dev),
            self.sr_percent,
            sci(self.mean_runtime)
        )
    }
}

/// C-style scientific notation with two decimals, e.g. `-1.12E+00`.
pub fn sci(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let s = format!("{x:.2E}");
    let (mantissa, exp) = s.split_once('E').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}E{sign}{:02}", exp.abs())
}

pub fn summarize(batch: &RunBatch) -> Result<Summary> {
    let n = batch.len();
    if n == 0 {
        return Err(Error::EmptySample);
    }
    if batch.wall_times.len() != n || batch.success_flags.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: batch.wall_times.len().min(batch.success_flags.len()),
        });
    }
    let nf = n as f64;
    let ave_fit = batch.best_fitness.iter().sum::<f64>() / nf;
    let std_dev = if n > 1 {
        let ss: f64 = batch.best_fitness.iter().map(|f| (f - ave_fit).powi(2)).sum();
        (ss / (nf - 1.0)).sqrt()
    } else {
        0.0
    };
    let successes = batch.success_flags.iter().filter(|&&s| s).count();
    Ok(Summary {
        ave_fit,
        std_dev,
        sr_percent: 100.0 * successes as f64 / nf,
        mean_runtime: batch.wall_times.iter().map(Duration::as_secs_f64).sum::<f64>() / nf,
    })
}

/// Outcome of comparing sample `a` against sample `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    Superior,
    Inferior,
    NoDifference,
}

impl Verdict {
    pub fn symbol(self) -> &'static str {
        match self {
            Verdict::Superior => "+",
            Verdict::Inferior => "-",
            Verdict::NoDifference => "≈",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PMethod {
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSumTest {
    /// Mann-Whitney `U` of sample `a`.
    pub u: f64,
    pub p_value: f64,
    pub method: PMethod,
    pub verdict: Verdict,
}

/// Both samples need at least this many values for the normal approximation.
pub const NORMAL_MIN_SIZE: usize = 10;

/// Two-sided Wilcoxon rank-sum test with midranks for ties.
///
/// Uses exact enumeration of the rank-sum distribution when either sample is
/// smaller than [`NORMAL_MIN_SIZE`], and the tie-corrected normal
/// approximation with continuity correction otherwise. A significant result
/// is `Superior` when `a` has the higher mean rank.
pub fn wilcoxon_ranksum(a: &[f64], b: &[f64], alpha: f64) -> Result<RankSumTest> {
    let method = if a.len() < NORMAL_MIN_SIZE || b.len() < NORMAL_MIN_SIZE {
        PMethod::Exact
    } else {
        PMethod::Normal
    };
    wilcoxon_ranksum_with(a, b, alpha, method)
}

pub fn wilcoxon_ranksum_with(a: &[f64], b: &[f64], alpha: f64, method: PMethod) -> Result<RankSumTest> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::InvalidConfig("rank-sum test needs at least two values per sample".into()));
    }
    if a.iter().chain(b).any(|v| v.is_nan()) {
        return Err(Error::InvalidConfig("NaN in sample".into()));
    }
    let (n1, n2) = (a.len(), b.len());
    let ranks2 = doubled_midranks(a, b);
    // doubled rank sum of `a`, and its null expectation
    let s_obs: u64 = ranks2[..n1].iter().sum();
    let expected = (n1 * (n1 + n2 + 1)) as u64;
    let r1 = s_obs as f64 / 2.0;
    let u = r1 - (n1 * (n1 + 1)) as f64 / 2.0;

    let p_value = match method {
        PMethod::Exact => exact_p(&ranks2, n1, s_obs.abs_diff(expected), expected),
        PMethod::Normal => normal_p(&ranks2, n1, n2, u),
    };

    let mean_rank_a = r1 / n1 as f64;
    let mean_rank_b = (ranks2[n1..].iter().sum::<u64>() as f64 / 2.0) / n2 as f64;
    let verdict = if p_value < alpha && mean_rank_a != mean_rank_b {
        if mean_rank_a > mean_rank_b {
            Verdict::Superior
        } else {
            Verdict::Inferior
        }
    } else {
        Verdict::NoDifference
    };
    Ok(RankSumTest { u, p_value, method, verdict })
}

/// Twice the midrank of every value of `a` followed by `b`.
fn doubled_midranks(a: &[f64], b: &[f64]) -> Vec<u64> {
    let values: Vec<f64> = a.iter().chain(b).copied().collect();
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0u64; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // ranks start+1 ..= end share the midrank (start + 1 + end) / 2
        let r2 = (start + 1 + end) as u64;
        for &k in &order[start..end] {
            ranks[k] = r2;
        }
        start = end;
    }
    ranks
}

fn tie_groups(ranks2: &[u64]) -> Vec<usize> {
    let mut sorted = ranks2.to_vec();
    sorted.sort_unstable();
    sorted.chunk_by(|x, y| x == y).map(<[u64]>::len).collect()
}

/// `P(|S - E| >= d)` where `S` is the doubled rank sum of a random subset of
/// size `n1`, computed by dynamic programming over subset sums.
fn exact_p(ranks2: &[u64], n1: usize, d: u64, expected: u64) -> f64 {
    let max_sum: u64 = {
        let mut r = ranks2.to_vec();
        r.sort_unstable_by(|x, y| y.cmp(x));
        r[..n1].iter().sum()
    };
    let width = max_sum as usize + 1;
    // counts[k][s]: number of k-subsets of the processed items with sum s
    let mut counts = vec![vec![0.0f64; width]; n1 + 1];
    counts[0][0] = 1.0;
    for &r in ranks2 {
        let r = r as usize;
        for k in (1..=n1).rev() {
            let (lower, upper) = counts.split_at_mut(k);
            let (src, dst) = (&lower[k - 1], &mut upper[0]);
            for s in (r..width).rev() {
                dst[s] += src[s - r];
            }
        }
    }
    let total: f64 = counts[n1].iter().sum();
    let tail: f64 = counts[n1]
        .iter()
        .enumerate()
        .filter(|(s, _)| (*s as u64).abs_diff(expected) >= d)
        .map(|(_, c)| c)
        .sum();
    (tail / total).min(1.0)
}

fn normal_p(ranks2: &[u64], n1: usize, n2: usize, u: f64) -> f64 {
    let n = (n1 + n2) as f64;
    let (n1, n2) = (n1 as f64, n2 as f64);
    let ties: f64 = tie_groups(ranks2).iter().map(|&t| (t * t * t - t) as f64).sum();
    let var = n1 * n2 / 12.0 * ((n + 1.0) - ties / (n * (n - 1.0)));
    if var <= 0.0 {
        return 1.0;
    }
    let z = ((u - n1 * n2 / 2.0).abs() - 0.5).max(0.0) / var.sqrt();
    erfc(z / std::f64::consts::SQRT_2).min(1.0)
}
