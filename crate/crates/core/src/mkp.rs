//! Multiple knapsack problem: instance files, penalized fitness and an
//! exhaustive oracle for small instances.
//!
//! Instance text is whitespace separated:
//!
//! ```text
//! n m [known_optimum]
//! p_1 ... p_n
//! w_11 ... w_1n
//! ...
//! w_m1 ... w_mn
//! W_1 ... W_m
//! ```
//!
//! The optimum is present when the token count says so; a value of zero
//! means "unknown".

use std::fmt::Write as _;
use std::path::Path;

use crate::batch::{map_indexed, Execution};
use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::problem::Problem;
use crate::rng::RngStream;

/// Largest instance [`mkp_bruteforce`] will enumerate.
pub const BRUTEFORCE_LIMIT: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct MkpInstance {
    pub name: String,
    pub profits: Vec<f64>,
    /// `m` rows of `n` weights.
    pub weights: Vec<Vec<f64>>,
    pub capacities: Vec<f64>,
    pub known_opt: Option<f64>,
}

impl MkpInstance {
    pub fn n(&self) -> usize {
        self.profits.len()
    }

    pub fn m(&self) -> usize {
        self.capacities.len()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut inst = parse_mkp(&text)?;
        if let Some(stem) = path.file_stem().and_then(|s| s.to_str()) {
            inst.name = stem.to_string();
        }
        Ok(inst)
    }

    /// Serializes in the layout accepted by [`parse_mkp`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {}", self.n(), self.m(), self.known_opt.unwrap_or(0.0));
        let row = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let _ = writeln!(out, "{}", row(&self.profits));
        for w in &self.weights {
            let _ = writeln!(out, "{}", row(w));
        }
        let _ = writeln!(out, "{}", row(&self.capacities));
        out
    }

    /// Evaluation budget `300 n m`.
    pub fn budget(&self) -> u64 {
        300 * (self.n() * self.m()) as u64
    }

    pub fn profit(&self, bits: &BitString) -> f64 {
        bits.iter().zip(&self.profits).filter(|(b, _)| *b).map(|(_, p)| p).sum()
    }

    /// Load minus capacity for every constraint.
    pub fn violations(&self, bits: &BitString) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.capacities)
            .map(|(row, cap)| {
                bits.iter().zip(row).filter(|(b, _)| *b).map(|(_, w)| w).sum::<f64>() - cap
            })
            .collect()
    }

    pub fn is_feasible(&self, bits: &BitString) -> bool {
        self.violations(bits).iter().all(|&v| v <= 0.0)
    }

    /// `(1 + max_j p_j) / min_{i,j} w_ij`, the minimum taken over positive
    /// weights.
    pub fn penalty_coefficient(&self) -> f64 {
        let max_p = self.profits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min_w = self
            .weights
            .iter()
            .flatten()
            .copied()
            .filter(|&w| w > 0.0)
            .fold(f64::INFINITY, f64::min);
        (1.0 + max_p) / min_w
    }

    /// Random instance with integer profits and weights in `1..=100` and
    /// capacities at half of each constraint's total weight.
    pub fn random(n: usize, m: usize, rng: &mut RngStream) -> Self {
        let mut draw = || (1 + rng.below(100)) as f64;
        let profits: Vec<f64> = (0..n).map(|_| draw()).collect();
        let weights: Vec<Vec<f64>> = (0..m).map(|_| (0..n).map(|_| draw()).collect()).collect();
        let capacities = weights.iter().map(|row| (row.iter().sum::<f64>() / 2.0).floor()).collect();
        MkpInstance { name: format!("random-{n}x{m}"), profits, weights, capacities, known_opt: None }
    }
}

struct Tokens<'a> {
    items: Vec<&'a str>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn take(&mut self, section: &str, count: usize) -> Result<Vec<f64>> {
        if self.pos + count > self.items.len() {
            return Err(Error::Parse {
                section: section.into(),
                message: format!(
                    "expected {count} values at token {}, found {}",
                    self.pos + 1,
                    self.items.len() - self.pos
                ),
            });
        }
        let out = self.items[self.pos..self.pos + count]
            .iter()
            .enumerate()
            .map(|(k, t)| {
                t.parse::<f64>().map_err(|_| Error::Parse {
                    section: section.into(),
                    message: format!("token {} ({t:?}) is not a number", self.pos + k + 1),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        self.pos += count;
        Ok(out)
    }

    fn take_count(&mut self, section: &str) -> Result<usize> {
        let v = self.take(section, 1)?[0];
        if v < 1.0 || v.fract() != 0.0 {
            return Err(Error::Parse {
                section: section.into(),
                message: format!("expected a positive integer, found {v}"),
            });
        }
        Ok(v as usize)
    }
}

/// Parses an instance in the layout described in the module docs.
pub fn parse_mkp(text: &str) -> Result<MkpInstance> {
    let mut tokens = Tokens { items: text.split_whitespace().collect(), pos: 0 };
    let n = tokens.take_count("header (n)")?;
    let m = tokens.take_count("header (m)")?;

    let body = n + m * n + m;
    let remaining = tokens.items.len() - tokens.pos;
    let known_opt = if remaining == body {
        None
    } else {
        // anything other than an exact fit is reported against the layout
        // that carries the optimum
        let opt = tokens.take("known optimum", 1)?[0];
        (opt != 0.0).then_some(opt)
    };

    let profits = tokens.take("profits", n)?;
    let mut weights = Vec::with_capacity(m);
    for i in 0..m {
        weights.push(tokens.take(&format!("weights row {}", i + 1), n)?);
    }
    let capacities = tokens.take("capacities", m)?;
    if tokens.pos != tokens.items.len() {
        return Err(Error::Parse {
            section: "trailer".into(),
            message: format!("{} unexpected tokens after capacities", tokens.items.len() - tokens.pos),
        });
    }
    if weights.iter().flatten().any(|&w| w < 0.0) {
        return Err(Error::Parse { section: "weights".into(), message: "negative weight".into() });
    }
    if !weights.iter().flatten().any(|&w| w > 0.0) {
        return Err(Error::Parse { section: "weights".into(), message: "all weights are zero".into() });
    }
    Ok(MkpInstance { name: "mkp".into(), profits, weights, capacities, known_opt })
}

/// How the violation inside the penalty is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PenaltyMode {
    /// `max_i max(sum_j w_ij x_j - W_i, 0)`.
    #[default]
    Aggregate,
    /// `max_i max(max_j (w_ij x_j - W_i), 0)`, a per-item reading kept for study.
    PerItem,
}

/// Penalty of `bits`; zero exactly when every constraint holds (aggregate mode).
pub fn pt_penalty(inst: &MkpInstance, bits: &BitString) -> Result<f64> {
    pt_penalty_with(inst, bits, PenaltyMode::Aggregate)
}

pub fn pt_penalty_with(inst: &MkpInstance, bits: &BitString, mode: PenaltyMode) -> Result<f64> {
    bits.check_len(inst.n())?;
    let worst = match mode {
        PenaltyMode::Aggregate => inst.violations(bits).into_iter().fold(0.0, f64::max),
        PenaltyMode::PerItem => inst
            .weights
            .iter()
            .zip(&inst.capacities)
            .flat_map(|(row, cap)| row.iter().zip(bits.iter()).map(move |(w, b)| w * b as u8 as f64 - cap))
            .fold(0.0, f64::max),
    };
    Ok(if worst > 0.0 { inst.penalty_coefficient() * worst } else { 0.0 })
}

/// Profit minus penalty.
pub fn mkp_fitness(inst: &MkpInstance, bits: &BitString) -> Result<f64> {
    Ok(inst.profit(bits) - pt_penalty(inst, bits)?)
}

/// Exact feasible optimum by enumeration. Among equal profits the selection
/// with the smallest integer encoding (item 1 as the most significant bit)
/// wins.
pub fn mkp_bruteforce(inst: &MkpInstance) -> Result<(BitString, f64)> {
    mkp_bruteforce_with(inst, Execution::default())
}

pub fn mkp_bruteforce_with(inst: &MkpInstance, exec: Execution) -> Result<(BitString, f64)> {
    let n = inst.n();
    if n > BRUTEFORCE_LIMIT {
        return Err(Error::TooLarge { n, limit: BRUTEFORCE_LIMIT });
    }
    let high = n.min(8);
    let low = n - high;
    let best = map_indexed(1 << high, exec, |prefix| {
        let mut best: Option<(f64, u64)> = None;
        for suffix in 0..(1u64 << low) {
            let v = ((prefix as u64) << low) | suffix;
            let bits = BitString::from_int(v, n);
            if inst.is_feasible(&bits) {
                let p = inst.profit(&bits);
                if best.is_none_or(|(bp, _)| p > bp) {
                    best = Some((p, v));
                }
            }
        }
        best
    })
    .into_iter()
    .flatten()
    .fold(None::<(f64, u64)>, |acc, (p, v)| match acc {
        Some((bp, _)) if bp >= p => acc,
        _ => Some((p, v)),
    });
    // the empty selection is feasible whenever every capacity is nonnegative
    let (profit, v) = best.ok_or_else(|| Error::InvalidConfig("no feasible selection".into()))?;
    Ok((BitString::from_int(v, n), profit))
}

/// An instance wrapped as a maximization problem with the penalized fitness.
#[derive(Debug, Clone)]
pub struct MkpProblem {
    pub instance: MkpInstance,
    pub mode: PenaltyMode,
}

impl MkpProblem {
    pub fn new(instance: MkpInstance) -> Self {
        MkpProblem { instance, mode: PenaltyMode::Aggregate }
    }
}

impl Problem for MkpProblem {
    fn name(&self) -> &str {
        &self.instance.name
    }

    fn n_bits(&self) -> usize {
        self.instance.n()
    }

    fn fitness(&self, bits: &BitString, _rng: &mut RngStream) -> f64 {
        let pt = pt_penalty_with(&self.instance, bits, self.mode).expect("length checked by caller");
        self.instance.profit(bits) - pt
    }

    fn known_max(&self) -> Option<f64> {
        self.instance.known_opt
    }
}
