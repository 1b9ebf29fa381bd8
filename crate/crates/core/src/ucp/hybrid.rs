//! Mixed binary/real evolution for unit commitment.
//!
//! An individual holds the commitment bits (unit-major, `N * T`) and one real
//! output per bit. Bits evolve by the BLDE trial rule on `-cost`, reals by
//! DE/rand/1 with binomial crossover. Every candidate is repaired before it is
//! costed and the trial replaces its parent when it is no more expensive.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::blde::{default_p, make_trial, ArchiveSnapshot};
use crate::error::{Error, Result};
use crate::population::argmax;
use crate::rng::RngStream;

use super::{repair, total_cost, Schedule, UcpInstance};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HybridConfig {
    pub pop_size: usize,
    pub iterations: usize,
    /// DE scale factor.
    pub f: f64,
    /// Binomial crossover rate of the real part.
    pub cr: f64,
    /// Bit re-sampling probability; `default_p(N * T)` when unset.
    pub p: Option<f64>,
    pub seed: u64,
    /// Write repaired genes back into the population.
    pub lamarckian: bool,
    pub archive_snapshot: ArchiveSnapshot,
}

impl Default for HybridConfig {
    fn default() -> Self {
        HybridConfig {
            pop_size: 100,
            iterations: 2500,
            f: 0.8,
            cr: 0.5,
            p: None,
            seed: 0,
            lamarckian: true,
            archive_snapshot: ArchiveSnapshot::Pre,
        }
    }
}

impl HybridConfig {
    pub fn validate(&self) -> Result<()> {
        if self.pop_size < 4 {
            return Err(Error::InvalidConfig(format!("pop_size must be at least 4, got {}", self.pop_size)));
        }
        if !(0.0..=1.0).contains(&self.cr) {
            return Err(Error::InvalidConfig(format!("cr must lie in [0, 1], got {}", self.cr)));
        }
        if self.f.is_nan() || self.f <= 0.0 {
            return Err(Error::InvalidConfig(format!("f must be positive, got {}", self.f)));
        }
        if let Some(p) = self.p {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidConfig(format!("p must lie in (0, 1), got {p}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct HybridResult {
    pub best: Schedule,
    pub cost: f64,
    /// Best cost after initialization and after every iteration.
    pub history: Vec<f64>,
    pub evaluations: u64,
}

#[derive(Clone)]
struct Member {
    bits: BitString,
    reals: Vec<f64>,
    cost: f64,
}

fn to_schedule(bits: &BitString, reals: &[f64], n: usize, t: usize) -> Schedule {
    let u = (0..n).map(|i| bits.as_slice()[i * t..(i + 1) * t].to_vec()).collect();
    let p = (0..n).map(|i| reals[i * t..(i + 1) * t].to_vec()).collect();
    Schedule { u, p }
}

fn flatten(sched: &Schedule) -> (BitString, Vec<f64>) {
    let bits = sched.u.iter().flatten().copied().collect();
    let reals = sched.p.iter().flatten().copied().collect();
    (bits, reals)
}

struct Evaluator<'a> {
    inst: &'a UcpInstance,
    lamarckian: bool,
    count: u64,
    best: Option<(Schedule, f64)>,
}

impl Evaluator<'_> {
    fn eval(&mut self, bits: BitString, reals: Vec<f64>) -> Result<Member> {
        let (n, t) = (self.inst.n_units(), self.inst.hours());
        let fixed = repair(&to_schedule(&bits, &reals, n, t), self.inst)?;
        let cost = total_cost(&fixed, self.inst);
        self.count += 1;
        if self.best.as_ref().is_none_or(|(_, c)| cost < *c) {
            self.best = Some((fixed.clone(), cost));
        }
        Ok(if self.lamarckian {
            let (bits, reals) = flatten(&fixed);
            Member { bits, reals, cost }
        } else {
            Member { bits, reals, cost }
        })
    }

    fn best_cost(&self) -> f64 {
        self.best.as_ref().map_or(f64::INFINITY, |(_, c)| *c)
    }
}

/// Three distinct indices below `n`, all different from `i`.
fn distinct3(n: usize, i: usize, rng: &mut RngStream) -> [usize; 3] {
    let mut picked = [usize::MAX; 3];
    for k in 0..3 {
        loop {
            let r = rng.below(n);
            if r != i && !picked[..k].contains(&r) {
                picked[k] = r;
                break;
            }
        }
    }
    picked
}

pub fn hybrid_solve(inst: &UcpInstance, cfg: &HybridConfig) -> Result<HybridResult> {
    cfg.validate()?;
    inst.validate()?;
    let (n, t) = (inst.n_units(), inst.hours());
    let len = n * t;
    let p = cfg.p.unwrap_or_else(|| default_p(len));
    let pmax: Vec<f64> = inst.units.iter().flat_map(|u| std::iter::repeat_n(u.p_max, t)).collect();
    let mut rng = RngStream::new(cfg.seed);
    let mut ev = Evaluator { inst, lamarckian: cfg.lamarckian, count: 0, best: None };

    let random_reals = |rng: &mut RngStream| -> Vec<f64> { pmax.iter().map(|&m| rng.range(0.0, m)).collect() };

    let mut pop = Vec::with_capacity(cfg.pop_size);
    for _ in 0..cfg.pop_size {
        let bits = BitString::random(len, &mut rng);
        let reals = random_reals(&mut rng);
        pop.push(ev.eval(bits, reals)?);
    }
    // the initial archive is random and never evaluated
    let mut archive: Vec<(BitString, f64)> =
        (0..cfg.pop_size).map(|_| (BitString::random(len, &mut rng), f64::NEG_INFINITY)).collect();

    let mut history = vec![ev.best_cost()];
    for _ in 0..cfg.iterations {
        let neg: Vec<f64> = pop.iter().map(|m| -m.cost).collect();
        let gbest = pop[argmax(&neg)].bits.clone();
        let before: Vec<(BitString, f64)> = pop.iter().map(|m| (m.bits.clone(), -m.cost)).collect();

        for i in 0..cfg.pop_size {
            let x = rng.below(cfg.pop_size);
            let y = rng.below(cfg.pop_size);
            let z = rng.below(cfg.pop_size);
            let bits = make_trial(
                &pop[x].bits,
                &pop[y].bits,
                &archive[z].0,
                &gbest,
                -pop[y].cost,
                archive[z].1,
                p,
                &mut rng,
            )?;

            let [r1, r2, r3] = distinct3(cfg.pop_size, i, &mut rng);
            let jrand = rng.below(len);
            let reals: Vec<f64> = (0..len)
                .map(|j| {
                    if j == jrand || rng.uniform() < cfg.cr {
                        let v = pop[r1].reals[j] + cfg.f * (pop[r2].reals[j] - pop[r3].reals[j]);
                        v.clamp(0.0, pmax[j])
                    } else {
                        pop[i].reals[j]
                    }
                })
                .collect();

            let trial = ev.eval(bits, reals)?;
            if trial.cost <= pop[i].cost {
                pop[i] = trial;
            }
        }

        archive = match cfg.archive_snapshot {
            ArchiveSnapshot::Pre => before,
            ArchiveSnapshot::Post => pop.iter().map(|m| (m.bits.clone(), -m.cost)).collect(),
        };
        history.push(ev.best_cost());
    }

    let (best, cost) = ev.best.expect("population is never empty");
    Ok(HybridResult { best, cost, history, evaluations: ev.count })
}
