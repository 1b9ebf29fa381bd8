//! Unit commitment: hourly on/off decisions and power outputs of thermal
//! units that minimize production cost under demand, spinning reserve,
//! minimum up/down time and output range constraints.
//!
//! Hours are 1-based in every public function and report; hour 0 stands
//! for the status before the horizon, which follows the sign of each
//! unit's initial status `sigma`.

mod dispatch;
mod hybrid;
mod repair;

pub use dispatch::{dispatch, dispatch_target};
pub use hybrid::{hybrid_solve, HybridConfig, HybridResult};
pub use repair::{legalize_row, repair};

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack added to the power-balance tolerance to absorb rounding.
pub const BALANCE_SLACK: f64 = 1e-9;

/// Thermal unit parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Unit {
    /// Output limits, MW.
    pub p_max: f64,
    pub p_min: f64,
    /// Fuel cost `a + b P + c P^2`, $/h.
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Hot start cost, $.
    pub d: f64,
    /// Cold start cost, $.
    pub e: f64,
    /// Cold start time, h.
    pub f: u32,
    pub gamma_up: u32,
    pub gamma_down: u32,
    /// Hours on (positive) or off (negative) before the horizon.
    pub sigma: i32,
}

impl Unit {
    pub fn fuel_cost(&self, p: f64) -> f64 {
        self.a + self.b * p + self.c * p * p
    }

    pub fn marginal_cost(&self, p: f64) -> f64 {
        self.b + 2.0 * self.c * p
    }

    /// Fuel cost per MW at full output; lower is committed first.
    pub fn full_load_average_cost(&self) -> f64 {
        self.fuel_cost(self.p_max) / self.p_max
    }

    pub fn initially_on(&self) -> bool {
        self.sigma > 0
    }

    fn validate(&self, i: usize) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidConfig(format!("unit {}: {what}", i + 1)));
        if !(self.p_min >= 0.0 && self.p_min <= self.p_max && self.p_max > 0.0) {
            return bad("need 0 <= p_min <= p_max and p_max > 0");
        }
        if self.gamma_up < 1 || self.gamma_down < 1 {
            return bad("minimum up/down times must be at least 1 h");
        }
        if self.sigma == 0 {
            return bad("initial status must be nonzero");
        }
        if self.c < 0.0 {
            return bad("fuel cost must be convex (c >= 0)");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UcpInstance {
    pub name: String,
    pub units: Vec<Unit>,
    /// Demand per hour, MW.
    pub demand: Vec<f64>,
    /// Spinning reserve requirement per hour, MW.
    pub reserve: Vec<f64>,
    /// Relative power-balance tolerance.
    pub epsilon: f64,
}

#[derive(Deserialize)]
struct InstanceFile {
    #[serde(default)]
    name: Option<String>,
    units: Vec<Unit>,
    demand: Vec<f64>,
    #[serde(default)]
    reserve: Option<Vec<f64>>,
    #[serde(default)]
    reserve_fraction: Option<f64>,
    #[serde(default)]
    epsilon: Option<f64>,
}

/// Reserve as a fraction of demand when an instance file gives none.
pub const DEFAULT_RESERVE_FRACTION: f64 = 0.1;

const TEN_UNIT: &str = include_str!("../../data/ten_unit.json");

impl UcpInstance {
    pub fn new(units: Vec<Unit>, demand: Vec<f64>, reserve: Vec<f64>, epsilon: f64) -> Result<Self> {
        let inst = UcpInstance { name: "ucp".into(), units, demand, reserve, epsilon };
        inst.validate()?;
        Ok(inst)
    }

    /// The 10-unit, 24-hour test system.
    pub fn ten_unit() -> Self {
        Self::from_json(TEN_UNIT).expect("embedded instance is valid")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: InstanceFile = serde_json::from_str(text)?;
        let reserve = match (raw.reserve, raw.reserve_fraction) {
            (Some(r), _) => r,
            (None, frac) => {
                let frac = frac.unwrap_or(DEFAULT_RESERVE_FRACTION);
                raw.demand.iter().map(|d| d * frac).collect()
            }
        };
        let inst = UcpInstance {
            name: raw.name.unwrap_or_else(|| "ucp".into()),
            units: raw.units,
            demand: raw.demand,
            reserve,
            epsilon: raw.epsilon.unwrap_or(0.0),
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn n_units(&self) -> usize {
        self.units.len()
    }

    pub fn hours(&self) -> usize {
        self.demand.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.units.is_empty() {
            return Err(Error::InvalidConfig("instance has no units".into()));
        }
        if self.demand.is_empty() {
            return Err(Error::InvalidConfig("empty demand profile".into()));
        }
        if self.demand.iter().any(|&d| d <= 0.0) {
            return Err(Error::InvalidConfig("demand must be positive".into()));
        }
        if self.reserve.len() != self.demand.len() {
            return Err(Error::LengthMismatch { expected: self.demand.len(), actual: self.reserve.len() });
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(Error::InvalidConfig(format!("epsilon {} outside [0, 1)", self.epsilon)));
        }
        for (i, u) in self.units.iter().enumerate() {
            u.validate(i)?;
        }
        Ok(())
    }
}

/// Commitment (`u`) and dispatch (`p`, MW), one row per unit.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub u: Vec<Vec<bool>>,
    pub p: Vec<Vec<f64>>,
}

impl Schedule {
    pub fn all_off(n_units: usize, hours: usize) -> Self {
        Schedule { u: vec![vec![false; hours]; n_units], p: vec![vec![0.0; hours]; n_units] }
    }

    pub fn all_on(inst: &UcpInstance) -> Self {
        Schedule {
            u: vec![vec![true; inst.hours()]; inst.n_units()],
            p: inst.units.iter().map(|unit| vec![unit.p_min; inst.hours()]).collect(),
        }
    }

    fn check_shape(&self, inst: &UcpInstance) -> Result<()> {
        let (n, t) = (inst.n_units(), inst.hours());
        if self.u.len() != n || self.p.len() != n {
            return Err(Error::LengthMismatch { expected: n, actual: self.u.len().min(self.p.len()) });
        }
        for (u, p) in self.u.iter().zip(&self.p) {
            if u.len() != t || p.len() != t {
                return Err(Error::LengthMismatch { expected: t, actual: u.len().min(p.len()) });
            }
        }
        Ok(())
    }

    /// Committed capacity in hour `t` (1-based).
    pub fn capacity(&self, inst: &UcpInstance, t: usize) -> f64 {
        inst.units.iter().zip(&self.u).filter(|(_, row)| row[t - 1]).map(|(unit, _)| unit.p_max).sum()
    }

    pub fn output(&self, t: usize) -> f64 {
        self.u.iter().zip(&self.p).filter(|(row, _)| row[t - 1]).map(|(_, p)| p[t - 1]).sum()
    }
}

/// Hours unit has been continuously off at hour `t`; zero if on.
pub fn tau_off(unit: &Unit, row: &[bool], t: usize) -> u32 {
    assert!((1..=row.len()).contains(&t), "hour {t} outside 1..={}", row.len());
    let mut tau = 0;
    for (k, &on) in row[..t].iter().enumerate() {
        tau = match (on, k) {
            (true, _) => 0,
            (false, 0) if unit.sigma > 0 => 1,
            (false, 0) => (1 - unit.sigma) as u32,
            (false, _) => 1 + tau,
        };
    }
    tau
}

/// Hours unit has been continuously on at hour `t`; zero if off.
pub fn tau_on(unit: &Unit, row: &[bool], t: usize) -> u32 {
    assert!((1..=row.len()).contains(&t), "hour {t} outside 1..={}", row.len());
    let mut tau = 0;
    for (k, &on) in row[..t].iter().enumerate() {
        tau = match (on, k) {
            (false, _) => 0,
            (true, 0) if unit.sigma < 0 => 1,
            (true, 0) => (1 + unit.sigma) as u32,
            (true, _) => 1 + tau,
        };
    }
    tau
}

/// Start-up cost after `tau_off` hours off.
pub fn startup_cost(unit: &Unit, tau_off: u32) -> Result<f64> {
    if tau_off < unit.gamma_down {
        return Err(Error::IllegalStart { tau_off, gamma_down: unit.gamma_down });
    }
    Ok(if tau_off <= unit.gamma_down + unit.f { unit.d } else { unit.e })
}

/// Hours the unit had been off when it starts at hour `t`.
fn off_time_before(unit: &Unit, row: &[bool], t: usize) -> u32 {
    if t == 1 {
        unit.sigma.min(0).unsigned_abs()
    } else {
        tau_off(unit, row, t - 1)
    }
}

/// Start-up cost of every 0 to 1 transition of `row`, keyed by hour.
fn startups<'a>(unit: &'a Unit, row: &'a [bool]) -> impl Iterator<Item = (usize, f64)> + 'a {
    (1..=row.len()).filter_map(move |t| {
        let was_on = if t == 1 { unit.initially_on() } else { row[t - 2] };
        if !row[t - 1] || was_on {
            return None;
        }
        let off = off_time_before(unit, row, t);
        // an illegal start is priced as hot; repaired schedules never have one
        Some((t, startup_cost(unit, off).unwrap_or(unit.d)))
    })
}

/// Fuel cost over committed hours plus start-up costs.
pub fn total_cost(sched: &Schedule, inst: &UcpInstance) -> f64 {
    inst.units
        .iter()
        .zip(sched.u.iter().zip(&sched.p))
        .map(|(unit, (row, p))| {
            let fuel: f64 = row.iter().zip(p).filter(|(on, _)| **on).map(|(_, &p)| unit.fuel_cost(p)).sum();
            fuel + startups(unit, row).map(|(_, c)| c).sum::<f64>()
        })
        .sum()
}

/// Constraint violations of a schedule. Hours are 1-based, units 0-based.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ViolationReport {
    /// `(hour, |output / demand - 1|)` where the residual exceeds epsilon.
    pub balance: Vec<(usize, f64)>,
    /// `(hour, missing MW)`.
    pub reserve: Vec<(usize, f64)>,
    /// `(unit, hour)` of a switch-off that comes too early; hour 0 refers to
    /// the pre-horizon on period.
    pub min_up: Vec<(usize, usize)>,
    /// `(unit, hour)` of a start that comes too early.
    pub min_down: Vec<(usize, usize)>,
    /// `(unit, hour)` with output outside the unit's range (or nonzero while off).
    pub range: Vec<(usize, usize)>,
}

impl ViolationReport {
    pub fn count(&self) -> usize {
        self.balance.len() + self.reserve.len() + self.min_up.len() + self.min_down.len() + self.range.len()
    }

    pub fn is_feasible(&self) -> bool {
        self.count() == 0
    }
}

/// Minimum up/down violations of one commitment row.
pub fn row_violations(unit: &Unit, row: &[bool]) -> (Vec<usize>, Vec<usize>) {
    let (mut up, mut down) = (Vec::new(), Vec::new());
    let Some(&first) = row.first() else {
        return (up, down);
    };
    let sigma = unit.sigma;
    if sigma > 0 && !first && (sigma as u32) < unit.gamma_up {
        up.push(0);
    }
    if sigma < 0 && first && sigma.unsigned_abs() < unit.gamma_down {
        down.push(0);
    }
    // run length of the current block, counting the pre-horizon status
    let mut run = sigma.unsigned_abs();
    let mut prev = sigma > 0;
    for (k, &on) in row.iter().enumerate() {
        if on == prev {
            run += 1;
        } else {
            run = 1;
            prev = on;
        }
        let Some(&next) = row.get(k + 1) else { break };
        if on && !next && run < unit.gamma_up {
            up.push(k + 1);
        }
        if !on && next && run < unit.gamma_down {
            down.push(k + 1);
        }
    }
    (up, down)
}

pub fn check_constraints(sched: &Schedule, inst: &UcpInstance) -> Result<ViolationReport> {
    sched.check_shape(inst)?;
    let mut report = ViolationReport::default();
    for t in 1..=inst.hours() {
        let d = inst.demand[t - 1];
        let residual = (sched.output(t) / d - 1.0).abs();
        if residual > inst.epsilon + BALANCE_SLACK {
            report.balance.push((t, residual));
        }
        let deficit = d + inst.reserve[t - 1] - sched.capacity(inst, t);
        if deficit > BALANCE_SLACK {
            report.reserve.push((t, deficit));
        }
    }
    for (i, (unit, (row, p))) in inst.units.iter().zip(sched.u.iter().zip(&sched.p)).enumerate() {
        let (up, down) = row_violations(unit, row);
        report.min_up.extend(up.into_iter().map(|t| (i, t)));
        report.min_down.extend(down.into_iter().map(|t| (i, t)));
        for (k, (&on, &out)) in row.iter().zip(p).enumerate() {
            let tol = 1e-9 * unit.p_max;
            let ok = if on {
                out >= unit.p_min - tol && out <= unit.p_max + tol
            } else {
                out == 0.0
            };
            if !ok {
                report.range.push((i, k + 1));
            }
        }
    }
    Ok(report)
}
