//! Priority-list repair of arbitrary commitment/dispatch candidates.
//!
//! 1. Each unit's row is made to respect minimum up/down times by extending
//!    blocks that would end too early.
//! 2. Hours short of spinning reserve get extra units, cheapest full-load
//!    average cost first. A unit is only added together with the extra
//!    hours its minimum up/down times require, so rows stay legal.
//! 3. Hours whose committed minimum output overshoots the balance window
//!    drop their most expensive unit where that keeps the row legal and the
//!    reserve met.
//! 4. Committed units are dispatched by equal incremental cost.

use crate::error::{Error, Result};

use super::{dispatch, dispatch_target, row_violations, Schedule, UcpInstance, Unit};

/// Forces `row` to respect minimum up/down times by extending any block
/// that would switch too early, honoring the initial status.
pub fn legalize_row(unit: &Unit, row: &mut [bool]) {
    let mut prev = unit.initially_on();
    let mut run = unit.sigma.unsigned_abs();
    for slot in row.iter_mut() {
        if *slot != prev {
            let locked = if prev { run < unit.gamma_up } else { run < unit.gamma_down };
            if locked {
                *slot = prev;
                run += 1;
            } else {
                prev = *slot;
                run = 1;
            }
        } else {
            run += 1;
        }
    }
}

/// Turns `unit` on at hour index `k` plus whatever further hours keep the
/// row legal. Only ever adds on-hours. `None` when no legal completion exists.
fn commit(unit: &Unit, row: &[bool], k: usize) -> Option<Vec<bool>> {
    let mut row = row.to_vec();
    row[k] = true;
    loop {
        let (up, down) = row_violations(unit, &row);
        if up.is_empty() && down.is_empty() {
            return Some(row);
        }
        if let Some(&t) = up.first() {
            // block ending at hour t is too short: keep the unit on one more hour
            row[t] = true;
            continue;
        }
        let t = down[0];
        if t == 0 {
            // started at hour 1 before its pre-horizon off time was served
            return None;
        }
        // off block ending at hour t is too short: fill it
        let mut s = t;
        while s >= 1 && !row[s - 1] {
            row[s - 1] = true;
            s -= 1;
        }
    }
}

fn reserve_short(inst: &UcpInstance, u: &[Vec<bool>], k: usize) -> bool {
    let cap: f64 = inst.units.iter().zip(u).filter(|(_, row)| row[k]).map(|(unit, _)| unit.p_max).sum();
    cap < inst.demand[k] + inst.reserve[k] - super::BALANCE_SLACK
}

fn committed<'a>(inst: &'a UcpInstance, u: &[Vec<bool>], k: usize) -> Vec<&'a Unit> {
    inst.units.iter().zip(u).filter(|(_, row)| row[k]).map(|(unit, _)| unit).collect()
}

/// Unit indices sorted by full-load average cost, cheapest first.
fn priority_order(inst: &UcpInstance) -> Vec<usize> {
    let mut order: Vec<usize> = (0..inst.n_units()).collect();
    order.sort_by(|&i, &j| {
        inst.units[i].full_load_average_cost().total_cmp(&inst.units[j].full_load_average_cost())
    });
    order
}

/// Returns a schedule satisfying every constraint of `inst`.
///
/// Deterministic; a feasible input keeps its commitment and only has its
/// dispatch recomputed.
pub fn repair(sched: &Schedule, inst: &UcpInstance) -> Result<Schedule> {
    sched.check_shape(inst)?;
    let order = priority_order(inst);
    let mut u = sched.u.clone();

    for (unit, row) in inst.units.iter().zip(u.iter_mut()) {
        legalize_row(unit, row);
    }

    for k in 0..inst.hours() {
        while reserve_short(inst, &u, k) {
            let added = order
                .iter()
                .filter(|&&i| !u[i][k])
                .find_map(|&i| commit(&inst.units[i], &u[i], k).map(|row| (i, row)));
            match added {
                Some((i, row)) => u[i] = row,
                None => {
                    return Err(Error::Unrepairable(format!(
                        "hour {}: reserve cannot be met by any legal commitment",
                        k + 1
                    )))
                }
            }
        }
    }

    for k in 0..inst.hours() {
        let high = inst.demand[k] * (1.0 + inst.epsilon);
        loop {
            let min_out: f64 = committed(inst, &u, k).iter().map(|unit| unit.p_min).sum();
            if min_out <= high {
                break;
            }
            let dropped = order.iter().rev().filter(|&&i| u[i][k]).find_map(|&i| {
                let mut row = u[i].clone();
                row[k] = false;
                let (up, down) = row_violations(&inst.units[i], &row);
                let mut trial = u.clone();
                trial[i] = row.clone();
                (up.is_empty() && down.is_empty() && !reserve_short(inst, &trial, k)).then_some((i, row))
            });
            match dropped {
                Some((i, row)) => u[i] = row,
                None => {
                    return Err(Error::Unrepairable(format!(
                        "hour {}: committed minimum output exceeds demand",
                        k + 1
                    )))
                }
            }
        }
    }

    let mut p = vec![vec![0.0; inst.hours()]; inst.n_units()];
    for k in 0..inst.hours() {
        let idx: Vec<usize> = (0..inst.n_units()).filter(|&i| u[i][k]).collect();
        let units: Vec<&Unit> = idx.iter().map(|&i| &inst.units[i]).collect();
        dispatch_target(&units, inst.demand[k], inst.epsilon)?;
        let out = dispatch(&units, inst.demand[k], inst.epsilon)?;
        for (&i, v) in idx.iter().zip(out) {
            p[i][k] = v;
        }
    }
    Ok(Schedule { u, p })
}
