use crate::error::{Error, Result};

use super::Unit;

/// Total output the dispatch aims for: the cheapest level inside the
/// balance window `[D (1 - eps), D (1 + eps)]` that the committed units can
/// produce.
pub fn dispatch_target(units: &[&Unit], demand: f64, epsilon: f64) -> Result<f64> {
    let low = demand * (1.0 - epsilon);
    let high = demand * (1.0 + epsilon);
    let min: f64 = units.iter().map(|u| u.p_min).sum();
    let max: f64 = units.iter().map(|u| u.p_max).sum();
    if units.is_empty() || min > high || max < low {
        return Err(Error::DispatchInfeasible { low, high, min, max });
    }
    // fuel cost grows with output, so the lowest admissible total is cheapest
    Ok(low.max(min))
}

fn output_at(unit: &Unit, lambda: f64) -> f64 {
    if unit.c > 0.0 {
        ((lambda - unit.b) / (2.0 * unit.c)).clamp(unit.p_min, unit.p_max)
    } else if lambda >= unit.b {
        unit.p_max
    } else {
        unit.p_min
    }
}

/// Equal-incremental-cost dispatch of the committed `units`.
///
/// Bisects on the system marginal cost `lambda`; each unit produces
/// `(lambda - b) / 2c` clamped to its range. Units that are not at a bound
/// end with equal marginal cost.
pub fn dispatch(units: &[&Unit], demand: f64, epsilon: f64) -> Result<Vec<f64>> {
    let target = dispatch_target(units, demand, epsilon)?;
    let mut lo = units.iter().map(|u| u.marginal_cost(u.p_min)).fold(f64::INFINITY, f64::min);
    let mut hi = units.iter().map(|u| u.marginal_cost(u.p_max)).fold(f64::NEG_INFINITY, f64::max);
    let total = |lambda: f64| units.iter().map(|u| output_at(u, lambda)).sum::<f64>();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if total(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut out: Vec<f64> = units.iter().map(|u| output_at(u, hi)).collect();

    // hand the rounding residue to a unit with room, keeping the balance exact
    let residue = target - out.iter().sum::<f64>();
    if residue != 0.0 {
        if let Some(k) = (0..units.len()).find(|&k| {
            let v = out[k] + residue;
            v >= units[k].p_min && v <= units[k].p_max
        }) {
            out[k] += residue;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ucp::UcpInstance;
    use approx::assert_relative_eq;

    #[test]
    fn single_unit_takes_the_demand() {
        let inst = UcpInstance::ten_unit();
        let u = &inst.units[2];
        assert_eq!(dispatch(&[u], 100.0, 0.0).unwrap(), vec![100.0]);
        // epsilon lets the unit run at the bottom of the window
        assert_relative_eq!(dispatch(&[u], 100.0, 0.05).unwrap()[0], 95.0);
        // and at p_min when the window allows it
        assert_relative_eq!(dispatch(&[u], 20.5, 0.05).unwrap()[0], 20.0);
    }

    #[test]
    fn identical_units_split_evenly() {
        let inst = UcpInstance::ten_unit();
        let u = &inst.units[0];
        let out = dispatch(&[u, u], 600.0, 0.0).unwrap();
        assert_relative_eq!(out[0], 300.0, epsilon = 1e-9);
        assert_relative_eq!(out[1], 300.0, epsilon = 1e-9);
    }

    #[test]
    fn two_big_units_equalize_marginal_cost() {
        // oracle: solve b1 + 2 c1 P1 = b2 + 2 c2 P2 with P1 + P2 = 700 directly,
        // then clamp (P1 would exceed 455 so unit 1 sits at its limit)
        let inst = UcpInstance::ten_unit();
        let (u1, u2) = (&inst.units[0], &inst.units[1]);
        let p1_free = (u2.b - u1.b + 2.0 * u2.c * 700.0) / (2.0 * (u1.c + u2.c));
        assert!(p1_free > u1.p_max);
        let out = dispatch(&[u1, u2], 700.0, 0.0).unwrap();
        assert_relative_eq!(out[0], 455.0, epsilon = 1e-9);
        assert_relative_eq!(out[1], 245.0, epsilon = 1e-9);
        assert_relative_eq!(out.iter().sum::<f64>(), 700.0, epsilon = 1e-9);
    }

    #[test]
    fn interior_solution_matches_closed_form() {
        let inst = UcpInstance::ten_unit();
        let (u3, u4) = (&inst.units[2], &inst.units[3]);
        let demand = 150.0;
        let p3 = (u4.b - u3.b + 2.0 * u4.c * demand) / (2.0 * (u3.c + u4.c));
        let out = dispatch(&[u3, u4], demand, 0.0).unwrap();
        assert_relative_eq!(out[0], p3, epsilon = 1e-6);
        assert_relative_eq!(out[1], demand - p3, epsilon = 1e-6);
        assert!((u3.marginal_cost(out[0]) - u4.marginal_cost(out[1])).abs() < 1e-6);
    }

    #[test]
    fn kkt_on_full_system() {
        let inst = UcpInstance::ten_unit();
        let units: Vec<&Unit> = inst.units.iter().collect();
        for &demand in &inst.demand {
            let out = dispatch(&units, demand, 0.0).unwrap();
            assert_relative_eq!(out.iter().sum::<f64>(), demand, epsilon = 1e-6);
            let free: Vec<f64> = units
                .iter()
                .zip(&out)
                .filter(|(u, &p)| p > u.p_min + 1e-7 && p < u.p_max - 1e-7)
                .map(|(u, &p)| u.marginal_cost(p))
                .collect();
            for w in free.windows(2) {
                assert!((w[0] - w[1]).abs() < 1e-6, "{free:?}");
            }
        }
    }

    #[test]
    fn infeasible_window() {
        let inst = UcpInstance::ten_unit();
        let u = &inst.units[0];
        assert!(matches!(dispatch(&[u], 100.0, 0.0), Err(Error::DispatchInfeasible { .. })));
        assert!(matches!(dispatch(&[u], 500.0, 0.0), Err(Error::DispatchInfeasible { .. })));
        assert!(dispatch(&[], 500.0, 0.0).is_err());
    }
}
