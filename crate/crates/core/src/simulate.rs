//! Piecewise-linear depot levels over one full cycle, integrated exactly.
//!
//! The supply depot runs `n` production saw-teeth and then `m` repair
//! saw-teeth. The repair depot fills with repairable returns while new items
//! are produced. When the repair span starts, only the stock that the `m`
//! repair cycles actually consume is carried forward; any surplus is dropped
//! in a zero-width step at the end of the production span. With that
//! convention the last repair lot empties the depot exactly.

use crate::error::{Error, Result};
use crate::model::{balance_lhs, derive};
use crate::params::{Decision, SystemParams};

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Non-decreasing breakpoint instants. A repeated instant marks the
    /// surplus drop at the end of the production span.
    pub times: Vec<f64>,
    pub supply_levels: Vec<f64>,
    pub repair_levels: Vec<f64>,
    pub supply_area: f64,
    pub repair_area: f64,
    /// Repairable stock discarded when the repair span starts.
    pub surplus: f64,
}

impl Trajectory {
    fn push(&mut self, t: f64, supply: f64, repair: f64) {
        self.times.push(t);
        self.supply_levels.push(supply);
        self.repair_levels.push(repair);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

fn trapezoid(times: &[f64], levels: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(levels.windows(2))
        .map(|(t, y)| 0.5 * (t[1] - t[0]) * (y[0] + y[1]))
        .sum()
}

pub fn simulate_trajectories(params: &SystemParams, d: &Decision) -> Result<Trajectory> {
    let r = derive(params, d)?;
    let mk = &params.market;
    let qp = f64::from(d.production_lot);
    let qr = f64::from(d.repair_lot);
    let tol = 1e-9 * (1.0 + d.total_repair() + d.total_production());

    let mut traj = Trajectory {
        times: Vec::new(),
        supply_levels: Vec::new(),
        repair_levels: Vec::new(),
        supply_area: 0.0,
        repair_area: 0.0,
        surplus: 0.0,
    };
    traj.push(0.0, 0.0, 0.0);

    let produce = qp / r.production_rate;
    let sell_new = qp / mk.demand_new;
    let new_peak = (r.production_rate - mk.demand_new) * produce;
    let mut t = 0.0;
    for k in 1..=d.production_cycles {
        let start = f64::from(k - 1) * sell_new;
        let peak_at = start + produce;
        traj.push(peak_at, new_peak, r.returns_from_new * peak_at);
        t = f64::from(k) * sell_new;
        traj.push(t, 0.0, r.returns_from_new * t);
    }

    let collected = r.returns_from_new * t;
    let required = balance_lhs(params, d, r.repair_rate);
    if collected + tol < required {
        return Err(Error::InfeasibleDecision {
            depot: "repair",
            time: t,
            level: collected - required,
        });
    }
    traj.surplus = (collected - required).max(0.0);
    if traj.surplus > 0.0 {
        traj.push(t, 0.0, required);
    }

    let repair = qr / r.repair_rate;
    let sell_repaired = qr / mk.demand_repaired;
    let repaired_peak = (r.repair_rate - mk.demand_repaired) * repair;
    let drain = (r.repair_rate - r.returns_from_repaired) * repair;
    let refill = r.returns_from_repaired * (sell_repaired - repair);
    let span_start = t;
    let mut level = required;
    for k in 1..=d.repair_cycles {
        let start = span_start + f64::from(k - 1) * sell_repaired;
        level -= drain;
        if level < -tol {
            return Err(Error::InfeasibleDecision {
                depot: "repair",
                time: start + repair,
                level,
            });
        }
        traj.push(start + repair, repaired_peak, level);
        level += refill;
        t = span_start + f64::from(k) * sell_repaired;
        traj.push(t, 0.0, level);
    }

    traj.supply_area = trapezoid(&traj.times, &traj.supply_levels);
    traj.repair_area = trapezoid(&traj.times, &traj.repair_levels);
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{repair_depot_area, supply_depot_area};
    use crate::params::presets;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn single_cycles_match_closed_form() {
        let p = presets::base_case();
        let d = Decision::new(911, 700, 1, 1, 1.0);
        let traj = simulate_trajectories(&p, &d).unwrap();
        assert!(rel(traj.supply_area, supply_depot_area(&p, &d).unwrap()) < 1e-3);
        assert!(rel(traj.repair_area, repair_depot_area(&p, &d).unwrap()) < 1e-3);
    }

    #[test]
    fn times_non_decreasing_and_levels_non_negative() {
        let p = presets::base_case();
        let traj = simulate_trajectories(&p, &Decision::new(911, 1525, 2, 1, 1.0)).unwrap();
        assert!(traj.times.windows(2).all(|w| w[1] >= w[0]));
        assert!(traj.supply_levels.iter().all(|&l| l >= 0.0));
        assert!(traj.repair_levels.iter().all(|&l| l >= -1e-6));
        let end = *traj.times.last().unwrap();
        assert!((end - 15.844).abs() < 1e-9);
    }

    #[test]
    fn zero_setups_leave_supply_empty() {
        let mut p = presets::base_case();
        p.cost.setup_supply = 0.0;
        p.cost.setup_repair = 0.0;
        let traj = simulate_trajectories(&p, &Decision::new(900, 600, 1, 1, 1.0)).unwrap();
        assert_eq!(traj.supply_area, 0.0);
    }

    #[test]
    fn balance_violation_is_infeasible() {
        let p = presets::base_case();
        let err = simulate_trajectories(&p, &Decision::new(911, 1525, 10, 1, 1.0)).unwrap_err();
        assert!(matches!(err, Error::InfeasibleDecision { depot: "repair", .. }));
    }

    #[test]
    fn tight_balance_matches_closed_form_for_many_cycles() {
        // At the base optimum the balance is active, so nothing is dropped
        // and the carried-stock term agrees with the simulation.
        let p = presets::base_case();
        let d = Decision::new(911, 1525, 2, 1, 1.0);
        let traj = simulate_trajectories(&p, &d).unwrap();
        assert!(traj.surplus < 0.1);
        assert!(rel(traj.repair_area, repair_depot_area(&p, &d).unwrap()) < 1e-3);
    }
}
