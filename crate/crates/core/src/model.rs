//! Rates, cycle lengths, the return-balance constraint and the inventory
//! cost rate of the two-depot system.

use crate::error::{Error, Process, Result};
use crate::params::{Decision, SystemParams};

/// Absolute slack allowed on the return-balance constraint.
pub const BALANCE_SLACK: f64 = 1e-9;

/// `1 - 2 S D / (h L^2)` for a total lot `L`. Positive exactly when the
/// process rate is finite.
pub fn rate_factor(demand: f64, setup: f64, holding: f64, total_lot: f64) -> f64 {
    1.0 - 2.0 * setup * demand / (holding * total_lot * total_lot)
}

fn rate(
    process: Process,
    demand: f64,
    setup: f64,
    holding: f64,
    total_lot: f64,
) -> Result<f64> {
    let factor = rate_factor(demand, setup, holding, total_lot);
    if factor > 0.0 {
        Ok(demand / factor)
    } else {
        Err(Error::DenominatorNonPositive {
            process,
            total_lot,
            threshold: (2.0 * setup * demand / holding).sqrt(),
        })
    }
}

/// Production rate induced by `cycles` production lots of size `lot`.
pub fn production_rate(params: &SystemParams, lot: u32, cycles: u32) -> Result<f64> {
    let m = &params.market;
    let c = &params.cost;
    rate(
        Process::Production,
        m.demand_new,
        c.setup_supply,
        c.holding_supply,
        f64::from(cycles) * f64::from(lot),
    )
}

/// Remanufacturing rate induced by `cycles` repair lots of size `lot`.
pub fn remanufacturing_rate(params: &SystemParams, lot: u32, cycles: u32) -> Result<f64> {
    let m = &params.market;
    let c = &params.cost;
    rate(
        Process::Remanufacturing,
        m.demand_repaired,
        c.setup_repair,
        c.holding_repair,
        f64::from(cycles) * f64::from(lot),
    )
}

/// Quantities that follow from a decision.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates {
    pub production_rate: f64,
    pub repair_rate: f64,
    /// Length of the new-items span.
    pub production_span: f64,
    /// Length of the repaired-items span.
    pub repair_span: f64,
    pub cycle: f64,
    /// Repairable returns generated by new items.
    pub returns_from_new: f64,
    /// Repairable returns generated by repaired items.
    pub returns_from_repaired: f64,
}

pub fn derive(params: &SystemParams, d: &Decision) -> Result<DerivedRates> {
    let mk = &params.market;
    let production_rate = production_rate(params, d.production_lot, d.production_cycles)?;
    let repair_rate = remanufacturing_rate(params, d.repair_lot, d.repair_cycles)?;
    let production_span = d.total_production() / mk.demand_new;
    let repair_span = d.total_repair() / mk.demand_repaired;
    Ok(DerivedRates {
        production_rate,
        repair_rate,
        production_span,
        repair_span,
        cycle: production_span + repair_span,
        returns_from_new: mk.collect_new * mk.quality_new * mk.demand_new,
        returns_from_repaired: d.return_quality * mk.collect_repaired * mk.demand_repaired,
    })
}

/// Outcome of checking a decision against every constraint of the model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeasibilityReport {
    pub production_rate_valid: bool,
    pub repair_rate_valid: bool,
    /// Repair stock consumed over the repair span. `None` when the repair
    /// rate is undefined.
    pub lhs: Option<f64>,
    /// Repairable stock collected over the production span.
    pub rhs: f64,
    pub return_balance_ok: bool,
    pub bounds_ok: bool,
    /// Present only when the demand cap is enforced.
    pub demand_cap_ok: Option<bool>,
}

impl FeasibilityReport {
    pub fn rate_denominators_valid(&self) -> bool {
        self.production_rate_valid && self.repair_rate_valid
    }

    pub fn is_feasible(&self) -> bool {
        self.rate_denominators_valid()
            && self.return_balance_ok
            && self.bounds_ok
            && self.demand_cap_ok.unwrap_or(true)
    }

    /// `rhs - lhs`, the unused repairable stock.
    pub fn balance_slack(&self) -> Option<f64> {
        self.lhs.map(|lhs| self.rhs - lhs)
    }
}

/// Left side of the return-balance constraint for a known repair rate.
pub fn balance_lhs(params: &SystemParams, d: &Decision, repair_rate: f64) -> f64 {
    let mk = &params.market;
    let qr = f64::from(d.repair_lot);
    let sr = d.return_quality * mk.collect_repaired;
    d.total_repair() * (1.0 - sr) + (qr / repair_rate) * (repair_rate - mk.demand_repaired) * sr
}

/// Right side of the return-balance constraint: repairable stock gathered
/// while producing new items.
pub fn balance_rhs(params: &SystemParams, d: &Decision) -> f64 {
    let mk = &params.market;
    d.total_production() * mk.collect_new * mk.quality_new
}

pub fn check_feasibility(
    params: &SystemParams,
    d: &Decision,
    enforce_demand_cap: bool,
) -> FeasibilityReport {
    let production_rate_valid = production_rate(params, d.production_lot, d.production_cycles).is_ok();
    let repair = remanufacturing_rate(params, d.repair_lot, d.repair_cycles);
    let lhs = repair.as_ref().ok().map(|&lambda| balance_lhs(params, d, lambda));
    let rhs = balance_rhs(params, d);
    let return_balance_ok = matches!(lhs, Some(l) if l <= rhs + BALANCE_SLACK);
    let demand_cap_ok = enforce_demand_cap.then(|| {
        params.market.demand_new >= d.total_production()
            && params.market.demand_repaired >= d.total_repair()
    });
    FeasibilityReport {
        production_rate_valid,
        repair_rate_valid: repair.is_ok(),
        lhs,
        rhs,
        return_balance_ok,
        bounds_ok: d.in_bounds(),
        demand_cap_ok,
    }
}

/// Inventory cost per unit time: setups plus holding at both depots,
/// averaged over the full cycle.
pub fn inventory_cost(params: &SystemParams, d: &Decision) -> Result<f64> {
    let r = derive(params, d)?;
    let mk = &params.market;
    let c = &params.cost;
    let (qp, qr) = (f64::from(d.production_lot), f64::from(d.repair_lot));
    let (m, n) = (f64::from(d.repair_cycles), f64::from(d.production_cycles));
    let (p, lambda) = (r.production_rate, r.repair_rate);
    let (tp, tr) = (r.production_span, r.repair_span);
    let (r1, r2) = (r.returns_from_new, r.returns_from_repaired);
    let sr = d.return_quality * mk.collect_repaired;
    let dr = mk.demand_repaired;

    let setups = m * c.setup_repair + n * c.setup_supply;
    let supply = tp * qp * (p - mk.demand_new) / (2.0 * p) + tr * qr * (lambda - dr) / (2.0 * lambda);
    let repair = r1 * tp * tp / 2.0
        + m * qr * qr * (lambda - r2) / (2.0 * lambda * lambda)
        + sr * qr * tr * (1.0 - dr / lambda).powi(2) / 2.0
        + (1.0 - 1.0 / m)
            * tr
            * (tp * r1 - (qr / lambda) * (lambda - r2) - (m - 2.0) * qr * (1.0 - sr) / 2.0);
    Ok((setups + supply * c.holding_supply + repair * c.holding_repair) / r.cycle)
}

/// Area under the supply-depot level: `n` production saw-teeth followed by
/// `m` repair saw-teeth.
pub fn supply_depot_area(params: &SystemParams, d: &Decision) -> Result<f64> {
    let r = derive(params, d)?;
    let mk = &params.market;
    let (qp, qr) = (f64::from(d.production_lot), f64::from(d.repair_lot));
    let production_peak = qp * (r.production_rate - mk.demand_new) / r.production_rate;
    let repair_peak = qr * (r.repair_rate - mk.demand_repaired) / r.repair_rate;
    let production_tooth = 0.5 * (qp / mk.demand_new) * production_peak;
    let repair_tooth = 0.5 * (qr / mk.demand_repaired) * repair_peak;
    Ok(f64::from(d.production_cycles) * production_tooth + f64::from(d.repair_cycles) * repair_tooth)
}

/// Term of the repair-depot area that carries stock across repair cycles.
/// Zero for a single repair cycle; can turn negative for many cycles with
/// almost complete secondary returns.
pub fn repair_carry_term(params: &SystemParams, d: &Decision) -> Result<f64> {
    let r = derive(params, d)?;
    Ok(carry_term(params, d, &r))
}

fn carry_term(params: &SystemParams, d: &Decision, r: &DerivedRates) -> f64 {
    let qr = f64::from(d.repair_lot);
    let m = f64::from(d.repair_cycles);
    let sr = d.return_quality * params.market.collect_repaired;
    let processing_drop = (qr / r.repair_rate) * (r.repair_rate - r.returns_from_repaired);
    (1.0 - 1.0 / m)
        * r.repair_span
        * (r.returns_from_new * r.production_span - processing_drop - (m - 2.0) * qr * (1.0 - sr) / 2.0)
}

/// Area under the repair-depot level: accumulation while producing, one
/// depletion and one refill triangle per repair cycle, and the carried stock.
pub fn repair_depot_area(params: &SystemParams, d: &Decision) -> Result<f64> {
    let r = derive(params, d)?;
    let mk = &params.market;
    let qr = f64::from(d.repair_lot);
    let m = f64::from(d.repair_cycles);
    let lambda = r.repair_rate;
    let sr = d.return_quality * mk.collect_repaired;

    let accumulation = 0.5 * r.returns_from_new * r.production_span.powi(2);
    let depletion = 0.5 * m * (qr / lambda).powi(2) * (lambda - sr * mk.demand_repaired);
    let refill = 0.5 * sr * qr * r.repair_span * (1.0 - mk.demand_repaired / lambda).powi(2);
    Ok(accumulation + depletion + refill + carry_term(params, d, &r))
}

/// Warnings raised while evaluating a decision.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Diagnostics {
    pub negative_carry_term: bool,
    pub negative_repair_area: bool,
}

pub fn diagnose(params: &SystemParams, d: &Decision) -> Result<Diagnostics> {
    let r = derive(params, d)?;
    Ok(Diagnostics {
        negative_carry_term: carry_term(params, d, &r) < 0.0,
        negative_repair_area: repair_depot_area(params, d)? < 0.0,
    })
}
