//! Greenhouse-gas and energy objectives driven by the process rates.

use crate::error::Result;
use crate::model::{production_rate, rate_factor, remanufacturing_rate};
use crate::params::{Decision, EmissionParams, MarketParams, SystemParams};

/// Emissions of production running at `rate`.
pub fn ghg_production(e: &EmissionParams, rate: f64) -> f64 {
    e.production.eval(rate)
}

/// Emissions of remanufacturing running at `rate`.
pub fn ghg_remanufacturing(e: &EmissionParams, rate: f64) -> f64 {
    e.remanufacturing.eval(rate)
}

/// Transport emissions: trucks needed for the combined demand times the
/// diesel burned per trip times the emission charge per gallon. Does not
/// depend on the decision.
pub fn ghg_transport(e: &EmissionParams, market: &MarketParams) -> f64 {
    (market.demand_new + market.demand_repaired) / e.truck_capacity
        * e.gallons_per_trip
        * e.emission_per_gallon
}

/// Per-source emissions and energy use of one decision, with their costs.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnvBreakdown {
    pub g_prod: f64,
    pub g_reman: f64,
    pub g_transport: f64,
    pub g_total_cost: f64,
    pub e_prod: f64,
    pub e_reman: f64,
    pub e_total_cost: f64,
}

pub fn ghg_cost(params: &SystemParams, d: &Decision) -> Result<f64> {
    let e = params.emission()?;
    let p = production_rate(params, d.production_lot, d.production_cycles)?;
    let lambda = remanufacturing_rate(params, d.repair_lot, d.repair_cycles)?;
    let total = ghg_production(e, p) + ghg_remanufacturing(e, lambda) + ghg_transport(e, &params.market);
    Ok(total * e.cost_per_emission)
}

/// Annual kWh of production: per-unit energy plus idle power over the
/// operating hours, for every unit of the `n` lots.
pub fn energy_production(params: &SystemParams, d: &Decision) -> Result<f64> {
    let en = params.energy()?;
    production_rate(params, d.production_lot, d.production_cycles)?;
    let mk = &params.market;
    let c = &params.cost;
    let total = d.total_production();
    let factor = rate_factor(mk.demand_new, c.setup_supply, c.holding_supply, total);
    Ok((en.per_unit_production + en.operating_hours * en.idle_power_production * factor / mk.demand_new) * total)
}

/// Annual kWh of remanufacturing.
pub fn energy_remanufacturing(params: &SystemParams, d: &Decision) -> Result<f64> {
    let en = params.energy()?;
    remanufacturing_rate(params, d.repair_lot, d.repair_cycles)?;
    let mk = &params.market;
    let c = &params.cost;
    let total = d.total_repair();
    let factor = rate_factor(mk.demand_repaired, c.setup_repair, c.holding_repair, total);
    Ok((en.per_unit_remanufacturing
        + en.operating_hours * en.idle_power_remanufacturing * factor / mk.demand_repaired)
        * total)
}

pub fn energy_cost(params: &SystemParams, d: &Decision) -> Result<f64> {
    let price = params.energy()?.price;
    Ok((energy_production(params, d)? + energy_remanufacturing(params, d)?) * price)
}

/// Everything the blocks present in `params` allow to be computed.
pub fn breakdown(params: &SystemParams, d: &Decision) -> Result<EnvBreakdown> {
    let p = production_rate(params, d.production_lot, d.production_cycles)?;
    let lambda = remanufacturing_rate(params, d.repair_lot, d.repair_cycles)?;
    let mut out = EnvBreakdown::default();
    if let Some(e) = &params.emission {
        out.g_prod = ghg_production(e, p);
        out.g_reman = ghg_remanufacturing(e, lambda);
        out.g_transport = ghg_transport(e, &params.market);
        out.g_total_cost = (out.g_prod + out.g_reman + out.g_transport) * e.cost_per_emission;
    }
    if let Some(en) = &params.energy {
        out.e_prod = energy_production(params, d)?;
        out.e_reman = energy_remanufacturing(params, d)?;
        out.e_total_cost = (out.e_prod + out.e_reman) * en.price;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{presets, EnergyParams};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn production_emissions() {
        let p = presets::emissions_case();
        let e = p.emission().unwrap();
        assert!(close(ghg_production(e, 1006.71), 2920.99, 0.01));
        assert!(close(ghg_production(e, 20.0), 0.2, 1e-12));
        let flat = EmissionParams {
            production: crate::params::EmissionCurve {
                quadratic: 0.0,
                linear: 0.0,
                constant: 1.4,
            },
            ..*e
        };
        assert_eq!(ghg_production(&flat, 123.0), 1.4);
    }

    #[test]
    fn remanufacturing_emissions() {
        let p = presets::emissions_case();
        let e = p.emission().unwrap();
        assert!(close(ghg_remanufacturing(e, 424.99), 492.2, 0.1));
        assert!(close(ghg_remanufacturing(e, 20.0), 0.2, 1e-12));
    }

    #[test]
    fn transport_emissions() {
        let p = presets::emissions_case();
        let mut e = *p.emission().unwrap();
        assert!(close(ghg_transport(&e, &p.market), 11.6025, 1e-9));
        e.emission_per_gallon = 1.0;
        assert!(close(ghg_transport(&e, &p.market), 75.0, 1e-12));
        e.gallons_per_trip = 0.0;
        assert_eq!(ghg_transport(&e, &p.market), 0.0);
    }

    #[test]
    fn ghg_cost_anchor() {
        let p = presets::emissions_case();
        let g = ghg_cost(&p, &Decision::new(1000, 566, 1, 1, 1.0)).unwrap();
        assert!(((g - 6849.22) / 6849.22).abs() < 0.01, "{g}");
    }

    #[test]
    fn free_emissions_cost_nothing() {
        let mut p = presets::emissions_case();
        p.emission.as_mut().unwrap().cost_per_emission = 0.0;
        assert_eq!(ghg_cost(&p, &Decision::new(1000, 566, 1, 1, 1.0)).unwrap(), 0.0);
    }

    #[test]
    fn ghg_falls_with_lot_size() {
        let p = presets::emissions_case();
        let mut prev = f64::INFINITY;
        for qp in (1000..1500).step_by(25) {
            let g = ghg_cost(&p, &Decision::new(qp, 566, 1, 1, 1.0)).unwrap();
            assert!(g < prev);
            prev = g;
        }
    }

    fn unit_energy() -> SystemParams {
        presets::emissions_case().with_energy(EnergyParams::new(1.0, 1.0, 1.0, 1.0, 1.0))
    }

    #[test]
    fn energy_components() {
        let p = unit_energy();
        let d = Decision::new(1000, 566, 1, 1, 1.0);
        let ep = energy_production(&p, &d).unwrap();
        let er = energy_remanufacturing(&p, &d).unwrap();
        assert!(close(ep, 3384.0, 1e-9), "{ep}");
        // (1 + 2400 * 0.99297448 / 422) * 566
        assert!(close(er, 3762.3425, 1e-3), "{er}");
        assert!(close(energy_cost(&p, &d).unwrap(), 7146.3425, 1e-3));
    }

    #[test]
    fn no_idle_power_is_per_unit_energy() {
        let p = presets::emissions_case().with_energy(EnergyParams::new(3.0, 2.0, 0.0, 0.0, 1.0));
        let d = Decision::new(700, 300, 2, 3, 0.3);
        assert!(close(energy_production(&p, &d).unwrap(), 3.0 * 2100.0, 1e-9));
        assert!(close(energy_remanufacturing(&p, &d).unwrap(), 2.0 * 600.0, 1e-9));
        let mut free = p;
        free.energy.as_mut().unwrap().price = 0.0;
        assert_eq!(energy_cost(&free, &d).unwrap(), 0.0);
    }

    #[test]
    fn per_unit_energy_approaches_asymptote() {
        let p = unit_energy();
        let limit = 1.0 + 2400.0 / 1000.0;
        let mut prev_total = 0.0;
        for qp in [100u32, 1000, 10_000, 100_000] {
            let d = Decision::new(qp, 566, 1, 1, 1.0);
            let total = energy_production(&p, &d).unwrap();
            let per_unit = total / f64::from(qp);
            assert!(per_unit < limit);
            assert!(total > prev_total);
            prev_total = total;
        }
        let d = Decision::new(1_000_000, 566, 1, 1, 1.0);
        assert!(close(energy_production(&p, &d).unwrap() / 1e6, limit, 1e-6));
    }

    #[test]
    fn smallest_valid_repair_lot_uses_energy() {
        let p = unit_energy();
        // threshold sqrt(2*40*422/15) ~ 47.4
        let d = Decision::new(1000, 48, 1, 1, 1.0);
        assert!(energy_remanufacturing(&p, &d).unwrap() > 0.0);
        assert!(energy_remanufacturing(&p, &Decision::new(1000, 47, 1, 1, 1.0)).is_err());
    }

    #[test]
    fn breakdown_sums_to_costs() {
        let p = presets::energy_case();
        let d = Decision::new(1100, 600, 1, 1, 1.0);
        let b = breakdown(&p, &d).unwrap();
        assert!(close(b.g_total_cost, ghg_cost(&p, &d).unwrap(), 1e-9));
        assert!(close(b.e_total_cost, energy_cost(&p, &d).unwrap(), 1e-9));
    }
}
