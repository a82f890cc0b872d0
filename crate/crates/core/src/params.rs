//! Input parameters of the two-depot system and the decision vector.

use crate::error::{Error, Result};

/// Annual operating hours assumed by the idle-power energy terms.
pub const DEFAULT_OPERATING_HOURS: f64 = 2400.0;

/// Diesel burned per round trip: 300 miles at 4 miles per gallon.
pub const DEFAULT_GALLONS_PER_TRIP: f64 = 75.0;

/// Emission cost per gallon that reproduces the published GHG total of the
/// emissions case when the truck carries one year of demand in a single trip.
pub const FITTED_EMISSION_PER_GALLON: f64 = 0.1547;

/// Demand and return-flow parameters of the primary and secondary markets.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    /// Demand rate for new items.
    pub demand_new: f64,
    /// Demand rate for repaired items.
    pub demand_repaired: f64,
    /// Share of sold new items that come back, in (0, 1].
    pub collect_new: f64,
    /// Share of returned new items that are repairable, in [0, 1].
    pub quality_new: f64,
    /// Share of sold repaired items that come back, in [0, 1].
    pub collect_repaired: f64,
}

/// Setup and holding costs of the supply and repair depots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostParams {
    pub setup_supply: f64,
    pub setup_repair: f64,
    pub holding_supply: f64,
    pub holding_repair: f64,
}

/// Convex emission curve `quadratic * x^2 - linear * x + constant` of a
/// process rate `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionCurve {
    pub quadratic: f64,
    pub linear: f64,
    pub constant: f64,
}

impl EmissionCurve {
    pub fn eval(&self, rate: f64) -> f64 {
        self.quadratic * rate * rate - self.linear * rate + self.constant
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmissionParams {
    pub production: EmissionCurve,
    pub remanufacturing: EmissionCurve,
    /// Units carried per truck trip.
    pub truck_capacity: f64,
    pub gallons_per_trip: f64,
    pub emission_per_gallon: f64,
    /// Price of one unit of emissions.
    pub cost_per_emission: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyParams {
    /// kWh needed to produce one new unit.
    pub per_unit_production: f64,
    /// kWh needed to repair one unit.
    pub per_unit_remanufacturing: f64,
    /// Idle power of the production machine (kW).
    pub idle_power_production: f64,
    /// Idle power of the repair machine (kW).
    pub idle_power_remanufacturing: f64,
    pub operating_hours: f64,
    pub price: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub market: MarketParams,
    pub cost: CostParams,
    pub emission: Option<EmissionParams>,
    pub energy: Option<EnergyParams>,
}

/// Production lot, repair lot, the two cycle counts and the quality level
/// of returns coming back from the secondary market.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub production_lot: u32,
    pub repair_lot: u32,
    pub repair_cycles: u32,
    pub production_cycles: u32,
    pub return_quality: f64,
}

impl Decision {
    pub fn new(
        production_lot: u32,
        repair_lot: u32,
        repair_cycles: u32,
        production_cycles: u32,
        return_quality: f64,
    ) -> Self {
        Decision {
            production_lot,
            repair_lot,
            repair_cycles,
            production_cycles,
            return_quality,
        }
    }

    /// Integers at least one and return quality inside [0, 1].
    pub fn in_bounds(&self) -> bool {
        self.production_lot >= 1
            && self.repair_lot >= 1
            && self.repair_cycles >= 1
            && self.production_cycles >= 1
            && (0.0..=1.0).contains(&self.return_quality)
    }

    /// Total units produced over the production span.
    pub fn total_production(&self) -> f64 {
        f64::from(self.production_cycles) * f64::from(self.production_lot)
    }

    /// Total units repaired over the repair span.
    pub fn total_repair(&self) -> f64 {
        f64::from(self.repair_cycles) * f64::from(self.repair_lot)
    }
}

fn check(name: &'static str, ok: bool, reason: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: reason.to_string(),
        })
    }
}

impl MarketParams {
    pub fn validate(&self) -> Result<()> {
        check("D_p", self.demand_new > 0.0, "demand rate must be positive")?;
        check("D_r", self.demand_repaired > 0.0, "demand rate must be positive")?;
        check(
            "p",
            self.collect_new > 0.0 && self.collect_new <= 1.0,
            "collection proportion must lie in (0, 1]",
        )?;
        check(
            "q",
            (0.0..=1.0).contains(&self.quality_new),
            "quality level must lie in [0, 1]",
        )?;
        check(
            "r",
            (0.0..=1.0).contains(&self.collect_repaired),
            "collection proportion must lie in [0, 1]",
        )
    }
}

impl CostParams {
    pub fn validate(&self) -> Result<()> {
        check("S_p", self.setup_supply > 0.0, "setup cost must be positive")?;
        check("S_r", self.setup_repair > 0.0, "setup cost must be positive")?;
        check("h_p", self.holding_supply > 0.0, "holding cost must be positive")?;
        check("h_r", self.holding_repair > 0.0, "holding cost must be positive")
    }

    /// Multiply every setup and holding cost by `factor`.
    pub fn scaled(&self, factor: f64) -> CostParams {
        CostParams {
            setup_supply: self.setup_supply * factor,
            setup_repair: self.setup_repair * factor,
            holding_supply: self.holding_supply * factor,
            holding_repair: self.holding_repair * factor,
        }
    }
}

impl EmissionParams {
    pub fn validate(&self) -> Result<()> {
        check("a_p", self.production.quadratic > 0.0, "curve must be strictly convex")?;
        check(
            "a_r",
            self.remanufacturing.quadratic > 0.0,
            "curve must be strictly convex",
        )?;
        check("t_c", self.truck_capacity >= 1.0, "truck capacity must be at least 1")?;
        check("g_t", self.gallons_per_trip >= 0.0, "must be non-negative")?;
        check("e_t", self.emission_per_gallon >= 0.0, "must be non-negative")?;
        check("C_GHG", self.cost_per_emission >= 0.0, "must be non-negative")
    }
}

impl EnergyParams {
    /// Energy block with the default 2400 operating hours.
    pub fn new(
        per_unit_production: f64,
        per_unit_remanufacturing: f64,
        idle_power_production: f64,
        idle_power_remanufacturing: f64,
        price: f64,
    ) -> Self {
        EnergyParams {
            per_unit_production,
            per_unit_remanufacturing,
            idle_power_production,
            idle_power_remanufacturing,
            operating_hours: DEFAULT_OPERATING_HOURS,
            price,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check("K_p", self.per_unit_production >= 0.0, "must be non-negative")?;
        check("K_r", self.per_unit_remanufacturing >= 0.0, "must be non-negative")?;
        check("W_p", self.idle_power_production >= 0.0, "must be non-negative")?;
        check("W_r", self.idle_power_remanufacturing >= 0.0, "must be non-negative")?;
        check("H", self.operating_hours > 0.0, "operating hours must be positive")?;
        check("C_ENG", self.price >= 0.0, "must be non-negative")
    }
}

impl SystemParams {
    pub fn new(market: MarketParams, cost: CostParams) -> Self {
        SystemParams {
            market,
            cost,
            emission: None,
            energy: None,
        }
    }

    pub fn with_emission(mut self, emission: EmissionParams) -> Self {
        self.emission = Some(emission);
        self
    }

    pub fn with_energy(mut self, energy: EnergyParams) -> Self {
        self.energy = Some(energy);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.market.validate()?;
        self.cost.validate()?;
        if let Some(e) = &self.emission {
            e.validate()?;
        }
        if let Some(e) = &self.energy {
            e.validate()?;
        }
        Ok(())
    }

    pub fn emission(&self) -> Result<&EmissionParams> {
        self.emission.as_ref().ok_or(Error::MissingBlock("emission"))
    }

    pub fn energy(&self) -> Result<&EnergyParams> {
        self.energy.as_ref().ok_or(Error::MissingBlock("energy"))
    }
}

/// Reference parameter sets used by the examples, tests and benches.
pub mod presets {
    use super::*;

    /// Equal primary and secondary demand of 250 with expensive setups.
    pub fn base_case() -> SystemParams {
        SystemParams::new(
            MarketParams {
                demand_new: 250.0,
                demand_repaired: 250.0,
                collect_new: 0.8,
                quality_new: 0.9,
                collect_repaired: 0.8,
            },
            CostParams {
                setup_supply: 2400.0,
                setup_repair: 1400.0,
                holding_supply: 5.0,
                holding_repair: 2.0,
            },
        )
    }

    /// Monthly market with cheap setups and the quadratic emission curves.
    ///
    /// The transport block is not published for this case: a single truck
    /// carries the combined demand and the emission cost per gallon is the
    /// fitted [`FITTED_EMISSION_PER_GALLON`].
    pub fn emissions_case() -> SystemParams {
        let market = MarketParams {
            demand_new: 1000.0,
            demand_repaired: 422.0,
            collect_new: 0.6,
            quality_new: 0.9,
            collect_repaired: 0.7,
        };
        let curve = EmissionCurve {
            quadratic: 0.003,
            linear: 0.12,
            constant: 1.4,
        };
        SystemParams::new(
            market,
            CostParams {
                setup_supply: 50.0,
                setup_repair: 40.0,
                holding_supply: 15.0,
                holding_repair: 15.0,
            },
        )
        .with_emission(EmissionParams {
            production: curve,
            remanufacturing: curve,
            truck_capacity: market.demand_new + market.demand_repaired,
            gallons_per_trip: DEFAULT_GALLONS_PER_TRIP,
            emission_per_gallon: FITTED_EMISSION_PER_GALLON,
            cost_per_emission: 2.0,
        })
    }

    /// The emissions case with an illustrative energy block. Machine data
    /// for this case is unpublished; these values give energy costs of the
    /// same magnitude as the reported front.
    pub fn energy_case() -> SystemParams {
        emissions_case().with_energy(EnergyParams::new(10.0, 10.0, 2.0, 2.0, 1.0))
    }
}
