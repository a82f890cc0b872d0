//! Flat `key = value` run configuration.
//!
//! Keys carry a dotted section prefix (`market.d_p`, `bounds.qp_max`). The
//! market and cost symbols may also be written bare (`d_p`, `h_r`). Keys
//! are case-insensitive, `#` starts a comment and unknown keys are errors.

use std::collections::HashMap;
use std::path::PathBuf;

use greenepq_core::params::{DEFAULT_GALLONS_PER_TRIP, DEFAULT_OPERATING_HOURS, FITTED_EMISSION_PER_GALLON};
use greenepq_core::pareto::DEFAULT_BRUTE_FORCE_CAP;
use greenepq_core::{
    Axis, CostParams, Decision, EmissionCurve, EmissionParams, EnergyParams, IntRange, MarketParams, ObjectivePair,
    ParamName, QualitySearch, SearchBounds, SystemParams,
};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("{}: {message}", location(*.line))]
    Parse { line: usize, message: String },
    #[error("invalid configuration: {0}")]
    Validation(String),
}

fn location(line: usize) -> String {
    if line == 0 {
        "--set".to_string()
    } else {
        format!("line {line}")
    }
}

type Result<T> = std::result::Result<T, ConfigError>;

const KEYS: &[&str] = &[
    "market.d_p",
    "market.d_r",
    "market.p",
    "market.q",
    "market.r",
    "cost.s_p",
    "cost.s_r",
    "cost.h_p",
    "cost.h_r",
    "emission.a_p",
    "emission.b_p",
    "emission.c_p",
    "emission.a_r",
    "emission.b_r",
    "emission.c_r",
    "emission.t_c",
    "emission.g_t",
    "emission.e_t",
    "emission.c_ghg",
    "energy.k_p",
    "energy.k_r",
    "energy.w_p",
    "energy.w_r",
    "energy.hours",
    "energy.c_eng",
    "bounds.qp_min",
    "bounds.qp_max",
    "bounds.qr_min",
    "bounds.qr_max",
    "bounds.m_min",
    "bounds.m_max",
    "bounds.n_min",
    "bounds.n_max",
    "bounds.s_min",
    "bounds.s_max",
    "bounds.s_grid",
    "bounds.s_search",
    "decision.qp",
    "decision.qr",
    "decision.m",
    "decision.n",
    "decision.s",
    "front.pair",
    "front.grid",
    "front.utopia",
    "front.reference",
    "brute.m",
    "brute.n",
    "brute.s",
    "brute.cap",
    "brute.enforce_balance",
    "sweep.axis1",
    "sweep.axis1_min",
    "sweep.axis1_max",
    "sweep.axis1_steps",
    "sweep.axis2",
    "sweep.axis2_min",
    "sweep.axis2_max",
    "sweep.axis2_steps",
    "model.enforce_demand_cap",
    "run.output",
    "run.workers",
];

const BARE_SECTIONS: &[&str] = &["market", "cost"];

fn canonical(key: &str) -> Option<&'static str> {
    let key = key.trim().to_ascii_lowercase();
    if let Some(k) = KEYS.iter().find(|k| **k == key) {
        return Some(k);
    }
    BARE_SECTIONS
        .iter()
        .find_map(|s| KEYS.iter().find(|k| k.strip_prefix(s).and_then(|r| r.strip_prefix('.')) == Some(&key)))
        .copied()
}

/// Raw key/value pairs with the line each came from. Line 0 marks a
/// command-line override.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    values: HashMap<&'static str, (String, usize)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            raw.insert(content, i + 1)?;
        }
        Ok(raw)
    }

    /// Applies one `key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        self.insert(assignment, 0)
    }

    fn insert(&mut self, assignment: &str, line: usize) -> Result<()> {
        let (key, value) = assignment.split_once('=').ok_or_else(|| ConfigError::Parse {
            line,
            message: format!("expected `key = value`, found `{assignment}`"),
        })?;
        let key = canonical(key).ok_or_else(|| ConfigError::Parse {
            line,
            message: format!("unknown key `{}`", key.trim()),
        })?;
        let value = value.trim();
        if value.is_empty() {
            return Err(ConfigError::Parse {
                line,
                message: format!("missing value for `{key}`"),
            });
        }
        self.values.insert(key, (value.to_string(), line));
        Ok(())
    }

    fn has_section(&self, section: &str) -> bool {
        self.values.keys().any(|k| k.split('.').next() == Some(section))
    }

    fn text(&self, key: &'static str) -> Option<(&str, usize)> {
        debug_assert!(KEYS.contains(&key));
        self.values.get(key).map(|(v, l)| (v.as_str(), *l))
    }

    fn parsed<T: std::str::FromStr>(&self, key: &'static str, what: &str) -> Result<Option<T>> {
        match self.text(key) {
            None => Ok(None),
            Some((v, line)) => v.parse().map(Some).map_err(|_| ConfigError::Parse {
                line,
                message: format!("`{key}` expects {what}, found `{v}`"),
            }),
        }
    }

    fn real(&self, key: &'static str) -> Result<Option<f64>> {
        self.parsed(key, "a number")
    }

    fn integer(&self, key: &'static str) -> Result<Option<u32>> {
        self.parsed(key, "a non-negative integer")
    }

    fn flag(&self, key: &'static str) -> Result<Option<bool>> {
        self.parsed(key, "true or false")
    }

    fn required(&self, key: &'static str, what: &str) -> Result<f64> {
        self.real(key)?
            .ok_or_else(|| ConfigError::Validation(format!("missing `{key}` ({what})")))
    }

    fn list(&self, key: &'static str, len: usize) -> Result<Option<Vec<f64>>> {
        let Some((v, line)) = self.text(key) else {
            return Ok(None);
        };
        let err = || ConfigError::Parse {
            line,
            message: format!("`{key}` expects {len} comma-separated numbers, found `{v}`"),
        };
        let items: Vec<f64> = v
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| err())?;
        if items.len() != len {
            return Err(err());
        }
        Ok(Some(items))
    }
}

/// Parses `Q_p, Q_r, m, n, s`.
pub fn parse_decision(text: &str) -> Result<Decision> {
    let err = || ConfigError::Parse {
        line: 0,
        message: format!("decision must be `Qp,Qr,m,n,s`, found `{text}`"),
    };
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 5 {
        return Err(err());
    }
    let int = |s: &str| s.parse::<u32>().map_err(|_| err());
    let s: f64 = parts[4].parse().map_err(|_| err())?;
    Ok(Decision::new(int(parts[0])?, int(parts[1])?, int(parts[2])?, int(parts[3])?, s))
}

fn decision_from(values: &[f64]) -> Result<Decision> {
    let int = |x: f64| {
        if x >= 0.0 && x.fract() == 0.0 && x <= f64::from(u32::MAX) {
            Ok(x as u32)
        } else {
            Err(ConfigError::Validation(format!("`{x}` is not a valid integer decision component")))
        }
    };
    Ok(Decision::new(int(values[0])?, int(values[1])?, int(values[2])?, int(values[3])?, values[4]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontSettings {
    pub pair: ObjectivePair,
    pub grid_count: usize,
    pub utopia: Option<(f64, f64)>,
    pub reference: Option<Decision>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteSettings {
    pub repair_cycles: u32,
    pub production_cycles: u32,
    pub return_quality: f64,
    pub cap: u64,
    pub enforce_balance: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SystemParams,
    pub bounds: SearchBounds,
    pub decision: Option<Decision>,
    pub front: FrontSettings,
    pub brute: BruteSettings,
    pub sweep: Vec<Axis>,
    pub enforce_demand_cap: bool,
    pub output: Option<PathBuf>,
    pub workers: Option<usize>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        RunConfig::from_raw(&RawConfig::parse(text)?)
    }

    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        let market = MarketParams {
            demand_new: raw.required("market.d_p", "demand rate of new items")?,
            demand_repaired: raw.required("market.d_r", "demand rate of repaired items")?,
            collect_new: raw.required("market.p", "collection proportion of new items")?,
            quality_new: raw.required("market.q", "quality level of returned new items")?,
            collect_repaired: raw.required("market.r", "collection proportion of repaired items")?,
        };
        let cost = CostParams {
            setup_supply: raw.required("cost.s_p", "production setup cost")?,
            setup_repair: raw.required("cost.s_r", "repair setup cost")?,
            holding_supply: raw.required("cost.h_p", "supply depot holding cost")?,
            holding_repair: raw.required("cost.h_r", "repair depot holding cost")?,
        };
        let mut params = SystemParams::new(market, cost);
        if raw.has_section("emission") {
            let curve = |a, b, c| -> Result<EmissionCurve> {
                Ok(EmissionCurve {
                    quadratic: raw.required(a, "emission curve coefficient")?,
                    linear: raw.required(b, "emission curve coefficient")?,
                    constant: raw.required(c, "emission curve coefficient")?,
                })
            };
            params = params.with_emission(EmissionParams {
                production: curve("emission.a_p", "emission.b_p", "emission.c_p")?,
                remanufacturing: curve("emission.a_r", "emission.b_r", "emission.c_r")?,
                truck_capacity: raw
                    .real("emission.t_c")?
                    .unwrap_or(market.demand_new + market.demand_repaired),
                gallons_per_trip: raw.real("emission.g_t")?.unwrap_or(DEFAULT_GALLONS_PER_TRIP),
                emission_per_gallon: raw.real("emission.e_t")?.unwrap_or(FITTED_EMISSION_PER_GALLON),
                cost_per_emission: raw.required("emission.c_ghg", "emission price")?,
            });
        }
        if raw.has_section("energy") {
            params = params.with_energy(EnergyParams {
                per_unit_production: raw.required("energy.k_p", "energy per produced unit")?,
                per_unit_remanufacturing: raw.required("energy.k_r", "energy per repaired unit")?,
                idle_power_production: raw.required("energy.w_p", "idle power of production")?,
                idle_power_remanufacturing: raw.required("energy.w_r", "idle power of repair")?,
                operating_hours: raw.real("energy.hours")?.unwrap_or(DEFAULT_OPERATING_HOURS),
                price: raw.required("energy.c_eng", "energy price")?,
            });
        }
        params.validate().map_err(|e| ConfigError::Validation(e.to_string()))?;

        let d = SearchBounds::default();
        let range = |lo, hi, default: IntRange| -> Result<IntRange> {
            Ok(IntRange::new(
                raw.integer(lo)?.unwrap_or(default.lo),
                raw.integer(hi)?.unwrap_or(default.hi),
            ))
        };
        let mut bounds = SearchBounds {
            production_lot: range("bounds.qp_min", "bounds.qp_max", d.production_lot)?,
            repair_lot: range("bounds.qr_min", "bounds.qr_max", d.repair_lot)?,
            repair_cycles: range("bounds.m_min", "bounds.m_max", d.repair_cycles)?,
            production_cycles: range("bounds.n_min", "bounds.n_max", d.production_cycles)?,
            ..d
        };
        bounds.quality.min = raw.real("bounds.s_min")?.unwrap_or(d.quality.min);
        bounds.quality.max = raw.real("bounds.s_max")?.unwrap_or(d.quality.max);
        bounds.quality.grid = raw.integer("bounds.s_grid")?.unwrap_or(d.quality.grid);
        if let Some((v, line)) = raw.text("bounds.s_search") {
            bounds.quality.search = match v.to_ascii_lowercase().as_str() {
                "exact" => QualitySearch::Exact,
                "grid" => QualitySearch::Grid,
                _ => {
                    return Err(ConfigError::Parse {
                        line,
                        message: format!("`bounds.s_search` expects exact or grid, found `{v}`"),
                    })
                }
            };
        }
        bounds.validate().map_err(|e| ConfigError::Validation(e.to_string()))?;

        let decision_keys = ["decision.qp", "decision.qr", "decision.m", "decision.n", "decision.s"];
        let decision = if raw.has_section("decision") {
            let mut values = Vec::with_capacity(5);
            for key in decision_keys {
                values.push(raw.required(key, "decision component")?);
            }
            Some(decision_from(&values)?)
        } else {
            None
        };

        let pair = match raw.text("front.pair") {
            None => {
                if params.emission.is_none() && params.energy.is_some() {
                    ObjectivePair::CostEnergy
                } else {
                    ObjectivePair::CostGhg
                }
            }
            Some((v, line)) => match v.to_ascii_lowercase().as_str() {
                "ghg" => ObjectivePair::CostGhg,
                "energy" => ObjectivePair::CostEnergy,
                _ => {
                    return Err(ConfigError::Parse {
                        line,
                        message: format!("`front.pair` expects ghg or energy, found `{v}`"),
                    })
                }
            },
        };
        let front = FrontSettings {
            pair,
            grid_count: raw.parsed::<usize>("front.grid", "a positive integer")?.unwrap_or(50),
            utopia: raw.list("front.utopia", 2)?.map(|v| (v[0], v[1])),
            reference: raw.list("front.reference", 5)?.map(|v| decision_from(&v)).transpose()?,
        };
        if front.grid_count == 0 {
            return Err(ConfigError::Validation("`front.grid` must be at least 1".into()));
        }

        let brute = BruteSettings {
            repair_cycles: raw.integer("brute.m")?.unwrap_or(1),
            production_cycles: raw.integer("brute.n")?.unwrap_or(1),
            return_quality: raw.real("brute.s")?.unwrap_or(1.0),
            cap: raw.parsed("brute.cap", "a positive integer")?.unwrap_or(DEFAULT_BRUTE_FORCE_CAP),
            enforce_balance: raw.flag("brute.enforce_balance")?.unwrap_or(true),
        };

        let mut sweep = Vec::new();
        for (name, min, max, steps) in [
            ("sweep.axis1", "sweep.axis1_min", "sweep.axis1_max", "sweep.axis1_steps"),
            ("sweep.axis2", "sweep.axis2_min", "sweep.axis2_max", "sweep.axis2_steps"),
        ] {
            let Some((symbol, line)) = raw.text(name) else { continue };
            let param: ParamName = symbol.parse().map_err(|e: greenepq_core::Error| ConfigError::Parse {
                line,
                message: e.to_string(),
            })?;
            sweep.push(Axis {
                param,
                min: raw.required(min, "axis lower end")?,
                max: raw.required(max, "axis upper end")?,
                steps: raw.integer(steps)?.unwrap_or(5),
            });
        }

        Ok(RunConfig {
            params,
            bounds,
            decision,
            front,
            brute,
            sweep,
            enforce_demand_cap: raw.flag("model.enforce_demand_cap")?.unwrap_or(false),
            output: raw.text("run.output").map(|(v, _)| PathBuf::from(v)),
            workers: raw.parsed("run.workers", "a positive integer")?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = "\
# base case
market.d_p = 250
market.d_r = 250
market.p = 0.8
market.q = 0.9
market.r = 0.8
cost.s_p = 2400
cost.s_r = 1400
cost.h_p = 5
cost.h_r = 2
";

    #[test]
    fn base_block_round_trips() {
        let cfg = RunConfig::parse(BASE).unwrap();
        assert_eq!(cfg.params, greenepq_core::presets::base_case());
        assert_eq!(cfg.bounds, SearchBounds::default());
        assert!(cfg.decision.is_none());
    }

    #[test]
    fn empty_file_misses_demand() {
        let err = RunConfig::parse("").unwrap_err();
        assert!(matches!(&err, ConfigError::Validation(m) if m.contains("market.d_p")), "{err}");
    }

    #[test]
    fn proportion_out_of_range() {
        let text = BASE.replace("market.p = 0.8", "p = 1.5");
        let err = RunConfig::parse(&text).unwrap_err();
        assert!(matches!(&err, ConfigError::Validation(m) if m.contains("collection proportion")), "{err}");
    }

    #[test]
    fn unknown_key_names_line() {
        let err = RunConfig::parse(&format!("{BASE}bogus.key = 1\n")).unwrap_err();
        assert_eq!(
            err,
            ConfigError::Parse {
                line: 11,
                message: "unknown key `bogus.key`".into()
            }
        );
    }

    #[test]
    fn malformed_number_names_line() {
        let err = RunConfig::parse(&BASE.replace("cost.h_r = 2", "cost.h_r = two")).unwrap_err();
        assert!(matches!(err, ConfigError::Parse { line: 10, .. }));
    }

    #[test]
    fn overrides_win() {
        let mut raw = RawConfig::parse(BASE).unwrap();
        raw.set("COST.S_P=2000").unwrap();
        raw.set("bounds.qp_max = 1200").unwrap();
        let cfg = RunConfig::from_raw(&raw).unwrap();
        assert_eq!(cfg.params.cost.setup_supply, 2000.0);
        assert_eq!(cfg.bounds.production_lot, IntRange::new(1, 1200));
        assert!(raw.set("nonsense").is_err());
    }

    #[test]
    fn emission_defaults() {
        let text = format!(
            "{BASE}emission.a_p = 0.003\nemission.b_p = 0.12\nemission.c_p = 1.4\nemission.a_r = 0.003\n\
             emission.b_r = 0.12\nemission.c_r = 1.4\nemission.c_ghg = 2\n"
        );
        let cfg = RunConfig::parse(&text).unwrap();
        let e = cfg.params.emission.unwrap();
        assert_eq!(e.truck_capacity, 500.0);
        assert_eq!(e.gallons_per_trip, 75.0);
        assert_eq!(e.emission_per_gallon, FITTED_EMISSION_PER_GALLON);
        let partial = format!("{BASE}emission.a_p = 0.003\n");
        assert!(RunConfig::parse(&partial).is_err());
    }

    #[test]
    fn decision_and_front_blocks() {
        let text = format!(
            "{BASE}decision.qp = 911\ndecision.qr = 1525\ndecision.m = 2\ndecision.n = 1\ndecision.s = 1\n\
             front.utopia = -1000, -1000\nfront.reference = 1000, 566, 1, 1, 1\nfront.grid = 7\n"
        );
        let cfg = RunConfig::parse(&text).unwrap();
        assert_eq!(cfg.decision, Some(Decision::new(911, 1525, 2, 1, 1.0)));
        assert_eq!(cfg.front.utopia, Some((-1000.0, -1000.0)));
        assert_eq!(cfg.front.reference, Some(Decision::new(1000, 566, 1, 1, 1.0)));
        assert_eq!(cfg.front.grid_count, 7);
        let bad = format!("{BASE}front.reference = 1000.5, 566, 1, 1, 1\n");
        assert!(RunConfig::parse(&bad).is_err());
    }

    #[test]
    fn sweep_axes() {
        let text = format!("{BASE}sweep.axis1 = S_p\nsweep.axis1_min = 2000\nsweep.axis1_max = 2800\n");
        let cfg = RunConfig::parse(&text).unwrap();
        assert_eq!(cfg.sweep.len(), 1);
        assert_eq!(cfg.sweep[0].param, ParamName::SetupSupply);
        assert_eq!(cfg.sweep[0].steps, 5);
    }

    #[test]
    fn decision_flag() {
        assert_eq!(parse_decision("911, 1525,2,1,1").unwrap(), Decision::new(911, 1525, 2, 1, 1.0));
        assert!(parse_decision("911,1525,2,1").is_err());
    }
}
