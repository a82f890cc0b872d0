//! Parameter sweeps: the cost-minimal decision over a grid of parameter
//! overrides.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::{Decision, SystemParams};
use crate::solver::{SearchBounds, SolveStatus, Solver};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParamName {
    DemandNew,
    DemandRepaired,
    CollectNew,
    QualityNew,
    CollectRepaired,
    SetupSupply,
    SetupRepair,
    HoldingSupply,
    HoldingRepair,
}

impl ParamName {
    pub const ALL: [ParamName; 9] = [
        ParamName::DemandNew,
        ParamName::DemandRepaired,
        ParamName::CollectNew,
        ParamName::QualityNew,
        ParamName::CollectRepaired,
        ParamName::SetupSupply,
        ParamName::SetupRepair,
        ParamName::HoldingSupply,
        ParamName::HoldingRepair,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            ParamName::DemandNew => "D_p",
            ParamName::DemandRepaired => "D_r",
            ParamName::CollectNew => "p",
            ParamName::QualityNew => "q",
            ParamName::CollectRepaired => "r",
            ParamName::SetupSupply => "S_p",
            ParamName::SetupRepair => "S_r",
            ParamName::HoldingSupply => "h_p",
            ParamName::HoldingRepair => "h_r",
        }
    }

    pub fn get(self, params: &SystemParams) -> f64 {
        let (m, c) = (&params.market, &params.cost);
        match self {
            ParamName::DemandNew => m.demand_new,
            ParamName::DemandRepaired => m.demand_repaired,
            ParamName::CollectNew => m.collect_new,
            ParamName::QualityNew => m.quality_new,
            ParamName::CollectRepaired => m.collect_repaired,
            ParamName::SetupSupply => c.setup_supply,
            ParamName::SetupRepair => c.setup_repair,
            ParamName::HoldingSupply => c.holding_supply,
            ParamName::HoldingRepair => c.holding_repair,
        }
    }

    pub fn set(self, params: &mut SystemParams, value: f64) {
        let (m, c) = (&mut params.market, &mut params.cost);
        let slot = match self {
            ParamName::DemandNew => &mut m.demand_new,
            ParamName::DemandRepaired => &mut m.demand_repaired,
            ParamName::CollectNew => &mut m.collect_new,
            ParamName::QualityNew => &mut m.quality_new,
            ParamName::CollectRepaired => &mut m.collect_repaired,
            ParamName::SetupSupply => &mut c.setup_supply,
            ParamName::SetupRepair => &mut c.setup_repair,
            ParamName::HoldingSupply => &mut c.holding_supply,
            ParamName::HoldingRepair => &mut c.holding_repair,
        };
        *slot = value;
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for ParamName {
    type Err = Error;

    /// Case-insensitive symbol such as `S_p` or `h_r`.
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        ParamName::ALL
            .into_iter()
            .find(|p| p.symbol().to_ascii_lowercase() == key)
            .ok_or_else(|| Error::InvalidSweep(format!("unknown parameter `{s}`")))
    }
}

/// Inclusive range sampled at `steps` evenly spaced values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub param: ParamName,
    pub min: f64,
    pub max: f64,
    pub steps: u32,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let last = f64::from(self.steps - 1);
        (0..self.steps)
            .map(|i| self.min + (self.max - self.min) * f64::from(i) / last)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axes: Vec<Axis>,
    pub base: SystemParams,
    pub bounds: SearchBounds,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 2 {
            return Err(Error::InvalidSweep("one or two axes are required".into()));
        }
        for a in &self.axes {
            if a.steps == 0 {
                return Err(Error::InvalidSweep(format!("axis {} needs at least one step", a.param)));
            }
            if !(a.min.is_finite() && a.max.is_finite()) || a.max < a.min {
                return Err(Error::InvalidSweep(format!("axis {} has an invalid range", a.param)));
            }
        }
        if self.axes.len() == 2 && self.axes[0].param == self.axes[1].param {
            return Err(Error::InvalidSweep("axes must name different parameters".into()));
        }
        self.bounds.validate()
    }

    fn cells(&self) -> Vec<Vec<usize>> {
        let mut cells: Vec<Vec<usize>> = vec![vec![]];
        for a in &self.axes {
            cells = cells
                .into_iter()
                .flat_map(|c| {
                    (0..a.steps as usize).map(move |i| {
                        let mut next = c.clone();
                        next.push(i);
                        next
                    })
                })
                .collect();
        }
        cells
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Optimal,
    Infeasible,
    /// The overridden parameters fail validation.
    InvalidParameters,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Optimal => "optimal",
            RowStatus::Infeasible => "infeasible",
            RowStatus::InvalidParameters => "invalid",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    /// Index along each axis.
    pub cell: Vec<usize>,
    /// Parameter value along each axis.
    pub values: Vec<f64>,
    pub decision: Option<Decision>,
    pub cost: Option<f64>,
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub axes: Vec<Axis>,
    /// Axis-major: the first axis varies slowest.
    pub rows: Vec<SweepRow>,
    pub min_cost_cell: Option<Vec<usize>>,
    pub max_cost_cell: Option<Vec<usize>>,
}

impl SweepResult {
    pub fn row(&self, cell: &[usize]) -> Option<&SweepRow> {
        self.rows.iter().find(|r| r.cell == cell)
    }
}

pub fn sweep(spec: &SweepSpec, solver: &Solver) -> Result<SweepResult> {
    spec.validate()?;
    let values: Vec<Vec<f64>> = spec.axes.iter().map(Axis::values).collect();
    let rows: Vec<SweepRow> = spec
        .cells()
        .into_par_iter()
        .map(|cell| {
            let mut params = spec.base;
            let vals: Vec<f64> = cell.iter().zip(&values).map(|(&i, v)| v[i]).collect();
            for (axis, &v) in spec.axes.iter().zip(&vals) {
                axis.param.set(&mut params, v);
            }
            let mut row = SweepRow {
                cell,
                values: vals,
                decision: None,
                cost: None,
                status: RowStatus::InvalidParameters,
            };
            if params.validate().is_err() {
                return Ok(row);
            }
            let res = solver.solve_min_cost(&params, &spec.bounds)?;
            row.status = match res.status {
                SolveStatus::OptimalWithinBounds => RowStatus::Optimal,
                SolveStatus::Infeasible => RowStatus::Infeasible,
            };
            if let Some(b) = res.best {
                row.decision = Some(b.decision);
                row.cost = Some(b.cost);
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;

    let pick = |better: fn(f64, f64) -> bool| {
        rows.iter()
            .filter_map(|r| r.cost.map(|c| (c, &r.cell)))
            .fold(None::<(f64, &Vec<usize>)>, |acc, (c, cell)| match acc {
                Some((b, _)) if !better(c, b) => acc,
                _ => Some((c, cell)),
            })
            .map(|(_, cell)| cell.clone())
    };
    Ok(SweepResult {
        axes: spec.axes.clone(),
        min_cost_cell: pick(|a, b| a < b),
        max_cost_cell: pick(|a, b| a > b),
        rows,
    })
}

/// Percentage changes from cell `a` to cell `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct DeltaReport {
    /// One entry per axis.
    pub param_pct: Vec<f64>,
    pub cost_pct: f64,
}

fn pct(a: f64, b: f64) -> f64 {
    100.0 * (b - a) / a
}

pub fn delta_report(res: &SweepResult, cell_a: &[usize], cell_b: &[usize]) -> Result<DeltaReport> {
    let lookup = |cell: &[usize]| {
        res.row(cell)
            .filter(|r| r.cost.is_some())
            .ok_or_else(|| Error::MissingCell(cell.to_vec()))
    };
    let (a, b) = (lookup(cell_a)?, lookup(cell_b)?);
    Ok(DeltaReport {
        param_pct: a.values.iter().zip(&b.values).map(|(&x, &y)| pct(x, y)).collect(),
        cost_pct: pct(a.cost.expect("filtered"), b.cost.expect("filtered")),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::presets;
    use crate::solver::{solve_min_cost, IntRange};

    fn small_bounds() -> SearchBounds {
        SearchBounds {
            production_lot: IntRange::new(800, 1000),
            repair_lot: IntRange::new(1300, 1600),
            repair_cycles: IntRange::new(1, 2),
            production_cycles: IntRange::new(1, 1),
            ..SearchBounds::default()
        }
    }

    #[test]
    fn axis_values() {
        let a = Axis {
            param: ParamName::SetupSupply,
            min: 2000.0,
            max: 2800.0,
            steps: 5,
        };
        assert_eq!(a.values(), vec![2000.0, 2200.0, 2400.0, 2600.0, 2800.0]);
        assert_eq!(Axis { steps: 1, ..a }.values(), vec![2000.0]);
    }

    #[test]
    fn names_parse() {
        assert_eq!("S_p".parse::<ParamName>().unwrap(), ParamName::SetupSupply);
        assert_eq!("h_R".parse::<ParamName>().unwrap(), ParamName::HoldingRepair);
        assert!("x".parse::<ParamName>().is_err());
        for p in ParamName::ALL {
            assert_eq!(p.symbol().parse::<ParamName>().unwrap(), p);
        }
    }

    #[test]
    fn single_cell_equals_direct_solve() {
        let base = presets::base_case();
        let spec = SweepSpec {
            axes: vec![Axis {
                param: ParamName::SetupSupply,
                min: 2400.0,
                max: 2400.0,
                steps: 1,
            }],
            base,
            bounds: small_bounds(),
        };
        let res = sweep(&spec, &Solver::default()).unwrap();
        let direct = solve_min_cost(&base, &small_bounds()).unwrap().best.unwrap();
        assert_eq!(res.rows.len(), 1);
        assert_eq!(res.rows[0].decision, Some(direct.decision));
        assert_eq!(res.rows[0].cost, Some(direct.cost));
        let d = delta_report(&res, &[0], &[0]).unwrap();
        assert_eq!(d.param_pct, vec![0.0]);
        assert_eq!(d.cost_pct, 0.0);
    }

    #[test]
    fn rows_are_axis_major_and_monotone_in_setup() {
        let spec = SweepSpec {
            axes: vec![
                Axis {
                    param: ParamName::HoldingSupply,
                    min: 3.0,
                    max: 5.0,
                    steps: 2,
                },
                Axis {
                    param: ParamName::SetupSupply,
                    min: 2000.0,
                    max: 2800.0,
                    steps: 3,
                },
            ],
            base: presets::base_case(),
            bounds: small_bounds(),
        };
        let res = sweep(&spec, &Solver::default()).unwrap();
        let cells: Vec<Vec<usize>> = res.rows.iter().map(|r| r.cell.clone()).collect();
        assert_eq!(cells, vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 1], vec![1, 2]]);
        for h in 0..2 {
            let costs: Vec<f64> = (0..3).map(|s| res.row(&[h, s]).unwrap().cost.unwrap()).collect();
            assert!(costs.windows(2).all(|w| w[0] <= w[1]));
        }
        let p = presets::base_case();
        for r in &res.rows {
            let mut q = p;
            ParamName::HoldingSupply.set(&mut q, r.values[0]);
            ParamName::SetupSupply.set(&mut q, r.values[1]);
            let again = crate::model::inventory_cost(&q, &r.decision.unwrap()).unwrap();
            assert_eq!(again, r.cost.unwrap());
        }
        assert!(res.min_cost_cell.is_some() && res.max_cost_cell.is_some());
    }

    #[test]
    fn invalid_override_is_recorded() {
        let spec = SweepSpec {
            axes: vec![Axis {
                param: ParamName::CollectNew,
                min: 0.8,
                max: 1.2,
                steps: 2,
            }],
            base: presets::base_case(),
            bounds: small_bounds(),
        };
        let res = sweep(&spec, &Solver::default()).unwrap();
        assert_eq!(res.rows[1].status, RowStatus::InvalidParameters);
        assert_eq!(delta_report(&res, &[0], &[1]).unwrap_err(), Error::MissingCell(vec![1]));
        assert_eq!(delta_report(&res, &[0], &[7]).unwrap_err(), Error::MissingCell(vec![7]));
    }

    #[test]
    fn bad_specs() {
        let axis = Axis {
            param: ParamName::SetupSupply,
            min: 1.0,
            max: 2.0,
            steps: 0,
        };
        let mut spec = SweepSpec {
            axes: vec![axis],
            base: presets::base_case(),
            bounds: small_bounds(),
        };
        assert!(spec.validate().is_err());
        spec.axes = vec![];
        assert!(spec.validate().is_err());
        spec.axes = vec![Axis { steps: 2, ..axis }, Axis { steps: 2, ..axis }];
        assert!(spec.validate().is_err());
    }
}
