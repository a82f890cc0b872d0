//! Bi-objective fronts: cost against GHG or energy cost.
//!
//! For every interior weight vector two scalar problems are solved. One
//! minimises the weighted cost under a bound on the weighted second
//! objective, the other does the converse. Both bounds come from a
//! reference decision or from a utopia vector. The union of solutions is
//! dominance-filtered.

use std::cmp::Ordering;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{check_feasibility, inventory_cost, production_rate, remanufacturing_rate};
use crate::params::{Decision, SystemParams};
use crate::solver::{
    EvaluatedPoint, IntRange, Objective, ScalarConstraint, ScalarSubproblem, SearchBounds, Solver, WeightedObjective,
};

/// Largest lattice a brute-force front may enumerate by default.
pub const DEFAULT_BRUTE_FORCE_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightVector {
    pub w1: f64,
    pub w2: f64,
}

impl WeightVector {
    /// `(w1, 1 - w1)` for `w1` strictly inside (0, 1).
    pub fn new(w1: f64) -> Result<Self> {
        if !(w1 > 0.0 && w1 < 1.0) {
            return Err(Error::InvalidParameter {
                name: "w1",
                reason: format!("weight {w1} must lie strictly inside (0, 1)"),
            });
        }
        Ok(WeightVector { w1, w2: 1.0 - w1 })
    }
}

/// `k` uniformly spaced interior weight vectors, `w1 = i / (k + 1)`.
pub fn generate_weights(k: usize) -> Result<Vec<WeightVector>> {
    if k == 0 {
        return Err(Error::InvalidParameter {
            name: "grid_count",
            reason: "at least one weight vector is required".into(),
        });
    }
    let denom = (k + 1) as f64;
    (1..=k).map(|i| WeightVector::new(i as f64 / denom)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectivePair {
    CostGhg,
    CostEnergy,
}

impl ObjectivePair {
    pub fn first(self) -> Objective {
        Objective::InventoryCost
    }

    pub fn second(self) -> Objective {
        match self {
            ObjectivePair::CostGhg => Objective::GhgCost,
            ObjectivePair::CostEnergy => Objective::EnergyCost,
        }
    }

    /// `(first, second)` objective values of an evaluated point.
    pub fn values(self, p: &EvaluatedPoint) -> Option<(f64, f64)> {
        Some((p.value(self.first())?, p.value(self.second())?))
    }

    fn check(self, params: &SystemParams) -> Result<()> {
        match self {
            ObjectivePair::CostGhg => params.emission().map(|_| ()),
            ObjectivePair::CostEnergy => params.energy().map(|_| ()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontConfig {
    pub pair: ObjectivePair,
    pub grid_count: usize,
    /// Utopia vector `(u1, u2)` in currency units.
    pub reference: Option<(f64, f64)>,
    /// Reference decision. Takes precedence over `reference`.
    pub reference_decision: Option<Decision>,
    pub bounds: SearchBounds,
}

impl FrontConfig {
    pub fn validate(&self, params: &SystemParams) -> Result<()> {
        if self.grid_count == 0 {
            return Err(Error::InvalidParameter {
                name: "grid_count",
                reason: "at least one weight vector is required".into(),
            });
        }
        self.pair.check(params)?;
        self.bounds.validate()?;
        if self.reference_decision.is_none() && self.reference.is_none() {
            return Err(Error::MissingReference);
        }
        Ok(())
    }
}

/// Resolved anchor of the scalarization bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceAnchor {
    /// Objective values at the reference decision.
    Decision { f1: f64, f2: f64 },
    /// Utopia vector, ideal point (separate minima over the search box),
    /// nadir point (each objective at the other's lexicographic minimum)
    /// and the span of first weights in use.
    Utopia {
        u1: f64,
        u2: f64,
        ideal: (f64, f64),
        nadir: (f64, f64),
        weight_span: (f64, f64),
    },
}

impl ReferenceAnchor {
    /// Evaluates the reference decision, or solves for the ideal point when
    /// only a utopia vector is configured.
    pub fn resolve(params: &SystemParams, cfg: &FrontConfig, solver: &Solver) -> Result<Self> {
        if let Some(d) = &cfg.reference_decision {
            return Ok(ReferenceAnchor::Decision {
                f1: cfg.pair.first().evaluate(params, d)?,
                f2: cfg.pair.second().evaluate(params, d)?,
            });
        }
        let (u1, u2) = cfg.reference.ok_or(Error::MissingReference)?;
        let minimum = |objective: Objective, bound: Option<(Objective, f64)>| -> Result<f64> {
            let sub = ScalarSubproblem {
                objective: WeightedObjective { objective, weight: 1.0 },
                constraint: bound.map(|(objective, rhs)| ScalarConstraint {
                    objective,
                    weight: 1.0,
                    rhs,
                }),
                bounds: cfg.bounds,
            };
            let res = solver.solve_scalar(&sub, params)?;
            res.best
                .and_then(|p| p.value(objective))
                .ok_or_else(|| Error::InvalidBounds("search box holds no feasible decision".into()))
        };
        let (f1, f2) = (cfg.pair.first(), cfg.pair.second());
        let z1 = minimum(f1, None)?;
        let z2 = minimum(f2, None)?;
        if !(u1 < z1 && u2 < z2) {
            return Err(Error::InvalidParameter {
                name: "reference",
                reason: format!("utopia vector ({u1}, {u2}) must lie strictly below the ideal point ({z1}, {z2})"),
            });
        }
        let n1 = minimum(f1, Some((f2, z2)))?;
        let n2 = minimum(f2, Some((f1, z1)))?;
        let k = cfg.grid_count as f64;
        Ok(ReferenceAnchor::Utopia {
            u1,
            u2,
            ideal: (z1, z2),
            nadir: (n1, n2),
            weight_span: (1.0 / (k + 1.0), k / (k + 1.0)),
        })
    }
}

/// Right-hand sides of one weight's two scalar problems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BalancedRhs {
    /// Bound on `w2 * f2` while `w1 * f1` is minimised.
    pub on_second: f64,
    /// Bound on `w1 * f1` while `w2 * f2` is minimised.
    pub on_first: f64,
}

/// With a reference decision the bounds are `w1 f1(x̂)` and `w2 f2(x̂)`,
/// so both problems are balanced at the reference.
///
/// With a utopia vector the reference is a point `r` on the segment from
/// the minimum-`f1` corner `(z1, n2)` to the minimum-`f2` corner `(n1, z2)`,
/// placed by the position of `w1` inside the weight span. The largest `w1`
/// lands on the minimum-`f1` corner and the smallest on the other. Measured
/// from the utopia vector the bounds read `w2 (f2 - u2) <= w2 (r2 - u2)` and
/// `w1 (f1 - u1) <= w1 (r1 - u1)`.
pub fn balance_reference(anchor: &ReferenceAnchor, w: WeightVector) -> BalancedRhs {
    match *anchor {
        ReferenceAnchor::Decision { f1, f2 } => BalancedRhs {
            on_second: w.w1 * f1,
            on_first: w.w2 * f2,
        },
        ReferenceAnchor::Utopia {
            ideal: (z1, z2),
            nadir: (n1, n2),
            weight_span: (lo, hi),
            ..
        } => {
            let t = if hi > lo { ((w.w1 - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.5 };
            BalancedRhs {
                on_second: w.w2 * (z2 + t * (n2 - z2)),
                on_first: w.w1 * (z1 + (1.0 - t) * (n1 - z1)),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Subproblem {
    /// Minimise the weighted first objective.
    First,
    /// Minimise the weighted second objective.
    Second,
}

impl Subproblem {
    pub fn index(self) -> u8 {
        match self {
            Subproblem::First => 1,
            Subproblem::Second => 2,
        }
    }
}

/// Outcome of one scalar problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubproblemOutcome {
    pub weight_index: usize,
    pub weight: WeightVector,
    pub subproblem: Subproblem,
    /// `None` when the problem has no feasible point in the box.
    pub point: Option<EvaluatedPoint>,
    pub is_pareto: bool,
}

/// Solves both scalar problems for one weight vector.
pub fn solve_weight(
    params: &SystemParams,
    cfg: &FrontConfig,
    anchor: &ReferenceAnchor,
    solver: &Solver,
    weight_index: usize,
    w: WeightVector,
) -> Result<[SubproblemOutcome; 2]> {
    let rhs = balance_reference(anchor, w);
    let (f1, f2) = (cfg.pair.first(), cfg.pair.second());
    let first = ScalarSubproblem {
        objective: WeightedObjective {
            objective: f1,
            weight: w.w1,
        },
        constraint: Some(ScalarConstraint {
            objective: f2,
            weight: w.w2,
            rhs: rhs.on_second,
        }),
        bounds: cfg.bounds,
    };
    let second = ScalarSubproblem {
        objective: WeightedObjective {
            objective: f2,
            weight: w.w2,
        },
        constraint: Some(ScalarConstraint {
            objective: f1,
            weight: w.w1,
            rhs: rhs.on_first,
        }),
        bounds: cfg.bounds,
    };
    let outcome = |subproblem, sub: &ScalarSubproblem| -> Result<SubproblemOutcome> {
        Ok(SubproblemOutcome {
            weight_index,
            weight: w,
            subproblem,
            point: solver.solve_scalar(sub, params)?.best,
            is_pareto: false,
        })
    };
    Ok([outcome(Subproblem::First, &first)?, outcome(Subproblem::Second, &second)?])
}

fn by_objectives(a: (f64, f64), b: (f64, f64)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1))
}

/// Indices of the non-dominated entries of `values`, both objectives
/// minimised, ordered by increasing first objective. Of several identical
/// entries only the lowest index is kept.
pub fn pareto_indices(values: &[(f64, f64)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| by_objectives(values[a], values[b]).then(a.cmp(&b)));
    let mut kept = Vec::new();
    let mut best_second = f64::INFINITY;
    for i in order {
        if values[i].1 < best_second {
            best_second = values[i].1;
            kept.push(i);
        }
    }
    kept
}

/// Entries not strictly dominated in both objectives. Duplicates and
/// ties in one objective all count.
pub fn weakly_nondominated_count(values: &[(f64, f64)]) -> usize {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| by_objectives(*a, *b));
    let mut count = 0;
    let mut prefix_min = f64::INFINITY;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j].0 == sorted[i].0 {
            if sorted[j].1 <= prefix_min {
                count += 1;
            }
            j += 1;
        }
        prefix_min = prefix_min.min(sorted[i].1);
        i = j;
    }
    count
}

#[derive(Debug, Clone, PartialEq)]
pub struct Front {
    pub pair: ObjectivePair,
    /// Ordered by strictly increasing first objective.
    pub points: Vec<EvaluatedPoint>,
    pub dominated_count: usize,
    pub subproblem_count: usize,
    pub wall_time: Duration,
}

impl Front {
    pub fn values(&self) -> Vec<(f64, f64)> {
        self.points.iter().filter_map(|p| self.pair.values(p)).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Drops every point weakly dominated by another and collapses duplicates.
/// Points lacking either objective are dropped as well.
pub fn dominance_filter(points: &[EvaluatedPoint], pair: ObjectivePair) -> Front {
    let started = Instant::now();
    let usable: Vec<&EvaluatedPoint> = points.iter().filter(|p| pair.values(p).is_some()).collect();
    let values: Vec<(f64, f64)> = usable.iter().filter_map(|p| pair.values(p)).collect();
    let kept = pareto_indices(&values);
    Front {
        pair,
        dominated_count: points.len() - kept.len(),
        points: kept.into_iter().map(|i| *usable[i]).collect(),
        subproblem_count: 0,
        wall_time: started.elapsed(),
    }
}

/// Table-style run report.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrontMetrics {
    pub grid_points: usize,
    pub subproblems: usize,
    /// Solves spent locating the ideal and nadir points.
    pub anchor_solves: usize,
    pub wall_time: Duration,
    pub pareto_count: usize,
    pub non_pareto_count: usize,
    pub infeasible_count: usize,
    pub dominated_count: usize,
    pub duplicate_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrontRun {
    pub front: Front,
    pub anchor: ReferenceAnchor,
    /// Every scalar problem in weight order, first problem before second.
    pub outcomes: Vec<SubproblemOutcome>,
    pub metrics: FrontMetrics,
}

pub fn run_front(params: &SystemParams, cfg: &FrontConfig, solver: &Solver) -> Result<FrontRun> {
    params.validate()?;
    cfg.validate(params)?;
    let started = Instant::now();
    let weights = generate_weights(cfg.grid_count)?;
    let anchor = ReferenceAnchor::resolve(params, cfg, solver)?;

    let per_weight: Vec<[SubproblemOutcome; 2]> = weights
        .par_iter()
        .enumerate()
        .map(|(i, &w)| solve_weight(params, cfg, &anchor, solver, i, w))
        .collect::<Result<_>>()?;
    let mut outcomes: Vec<SubproblemOutcome> = per_weight.into_iter().flatten().collect();

    let feasible: Vec<usize> = (0..outcomes.len()).filter(|&i| outcomes[i].point.is_some()).collect();
    let values: Vec<(f64, f64)> = feasible
        .iter()
        .map(|&i| {
            let p = outcomes[i].point.as_ref().expect("feasible outcome");
            cfg.pair.values(p).expect("pair validated against params")
        })
        .collect();
    let kept = pareto_indices(&values);
    for &k in &kept {
        outcomes[feasible[k]].is_pareto = true;
    }

    let mut distinct = values.clone();
    distinct.sort_by(|a, b| by_objectives(*a, *b));
    distinct.dedup();
    let duplicate_count = values.len() - distinct.len();

    let points: Vec<EvaluatedPoint> = kept
        .iter()
        .map(|&k| outcomes[feasible[k]].point.expect("feasible outcome"))
        .collect();
    let infeasible_count = outcomes.len() - feasible.len();
    let dominated_count = feasible.len() - kept.len() - duplicate_count;
    let wall_time = started.elapsed();
    let metrics = FrontMetrics {
        grid_points: cfg.grid_count,
        subproblems: outcomes.len(),
        anchor_solves: match anchor {
            ReferenceAnchor::Utopia { .. } => 4,
            ReferenceAnchor::Decision { .. } => 0,
        },
        wall_time,
        pareto_count: kept.len(),
        non_pareto_count: outcomes.len() - kept.len(),
        infeasible_count,
        dominated_count,
        duplicate_count,
    };
    Ok(FrontRun {
        front: Front {
            pair: cfg.pair,
            points,
            dominated_count: feasible.len() - kept.len(),
            subproblem_count: outcomes.len(),
            wall_time,
        },
        anchor,
        outcomes,
        metrics,
    })
}

/// Fixed-cycle, fixed-quality lot grid enumerated by the brute-force front.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LotGrid {
    pub production_lot: IntRange,
    pub repair_lot: IntRange,
    pub repair_cycles: u32,
    pub production_cycles: u32,
    pub return_quality: f64,
}

impl LotGrid {
    pub fn size(&self) -> u64 {
        self.production_lot.len() * self.repair_lot.len()
    }

    pub fn validate(&self) -> Result<()> {
        SearchBounds {
            quality: crate::solver::QualityBounds::fixed(self.return_quality),
            ..SearchBounds::lots(self.production_lot, self.repair_lot, self.repair_cycles, self.production_cycles)
        }
        .validate()
    }

    /// Search box covering exactly this grid.
    pub fn search_bounds(&self) -> SearchBounds {
        SearchBounds {
            quality: crate::solver::QualityBounds::fixed(self.return_quality),
            ..SearchBounds::lots(self.production_lot, self.repair_lot, self.repair_cycles, self.production_cycles)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteForceOptions {
    pub cap: u64,
    /// Skip grid points that violate the return balance.
    pub enforce_balance: bool,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        BruteForceOptions {
            cap: DEFAULT_BRUTE_FORCE_CAP,
            enforce_balance: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub production_lot: u32,
    pub repair_lot: u32,
    pub cost: f64,
    pub obj2: f64,
    pub is_pareto: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BruteForceMetrics {
    /// Raw lattice size.
    pub combinations: u64,
    pub evaluated: u64,
    pub invalid_rate: u64,
    pub balance_infeasible: u64,
    pub pareto_count: usize,
    /// Points not strictly dominated in both objectives.
    pub weak_pareto_count: usize,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceFront {
    pub front: Front,
    /// Every evaluated grid point in `(Q_p, Q_r)` order.
    pub points: Vec<GridPoint>,
    pub metrics: BruteForceMetrics,
}

enum Cell {
    Invalid,
    Unbalanced,
    Point(f64, f64),
}

pub fn brute_force_front(
    params: &SystemParams,
    grid: &LotGrid,
    pair: ObjectivePair,
    options: &BruteForceOptions,
) -> Result<BruteForceFront> {
    params.validate()?;
    grid.validate()?;
    pair.check(params)?;
    let size = grid.size();
    if size > options.cap {
        return Err(Error::BudgetExceeded { size, cap: options.cap });
    }
    let started = Instant::now();
    let (m, n) = (grid.repair_cycles, grid.production_cycles);

    let rows: Vec<Vec<(u32, u32, Cell)>> = (grid.production_lot.lo..=grid.production_lot.hi)
        .into_par_iter()
        .map(|qp| {
            (grid.repair_lot.lo..=grid.repair_lot.hi)
                .map(|qr| {
                    let cell = if production_rate(params, qp, n).is_err() || remanufacturing_rate(params, qr, m).is_err()
                    {
                        Cell::Invalid
                    } else {
                        let d = Decision::new(qp, qr, m, n, grid.return_quality);
                        if options.enforce_balance && !check_feasibility(params, &d, false).return_balance_ok {
                            Cell::Unbalanced
                        } else {
                            let cost = inventory_cost(params, &d).expect("rates checked");
                            let obj2 = pair.second().evaluate(params, &d).expect("rates checked");
                            Cell::Point(cost, obj2)
                        }
                    };
                    (qp, qr, cell)
                })
                .collect()
        })
        .collect();

    let mut metrics = BruteForceMetrics {
        combinations: size,
        ..BruteForceMetrics::default()
    };
    let mut points = Vec::new();
    for (qp, qr, cell) in rows.into_iter().flatten() {
        match cell {
            Cell::Invalid => metrics.invalid_rate += 1,
            Cell::Unbalanced => metrics.balance_infeasible += 1,
            Cell::Point(cost, obj2) => points.push(GridPoint {
                production_lot: qp,
                repair_lot: qr,
                cost,
                obj2,
                is_pareto: false,
            }),
        }
    }
    metrics.evaluated = points.len() as u64;

    let values: Vec<(f64, f64)> = points.iter().map(|p| (p.cost, p.obj2)).collect();
    let kept = pareto_indices(&values);
    metrics.weak_pareto_count = weakly_nondominated_count(&values);
    metrics.pareto_count = kept.len();
    let mut front_points = Vec::with_capacity(kept.len());
    for &k in &kept {
        points[k].is_pareto = true;
        let d = Decision::new(points[k].production_lot, points[k].repair_lot, m, n, grid.return_quality);
        front_points.push(EvaluatedPoint::evaluate(params, &d, false)?);
    }
    metrics.wall_time = started.elapsed();
    Ok(BruteForceFront {
        front: Front {
            pair,
            points: front_points,
            dominated_count: points.len() - kept.len(),
            subproblem_count: 0,
            wall_time: metrics.wall_time,
        },
        points,
        metrics,
    })
}
