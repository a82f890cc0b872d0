//! Deterministic lattice search for the mixed-integer model.
//!
//! Every `(m, n)` pair is scanned independently. Lot sizes are scanned on a
//! coarse lattice and then refined at unit stride around the incumbent,
//! unless the whole box is small enough to enumerate. The continuous return
//! quality is optimised per integer point by [`optimize_s`]. All `s` values
//! live on a 1e-6 lattice so that printed decisions re-evaluate exactly.

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::environmental::{energy_cost, ghg_cost};
use crate::error::{Error, Result};
use crate::model::{
    check_feasibility, diagnose, inventory_cost, production_rate, remanufacturing_rate, Diagnostics,
    FeasibilityReport, BALANCE_SLACK,
};
use crate::params::{Decision, SystemParams};

/// Resolution of the return-quality lattice.
pub const QUALITY_STEPS: u32 = 1_000_000;

/// Absolute slack on scalarization constraints.
pub const CONSTRAINT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    InventoryCost,
    GhgCost,
    EnergyCost,
}

impl Objective {
    pub fn evaluate(self, params: &SystemParams, d: &Decision) -> Result<f64> {
        match self {
            Objective::InventoryCost => inventory_cost(params, d),
            Objective::GhgCost => ghg_cost(params, d),
            Objective::EnergyCost => energy_cost(params, d),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Objective::InventoryCost => "cost",
            Objective::GhgCost => "ghg",
            Objective::EnergyCost => "energy",
        }
    }
}

/// Inclusive integer interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntRange {
    pub lo: u32,
    pub hi: u32,
}

impl IntRange {
    pub fn new(lo: u32, hi: u32) -> Self {
        IntRange { lo, hi }
    }

    pub fn single(v: u32) -> Self {
        IntRange { lo: v, hi: v }
    }

    pub fn width(&self) -> u32 {
        self.hi - self.lo
    }

    pub fn len(&self) -> u64 {
        u64::from(self.hi - self.lo) + 1
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }

    pub fn contains(&self, v: u32) -> bool {
        (self.lo..=self.hi).contains(&v)
    }

    fn stepped(&self, stride: u32) -> impl Iterator<Item = u32> {
        let hi = self.hi;
        let tail = (!self.width().is_multiple_of(stride)).then_some(hi);
        (self.lo..=hi).step_by(stride as usize).chain(tail)
    }

    fn window(&self, centre: u32, radius: u32) -> IntRange {
        IntRange {
            lo: centre.saturating_sub(radius).max(self.lo),
            hi: centre.saturating_add(radius).min(self.hi),
        }
    }
}

/// How the continuous return quality is chosen at each integer point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QualitySearch {
    /// Objective and constraints are affine in `s`, so the optimum sits on
    /// an end of the feasible interval.
    #[default]
    Exact,
    /// `grid` evenly spaced values refined by two rounds of trisection.
    Grid,
}

/// Admissible return-quality interval and how it is searched.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityBounds {
    pub min: f64,
    pub max: f64,
    pub grid: u32,
    pub search: QualitySearch,
}

impl Default for QualityBounds {
    fn default() -> Self {
        QualityBounds {
            min: 0.0,
            max: 1.0,
            grid: 101,
            search: QualitySearch::Exact,
        }
    }
}

impl QualityBounds {
    /// Return quality pinned to one value.
    pub fn fixed(s: f64) -> Self {
        QualityBounds {
            min: s,
            max: s,
            ..QualityBounds::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 <= self.min && self.min <= self.max && self.max <= 1.0) {
            return Err(Error::InvalidBounds(format!(
                "return quality range [{}, {}] must lie inside [0, 1]",
                self.min, self.max
            )));
        }
        if self.grid < 2 {
            return Err(Error::InvalidBounds("s_grid must be at least 2".into()));
        }
        Ok(())
    }

    fn lattice(&self) -> (u32, u32) {
        let steps = f64::from(QUALITY_STEPS);
        let lo = (self.min * steps - 1e-6).ceil().max(0.0) as u32;
        let hi = (self.max * steps + 1e-6).floor().min(steps) as u32;
        (lo, hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchBounds {
    pub production_lot: IntRange,
    pub repair_lot: IntRange,
    pub repair_cycles: IntRange,
    pub production_cycles: IntRange,
    pub quality: QualityBounds,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            production_lot: IntRange::new(1, 3000),
            repair_lot: IntRange::new(1, 3000),
            repair_cycles: IntRange::new(1, 5),
            production_cycles: IntRange::new(1, 5),
            quality: QualityBounds::default(),
        }
    }
}

impl SearchBounds {
    /// Lot boxes with a single `(m, n)` pair.
    pub fn lots(production_lot: IntRange, repair_lot: IntRange, repair_cycles: u32, production_cycles: u32) -> Self {
        SearchBounds {
            production_lot,
            repair_lot,
            repair_cycles: IntRange::single(repair_cycles),
            production_cycles: IntRange::single(production_cycles),
            ..SearchBounds::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ranges = [
            ("production lot", self.production_lot),
            ("repair lot", self.repair_lot),
            ("repair cycles", self.repair_cycles),
            ("production cycles", self.production_cycles),
        ];
        for (name, r) in ranges {
            if r.lo < 1 {
                return Err(Error::InvalidBounds(format!("{name} lower bound must be at least 1")));
            }
            if r.is_empty() {
                return Err(Error::InvalidBounds(format!("{name} range is empty")));
            }
        }
        self.quality.validate()
    }

    /// Number of integer points `(Q_p, Q_r, m, n)` in the box.
    pub fn lattice_size(&self) -> u64 {
        self.production_lot.len() * self.repair_lot.len() * self.repair_cycles.len() * self.production_cycles.len()
    }

    fn cycle_pairs(&self) -> Vec<(u32, u32)> {
        let mut pairs = Vec::new();
        for m in self.repair_cycles.lo..=self.repair_cycles.hi {
            for n in self.production_cycles.lo..=self.production_cycles.hi {
                pairs.push((m, n));
            }
        }
        pairs
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedObjective {
    pub objective: Objective,
    pub weight: f64,
}

/// `weight * objective(x) <= rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarConstraint {
    pub objective: Objective,
    pub weight: f64,
    pub rhs: f64,
}

impl ScalarConstraint {
    fn slack(&self, value: f64) -> f64 {
        self.rhs - self.weight * value
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarSubproblem {
    pub objective: WeightedObjective,
    pub constraint: Option<ScalarConstraint>,
    pub bounds: SearchBounds,
}

impl ScalarSubproblem {
    pub fn validate(&self) -> Result<()> {
        self.bounds.validate()?;
        let weights = std::iter::once(self.objective.weight).chain(self.constraint.map(|c| c.weight));
        for w in weights {
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidBounds(format!("weight {w} must be positive")));
            }
        }
        Ok(())
    }
}

/// A decision together with every objective its parameters allow and the
/// feasibility verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluatedPoint {
    pub decision: Decision,
    pub cost: f64,
    pub ghg: Option<f64>,
    pub energy: Option<f64>,
    pub feasibility: FeasibilityReport,
    pub diagnostics: Diagnostics,
}

impl EvaluatedPoint {
    pub fn evaluate(params: &SystemParams, d: &Decision, enforce_demand_cap: bool) -> Result<Self> {
        Ok(EvaluatedPoint {
            decision: *d,
            cost: inventory_cost(params, d)?,
            ghg: params.emission.is_some().then(|| ghg_cost(params, d)).transpose()?,
            energy: params.energy.is_some().then(|| energy_cost(params, d)).transpose()?,
            feasibility: check_feasibility(params, d, enforce_demand_cap),
            diagnostics: diagnose(params, d)?,
        })
    }

    pub fn value(&self, objective: Objective) -> Option<f64> {
        match objective {
            Objective::InventoryCost => Some(self.cost),
            Objective::GhgCost => self.ghg,
            Objective::EnergyCost => self.energy,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    OptimalWithinBounds,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub best: Option<EvaluatedPoint>,
    /// Integer points at which the return quality was optimised.
    pub evaluations: u64,
    pub wall_time: Duration,
    pub status: SolveStatus,
}

/// Integer part of a decision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LotPlan {
    pub production_lot: u32,
    pub repair_lot: u32,
    pub repair_cycles: u32,
    pub production_cycles: u32,
}

impl LotPlan {
    pub fn with_quality(&self, s: f64) -> Decision {
        Decision::new(self.production_lot, self.repair_lot, self.repair_cycles, self.production_cycles, s)
    }
}

/// Return quality chosen for one integer point and the weighted objective
/// it attains.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityChoice {
    pub s: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Coarse stride is `max(1, width / coarse_divisions)` per lot axis.
    pub coarse_divisions: u32,
    /// Upper bound on unit-stride refinement rounds. Refinement stops
    /// earlier once a round leaves the incumbent unchanged.
    pub refinement_rounds: u32,
    /// Boxes with at most this many integer points are enumerated.
    pub exhaustive_limit: u64,
    pub enforce_demand_cap: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            coarse_divisions: 200,
            refinement_rounds: 256,
            exhaustive_limit: 100_000,
            enforce_demand_cap: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    decision: Decision,
    value: f64,
}

/// Strict total order used for every incumbent update: smaller value, then
/// lexicographically smaller `(Q_p, Q_r, m, n)`, then larger `s`.
fn precedes(a: &Candidate, b: &Candidate) -> bool {
    let (x, y) = (&a.decision, &b.decision);
    a.value
        .total_cmp(&b.value)
        .then(x.production_lot.cmp(&y.production_lot))
        .then(x.repair_lot.cmp(&y.repair_lot))
        .then(x.repair_cycles.cmp(&y.repair_cycles))
        .then(x.production_cycles.cmp(&y.production_cycles))
        .then(y.return_quality.total_cmp(&x.return_quality))
        .is_lt()
}

fn keep_best(slot: &mut Option<Candidate>, c: Candidate) -> bool {
    match slot {
        Some(cur) if !precedes(&c, cur) => false,
        _ => {
            *slot = Some(c);
            true
        }
    }
}

fn quality(micros: u32) -> f64 {
    f64::from(micros) / f64::from(QUALITY_STEPS)
}

struct QualityProblem<'a> {
    params: &'a SystemParams,
    plan: LotPlan,
    objective: WeightedObjective,
    constraint: Option<ScalarConstraint>,
}

struct Probe {
    value: f64,
    /// Return-balance slack, then the scalarization slack if any.
    slacks: [f64; 2],
}

impl Probe {
    fn feasible(&self) -> bool {
        self.slacks[0] >= -BALANCE_SLACK && self.slacks[1] >= -CONSTRAINT_SLACK
    }
}

impl QualityProblem<'_> {
    fn probe(&self, micros: u32) -> Result<Probe> {
        let d = self.plan.with_quality(quality(micros));
        let report = check_feasibility(self.params, &d, false);
        let balance = report.balance_slack().unwrap_or(f64::NEG_INFINITY);
        let value = self.objective.weight * self.objective.objective.evaluate(self.params, &d)?;
        let extra = match &self.constraint {
            Some(c) => c.slack(c.objective.evaluate(self.params, &d)?),
            None => 0.0,
        };
        Ok(Probe {
            value,
            slacks: [balance, extra],
        })
    }

    fn exact(&self, lo_q: u32, hi_q: u32) -> Result<Option<QualityChoice>> {
        let at0 = self.probe(0)?;
        let at1 = self.probe(QUALITY_STEPS)?;
        let (mut lo, mut hi) = (quality(lo_q), quality(hi_q));
        for (i, tol) in [BALANCE_SLACK, CONSTRAINT_SLACK].into_iter().enumerate() {
            let (c0, c1) = (at0.slacks[i], at1.slacks[i]);
            let slope = c1 - c0;
            if slope > 0.0 {
                lo = lo.max(-c0 / slope);
            } else if slope < 0.0 {
                hi = hi.min(-c0 / slope);
            } else if c0 < -tol {
                return Ok(None);
            }
        }
        if lo.is_nan() || hi.is_nan() || lo > hi {
            return Ok(None);
        }
        let (lo_q, hi_q) = QualityBounds {
            min: lo,
            max: hi,
            ..QualityBounds::default()
        }
        .lattice();
        if lo_q > hi_q {
            return Ok(None);
        }

        let mut best: Option<(u32, f64)> = None;
        // Larger s first so that ties resolve towards it.
        for (start, step) in [(hi_q, -1i64), (lo_q, 1)] {
            let mut micros = start;
            for _ in 0..4 {
                if micros < lo_q || micros > hi_q {
                    break;
                }
                let p = self.probe(micros)?;
                if p.feasible() {
                    if best.is_none_or(|(_, v)| p.value < v) {
                        best = Some((micros, p.value));
                    }
                    break;
                }
                micros = (i64::from(micros) + step) as u32;
            }
        }
        Ok(best.map(|(micros, value)| QualityChoice {
            s: quality(micros),
            value,
        }))
    }

    fn grid(&self, lo_q: u32, hi_q: u32, points: u32) -> Result<Option<QualityChoice>> {
        let mut best: Option<(u32, f64)> = None;
        let consider = |micros: u32, best: &mut Option<(u32, f64)>| -> Result<()> {
            let p = self.probe(micros)?;
            if p.feasible() {
                let better = match *best {
                    None => true,
                    Some((m, v)) => p.value < v || (p.value == v && micros > m),
                };
                if better {
                    *best = Some((micros, p.value));
                }
            }
            Ok(())
        };
        let spacing = f64::from(hi_q - lo_q) / f64::from(points - 1);
        for i in 0..points {
            let micros = lo_q + (f64::from(i) * spacing).round() as u32;
            consider(micros.min(hi_q), &mut best)?;
        }
        let mut radius = spacing;
        for _ in 0..2 {
            let Some((centre, _)) = best else { break };
            let a = (f64::from(centre) - radius).max(f64::from(lo_q));
            let b = (f64::from(centre) + radius).min(f64::from(hi_q));
            for frac in [1.0 / 3.0, 2.0 / 3.0] {
                let micros = (a + (b - a) * frac).round() as u32;
                consider(micros, &mut best)?;
            }
            radius /= 3.0;
        }
        Ok(best.map(|(micros, value)| QualityChoice {
            s: quality(micros),
            value,
        }))
    }
}

pub struct Solver {
    pub options: SolverOptions,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new(SolverOptions::default())
    }
}

impl Solver {
    pub fn new(options: SolverOptions) -> Self {
        Solver { options }
    }

    /// Best return quality for fixed integers, subject to the return balance
    /// and the optional scalarization constraint. `None` when no `s` in
    /// [0, 1] is feasible.
    pub fn optimize_s(
        &self,
        params: &SystemParams,
        plan: LotPlan,
        objective: WeightedObjective,
        constraint: Option<ScalarConstraint>,
        quality: &QualityBounds,
    ) -> Result<Option<QualityChoice>> {
        production_rate(params, plan.production_lot, plan.production_cycles)?;
        remanufacturing_rate(params, plan.repair_lot, plan.repair_cycles)?;
        if self.options.enforce_demand_cap {
            let d = plan.with_quality(1.0);
            if check_feasibility(params, &d, true).demand_cap_ok == Some(false) {
                return Ok(None);
            }
        }
        let problem = QualityProblem {
            params,
            plan,
            objective,
            constraint,
        };
        let (lo, hi) = quality.lattice();
        if lo > hi {
            return Ok(None);
        }
        match quality.search {
            QualitySearch::Exact => problem.exact(lo, hi),
            QualitySearch::Grid => problem.grid(lo, hi, quality.grid.max(2)),
        }
    }

    pub fn solve_min_cost(&self, params: &SystemParams, bounds: &SearchBounds) -> Result<SolveResult> {
        self.solve_scalar(
            &ScalarSubproblem {
                objective: WeightedObjective {
                    objective: Objective::InventoryCost,
                    weight: 1.0,
                },
                constraint: None,
                bounds: *bounds,
            },
            params,
        )
    }

    pub fn solve_scalar(&self, sub: &ScalarSubproblem, params: &SystemParams) -> Result<SolveResult> {
        sub.validate()?;
        params.validate()?;
        let started = Instant::now();
        let bounds = &sub.bounds;
        let (stride_p, stride_r) = if bounds.lattice_size() <= self.options.exhaustive_limit {
            (1, 1)
        } else {
            let div = self.options.coarse_divisions.max(1);
            (
                (bounds.production_lot.width() / div).max(1),
                (bounds.repair_lot.width() / div).max(1),
            )
        };

        let partials: Vec<(Option<Candidate>, u64)> = bounds
            .cycle_pairs()
            .into_par_iter()
            .map(|(m, n)| self.scan_pair(params, sub, m, n, stride_p, stride_r))
            .collect::<Result<_>>()?;

        let mut best = None;
        let mut evaluations = 0;
        for (cand, evals) in partials {
            evaluations += evals;
            if let Some(c) = cand {
                keep_best(&mut best, c);
            }
        }
        let best = best
            .map(|c| EvaluatedPoint::evaluate(params, &c.decision, self.options.enforce_demand_cap))
            .transpose()?;
        Ok(SolveResult {
            status: if best.is_some() {
                SolveStatus::OptimalWithinBounds
            } else {
                SolveStatus::Infeasible
            },
            best,
            evaluations,
            wall_time: started.elapsed(),
        })
    }

    fn scan_pair(
        &self,
        params: &SystemParams,
        sub: &ScalarSubproblem,
        m: u32,
        n: u32,
        stride_p: u32,
        stride_r: u32,
    ) -> Result<(Option<Candidate>, u64)> {
        let bounds = &sub.bounds;
        let mut best = None;
        let mut evaluations = 0u64;
        let mut visit = |qp: u32, qr: u32, best: &mut Option<Candidate>| -> Result<bool> {
            if production_rate(params, qp, n).is_err() || remanufacturing_rate(params, qr, m).is_err() {
                return Ok(false);
            }
            evaluations += 1;
            let plan = LotPlan {
                production_lot: qp,
                repair_lot: qr,
                repair_cycles: m,
                production_cycles: n,
            };
            let choice = self.optimize_s(
                params,
                plan,
                sub.objective,
                sub.constraint,
                &bounds.quality,
            )?;
            Ok(match choice {
                Some(q) => keep_best(
                    best,
                    Candidate {
                        decision: plan.with_quality(q.s),
                        value: q.value,
                    },
                ),
                None => false,
            })
        };

        for qp in bounds.production_lot.stepped(stride_p) {
            for qr in bounds.repair_lot.stepped(stride_r) {
                visit(qp, qr, &mut best)?;
            }
        }
        if stride_p > 1 || stride_r > 1 {
            for _ in 0..self.options.refinement_rounds {
                let Some(centre) = best else { break };
                let wp = bounds.production_lot.window(centre.decision.production_lot, 2 * stride_p);
                let wr = bounds.repair_lot.window(centre.decision.repair_lot, 2 * stride_r);
                let mut moved = false;
                for qp in wp.lo..=wp.hi {
                    for qr in wr.lo..=wr.hi {
                        moved |= visit(qp, qr, &mut best)?;
                    }
                }
                if !moved {
                    break;
                }
            }
        }
        Ok((best, evaluations))
    }
}

pub fn optimize_s(
    params: &SystemParams,
    plan: LotPlan,
    objective: WeightedObjective,
    constraint: Option<ScalarConstraint>,
) -> Result<Option<QualityChoice>> {
    Solver::default().optimize_s(params, plan, objective, constraint, &QualityBounds::default())
}

pub fn solve_min_cost(params: &SystemParams, bounds: &SearchBounds) -> Result<SolveResult> {
    Solver::default().solve_min_cost(params, bounds)
}

pub fn solve_scalar(sub: &ScalarSubproblem, params: &SystemParams) -> Result<SolveResult> {
    Solver::default().solve_scalar(sub, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::presets;

    fn cost() -> WeightedObjective {
        WeightedObjective {
            objective: Objective::InventoryCost,
            weight: 1.0,
        }
    }

    fn plan(qp: u32, qr: u32, m: u32, n: u32) -> LotPlan {
        LotPlan {
            production_lot: qp,
            repair_lot: qr,
            repair_cycles: m,
            production_cycles: n,
        }
    }

    /// Dense scan of s for the feasible minimum.
    fn dense_s(params: &SystemParams, lots: LotPlan, c: Option<ScalarConstraint>) -> Option<(f64, f64)> {
        let mut best: Option<(f64, f64)> = None;
        for i in 0..=10_000u32 {
            let s = f64::from(i) / 10_000.0;
            let d = lots.with_quality(s);
            let rep = check_feasibility(params, &d, false);
            if !rep.return_balance_ok {
                continue;
            }
            if let Some(c) = c {
                if c.slack(c.objective.evaluate(params, &d).unwrap()) < -CONSTRAINT_SLACK {
                    continue;
                }
            }
            let v = inventory_cost(params, &d).unwrap();
            if best.is_none_or(|(_, b)| v <= b) {
                best = Some((s, v));
            }
        }
        best
    }

    #[test]
    fn exact_quality_beats_dense_scan() {
        let p = presets::base_case();
        for (qp, qr, m, n) in [(911, 1525, 2, 1), (911, 700, 1, 1), (400, 1600, 3, 2), (1500, 700, 1, 4)] {
            let lots = plan(qp, qr, m, n);
            let got = optimize_s(&p, lots, cost(), None).unwrap();
            let want = dense_s(&p, lots, None);
            match (got, want) {
                (Some(g), Some((_, w))) => {
                    assert!(g.value <= w + 1e-9, "{qp},{qr}: {} > {w}", g.value);
                    assert!(g.value >= w - 1e-2);
                }
                (None, None) => {}
                other => panic!("mismatch at {qp},{qr},{m},{n}: {other:?}"),
            }
        }
    }

    #[test]
    fn chosen_quality_is_feasible_and_on_lattice() {
        let p = presets::base_case();
        let q = optimize_s(&p, plan(911, 1525, 2, 1), cost(), None).unwrap().unwrap();
        let micros = q.s * f64::from(QUALITY_STEPS);
        assert_eq!(micros, micros.round());
        let d = plan(911, 1525, 2, 1).with_quality(q.s);
        assert!(check_feasibility(&p, &d, false).return_balance_ok);
        assert_eq!(q.value, inventory_cost(&p, &d).unwrap());
        assert!((q.s - 0.999992).abs() < 1e-5, "{}", q.s);
    }

    #[test]
    fn unattainable_balance_has_no_quality() {
        let p = presets::base_case();
        assert_eq!(optimize_s(&p, plan(500, 3000, 5, 1), cost(), None).unwrap(), None);
    }

    #[test]
    fn invalid_rate_propagates() {
        let p = presets::base_case();
        let err = optimize_s(&p, plan(5, 900, 1, 1), cost(), None).unwrap_err();
        assert!(matches!(err, Error::DenominatorNonPositive { .. }));
    }

    #[test]
    fn grid_mode_is_no_better_than_exact() {
        let p = presets::base_case();
        let solver = Solver::default();
        let grid = QualityBounds {
            search: QualitySearch::Grid,
            ..QualityBounds::default()
        };
        for lots in [plan(911, 1525, 2, 1), plan(900, 1000, 1, 1)] {
            let exact = solver.optimize_s(&p, lots, cost(), None, &QualityBounds::default()).unwrap().unwrap();
            let grid = solver.optimize_s(&p, lots, cost(), None, &grid).unwrap().unwrap();
            assert!(exact.value <= grid.value + 1e-9);
            assert!(grid.value - exact.value < 1.0);
        }
    }

    #[test]
    fn constraint_on_cost_restricts_quality() {
        let p = presets::base_case();
        let lots = plan(900, 900, 1, 1);
        let free = optimize_s(&p, lots, cost(), None).unwrap().unwrap();
        let c0 = inventory_cost(&p, &lots.with_quality(0.0)).unwrap();
        let c1 = inventory_cost(&p, &lots.with_quality(1.0)).unwrap();
        let mid = 0.5 * (c0 + c1);
        let c = ScalarConstraint {
            objective: Objective::InventoryCost,
            weight: 1.0,
            rhs: mid,
        };
        let tight = optimize_s(&p, lots, cost(), Some(c)).unwrap().unwrap();
        assert!(tight.value <= mid + 1e-9);
        assert!(tight.value >= free.value);
        let want = dense_s(&p, lots, Some(c)).unwrap().1;
        assert!(tight.value <= want + 1e-9);
    }

    #[test]
    fn base_case_optimum() {
        let res = solve_min_cost(&presets::base_case(), &SearchBounds::default()).unwrap();
        assert_eq!(res.status, SolveStatus::OptimalWithinBounds);
        let b = res.best.unwrap();
        let d = b.decision;
        assert_eq!((d.production_lot, d.repair_lot, d.repair_cycles, d.production_cycles), (911, 1525, 2, 1));
        assert!((b.cost - 1237.2123).abs() < 1e-3, "{}", b.cost);
        assert!(b.feasibility.is_feasible());
    }

    fn enumerate(params: &SystemParams, sub: &ScalarSubproblem) -> Option<Candidate> {
        let solver = Solver::default();
        let b = &sub.bounds;
        let mut best = None;
        for qp in b.production_lot.lo..=b.production_lot.hi {
            for qr in b.repair_lot.lo..=b.repair_lot.hi {
                for m in b.repair_cycles.lo..=b.repair_cycles.hi {
                    for n in b.production_cycles.lo..=b.production_cycles.hi {
                        let lots = plan(qp, qr, m, n);
                        let Ok(Some(q)) =
                            solver.optimize_s(params, lots, sub.objective, sub.constraint, &b.quality)
                        else {
                            continue;
                        };
                        keep_best(
                            &mut best,
                            Candidate {
                                decision: lots.with_quality(q.s),
                                value: q.value,
                            },
                        );
                    }
                }
            }
        }
        best
    }

    #[test]
    fn coarse_search_matches_enumeration_on_small_boxes() {
        let p = presets::emissions_case();
        let coarse = Solver::new(SolverOptions {
            coarse_divisions: 4,
            exhaustive_limit: 0,
            ..SolverOptions::default()
        });
        for (lo_p, lo_r) in [(1000u32, 500u32), (30, 40), (200, 100)] {
            let bounds = SearchBounds {
                production_lot: IntRange::new(lo_p, lo_p + 20),
                repair_lot: IntRange::new(lo_r, lo_r + 20),
                repair_cycles: IntRange::new(1, 2),
                production_cycles: IntRange::new(1, 2),
                ..SearchBounds::default()
            };
            for objective in [Objective::InventoryCost, Objective::GhgCost] {
                let sub = ScalarSubproblem {
                    objective: WeightedObjective { objective, weight: 0.5 },
                    constraint: None,
                    bounds,
                };
                let got = coarse.solve_scalar(&sub, &p).unwrap();
                let want = enumerate(&p, &sub);
                match (got.best, want) {
                    (Some(g), Some(w)) => {
                        assert_eq!(g.decision, w.decision);
                        assert!((0.5 * g.value(objective).unwrap() - w.value).abs() < 1e-9);
                    }
                    (None, None) => {}
                    other => panic!("{other:?}"),
                }
            }
        }
    }

    #[test]
    fn infinite_rhs_equals_unconstrained() {
        let p = presets::emissions_case();
        let bounds = SearchBounds::lots(IntRange::new(1000, 1100), IntRange::new(500, 600), 1, 1);
        let obj = WeightedObjective {
            objective: Objective::GhgCost,
            weight: 1.0,
        };
        let free = solve_scalar(&ScalarSubproblem { objective: obj, constraint: None, bounds }, &p).unwrap();
        let inf = solve_scalar(
            &ScalarSubproblem {
                objective: obj,
                constraint: Some(ScalarConstraint {
                    objective: Objective::InventoryCost,
                    weight: 1.0,
                    rhs: f64::INFINITY,
                }),
                bounds,
            },
            &p,
        )
        .unwrap();
        assert_eq!(free.best.unwrap().decision, inf.best.unwrap().decision);
    }

    #[test]
    fn impossible_rhs_is_infeasible() {
        let p = presets::emissions_case();
        let bounds = SearchBounds::lots(IntRange::new(1000, 1100), IntRange::new(500, 600), 1, 1);
        let res = solve_scalar(
            &ScalarSubproblem {
                objective: WeightedObjective {
                    objective: Objective::GhgCost,
                    weight: 1.0,
                },
                constraint: Some(ScalarConstraint {
                    objective: Objective::InventoryCost,
                    weight: 1.0,
                    rhs: 1.0,
                }),
                bounds,
            },
            &p,
        )
        .unwrap();
        assert_eq!(res.status, SolveStatus::Infeasible);
        assert!(res.best.is_none());
    }

    #[test]
    fn bad_bounds_are_errors() {
        let p = presets::base_case();
        let mut b = SearchBounds {
            production_lot: IntRange::new(10, 5),
            ..SearchBounds::default()
        };
        assert!(matches!(solve_min_cost(&p, &b), Err(Error::InvalidBounds(_))));
        b.production_lot = IntRange::new(0, 5);
        assert!(matches!(solve_min_cost(&p, &b), Err(Error::InvalidBounds(_))));
    }

    #[test]
    fn missing_block_is_an_error() {
        let p = presets::base_case();
        let sub = ScalarSubproblem {
            objective: WeightedObjective {
                objective: Objective::GhgCost,
                weight: 1.0,
            },
            constraint: None,
            bounds: SearchBounds::lots(IntRange::new(900, 910), IntRange::new(900, 910), 1, 1),
        };
        assert_eq!(solve_scalar(&sub, &p).unwrap_err(), Error::MissingBlock("emission"));
    }

    #[test]
    fn fixed_quality_is_respected() {
        let p = presets::emissions_case();
        let mut bounds = SearchBounds::lots(IntRange::new(1000, 1010), IntRange::new(560, 570), 1, 1);
        bounds.quality = QualityBounds::fixed(1.0);
        let res = solve_min_cost(&p, &bounds).unwrap();
        let d = res.best.unwrap().decision;
        assert_eq!(d.return_quality, 1.0);
        assert_eq!((d.production_lot, d.repair_lot), (1000, 565));
        bounds.quality = QualityBounds::fixed(1.5);
        assert!(matches!(solve_min_cost(&p, &bounds), Err(Error::InvalidBounds(_))));
    }

    #[test]
    fn stepped_covers_both_ends() {
        let r = IntRange::new(1, 10);
        assert_eq!(r.stepped(4).collect::<Vec<_>>(), vec![1, 5, 9, 10]);
        assert_eq!(r.stepped(3).collect::<Vec<_>>(), vec![1, 4, 7, 10]);
        assert_eq!(IntRange::single(7).stepped(5).collect::<Vec<_>>(), vec![7]);
    }
}
