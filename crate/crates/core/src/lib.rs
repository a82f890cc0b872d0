//! Two-depot reverse-logistics EPQ model with inventory, emission and
//! energy objectives, a deterministic lattice solver, a weighted Pareto
//! front generator and a parameter sweep driver.

pub mod environmental;
pub mod error;
pub mod model;
pub mod params;
pub mod pareto;
pub mod sensitivity;
pub mod simulate;
pub mod solver;

pub use environmental::{breakdown, energy_cost, ghg_cost, EnvBreakdown};
pub use error::{Error, Process, Result};
pub use model::{check_feasibility, derive, inventory_cost, DerivedRates, Diagnostics, FeasibilityReport};
pub use params::{
    presets, CostParams, Decision, EmissionCurve, EmissionParams, EnergyParams, MarketParams, SystemParams,
};
pub use pareto::{
    balance_reference, brute_force_front, dominance_filter, generate_weights, run_front, BalancedRhs,
    BruteForceFront, BruteForceMetrics, BruteForceOptions, Front, FrontConfig, FrontMetrics, FrontRun, LotGrid,
    ObjectivePair, ReferenceAnchor, Subproblem, SubproblemOutcome, WeightVector,
};
pub use sensitivity::{delta_report, sweep, Axis, DeltaReport, ParamName, RowStatus, SweepResult, SweepRow, SweepSpec};
pub use simulate::{simulate_trajectories, Trajectory};
pub use solver::{
    optimize_s, solve_min_cost, solve_scalar, EvaluatedPoint, IntRange, LotPlan, Objective, QualityBounds, QualityChoice,
    QualitySearch, ScalarConstraint, ScalarSubproblem, SearchBounds, SolveResult, SolveStatus, Solver,
    SolverOptions, WeightedObjective,
};
