//! Subcommand drivers. Each computes its result, writes the CSV from the
//! calling thread and prints one summary line.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use greenepq_core::pareto::BruteForceOptions;
use greenepq_core::{
    brute_force_front, check_feasibility, run_front, simulate_trajectories, sweep, Decision, Error, EvaluatedPoint,
    FrontConfig, LotGrid, ObjectivePair, RowStatus, SolveStatus, Solver, SolverOptions, SweepSpec,
};

use crate::config::{ConfigError, RunConfig};
use crate::output::{self, num};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Evaluate,
    Optimize,
    Pareto,
    BruteForce,
    Sweep,
    Simulate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Evaluate => "evaluate",
            Command::Optimize => "optimize",
            Command::Pareto => "pareto",
            Command::BruteForce => "brute-force",
            Command::Sweep => "sweep",
            Command::Simulate => "simulate",
        }
    }

    fn default_output(self) -> PathBuf {
        PathBuf::from(format!("{}.csv", self.name().replace('-', "_")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    Infeasible,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Infeasible => 2,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Usage(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_csv(path: &Path, fill: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<(), CliError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    fill(&mut w).and_then(|_| w.flush()).map_err(io_err(path))
}

pub struct Invocation {
    pub command: Command,
    pub config: RunConfig,
    pub decision: Option<Decision>,
    pub grid: Option<usize>,
}

impl Invocation {
    fn output(&self) -> PathBuf {
        self.config.output.clone().unwrap_or_else(|| self.command.default_output())
    }

    fn decision(&self) -> Result<Decision, CliError> {
        self.decision
            .or(self.config.decision)
            .ok_or_else(|| CliError::Usage("no decision given: use --decision or the decision.* keys".into()))
    }

    fn solver(&self) -> Solver {
        Solver::new(SolverOptions {
            enforce_demand_cap: self.config.enforce_demand_cap,
            ..SolverOptions::default()
        })
    }
}

fn pair_name(pair: ObjectivePair) -> &'static str {
    match pair {
        ObjectivePair::CostGhg => "ghg",
        ObjectivePair::CostEnergy => "energy",
    }
}

fn point_summary(p: &EvaluatedPoint) -> String {
    let d = p.decision;
    let mut s = format!(
        "Qp={} Qr={} m={} n={} s={} cost={}",
        d.production_lot,
        d.repair_lot,
        d.repair_cycles,
        d.production_cycles,
        num(d.return_quality),
        num(p.cost)
    );
    if let Some(g) = p.ghg {
        s.push_str(&format!(" ghg={}", num(g)));
    }
    if let Some(e) = p.energy {
        s.push_str(&format!(" energy={}", num(e)));
    }
    s
}

pub fn run(inv: &Invocation, out: &mut impl Write) -> Result<Outcome, CliError> {
    let emit = |out: &mut dyn Write, line: String| -> Result<(), CliError> {
        writeln!(out, "{line}").map_err(io_err(Path::new("<stdout>")))
    };
    let cfg = &inv.config;
    match inv.command {
        Command::Evaluate => {
            let d = inv.decision()?;
            let report = check_feasibility(&cfg.params, &d, cfg.enforce_demand_cap);
            if !report.rate_denominators_valid() {
                emit(
                    out,
                    format!(
                        "feasible=false production_rate_valid={} repair_rate_valid={}",
                        report.production_rate_valid, report.repair_rate_valid
                    ),
                )?;
                return Ok(Outcome::Infeasible);
            }
            let p = EvaluatedPoint::evaluate(&cfg.params, &d, cfg.enforce_demand_cap)?;
            let mut line = format!(
                "feasible={} {} lhs={} rhs={} return_balance_ok={} bounds_ok={}",
                report.is_feasible(),
                point_summary(&p),
                num(report.lhs.unwrap_or(f64::NAN)),
                num(report.rhs),
                report.return_balance_ok,
                report.bounds_ok
            );
            if let Some(cap) = report.demand_cap_ok {
                line.push_str(&format!(" demand_cap_ok={cap}"));
            }
            if p.diagnostics.negative_carry_term {
                line.push_str(" warning=negative_carry_term");
            }
            emit(out, line)?;
            Ok(if report.is_feasible() {
                Outcome::Success
            } else {
                Outcome::Infeasible
            })
        }
        Command::Optimize => {
            let res = inv.solver().solve_min_cost(&cfg.params, &cfg.bounds)?;
            let path = inv.output();
            write_csv(&path, |w| output::write_optimum(w, &res))?;
            let body = match &res.best {
                Some(p) => format!("status=optimal {}", point_summary(p)),
                None => "status=infeasible".to_string(),
            };
            emit(
                out,
                format!(
                    "{body} evaluations={} wall_ms={} output={}",
                    res.evaluations,
                    res.wall_time.as_millis(),
                    path.display()
                ),
            )?;
            Ok(match res.status {
                SolveStatus::OptimalWithinBounds => Outcome::Success,
                SolveStatus::Infeasible => Outcome::Infeasible,
            })
        }
        Command::Pareto => {
            let front_cfg = FrontConfig {
                pair: cfg.front.pair,
                grid_count: inv.grid.unwrap_or(cfg.front.grid_count),
                reference: cfg.front.utopia,
                reference_decision: cfg.front.reference,
                bounds: cfg.bounds,
            };
            let run = run_front(&cfg.params, &front_cfg, &inv.solver())?;
            let path = inv.output();
            write_csv(&path, |w| output::write_front(w, &run, front_cfg.pair))?;
            let m = run.metrics;
            emit(
                out,
                format!(
                    "pair={} grid_points={} subproblems={} pareto={} non_pareto={} infeasible={} dominated={} \
                     duplicates={} wall_ms={} output={}",
                    pair_name(front_cfg.pair),
                    m.grid_points,
                    m.subproblems,
                    m.pareto_count,
                    m.non_pareto_count,
                    m.infeasible_count,
                    m.dominated_count,
                    m.duplicate_count,
                    m.wall_time.as_millis(),
                    path.display()
                ),
            )?;
            Ok(if run.front.is_empty() {
                Outcome::Infeasible
            } else {
                Outcome::Success
            })
        }
        Command::BruteForce => {
            let b = &cfg.brute;
            let grid = LotGrid {
                production_lot: cfg.bounds.production_lot,
                repair_lot: cfg.bounds.repair_lot,
                repair_cycles: b.repair_cycles,
                production_cycles: b.production_cycles,
                return_quality: b.return_quality,
            };
            let opts = BruteForceOptions {
                cap: b.cap,
                enforce_balance: b.enforce_balance,
            };
            let bf = brute_force_front(&cfg.params, &grid, cfg.front.pair, &opts)?;
            let path = inv.output();
            write_csv(&path, |w| output::write_brute_force(w, &bf))?;
            let m = bf.metrics;
            emit(
                out,
                format!(
                    "pair={} combinations={} evaluated={} invalid_rate={} unbalanced={} pareto={} weak_pareto={} \
                     wall_ms={} output={}",
                    pair_name(cfg.front.pair),
                    m.combinations,
                    m.evaluated,
                    m.invalid_rate,
                    m.balance_infeasible,
                    m.pareto_count,
                    m.weak_pareto_count,
                    m.wall_time.as_millis(),
                    path.display()
                ),
            )?;
            Ok(if m.evaluated == 0 {
                Outcome::Infeasible
            } else {
                Outcome::Success
            })
        }
        Command::Sweep => {
            if cfg.sweep.is_empty() {
                return Err(CliError::Usage("sweep needs at least `sweep.axis1`".into()));
            }
            let spec = SweepSpec {
                axes: cfg.sweep.clone(),
                base: cfg.params,
                bounds: cfg.bounds,
            };
            let res = sweep(&spec, &inv.solver())?;
            let path = inv.output();
            write_csv(&path, |w| output::write_sweep(w, &res))?;
            let count = |s: RowStatus| res.rows.iter().filter(|r| r.status == s).count();
            let cost_at = |cell: &Option<Vec<usize>>| {
                cell.as_ref()
                    .and_then(|c| res.row(c))
                    .and_then(|r| r.cost)
                    .map(num)
                    .unwrap_or_else(|| "none".into())
            };
            let optimal = count(RowStatus::Optimal);
            emit(
                out,
                format!(
                    "rows={} optimal={optimal} infeasible={} invalid={} min_cost={} max_cost={} output={}",
                    res.rows.len(),
                    count(RowStatus::Infeasible),
                    count(RowStatus::InvalidParameters),
                    cost_at(&res.min_cost_cell),
                    cost_at(&res.max_cost_cell),
                    path.display()
                ),
            )?;
            Ok(if optimal == 0 {
                Outcome::Infeasible
            } else {
                Outcome::Success
            })
        }
        Command::Simulate => {
            let d = inv.decision()?;
            match simulate_trajectories(&cfg.params, &d) {
                Ok(traj) => {
                    let path = inv.output();
                    write_csv(&path, |w| output::write_trajectory(w, &traj))?;
                    emit(
                        out,
                        format!(
                            "points={} supply_area={} repair_area={} surplus={} output={}",
                            traj.len(),
                            num(traj.supply_area),
                            num(traj.repair_area),
                            num(traj.surplus),
                            path.display()
                        ),
                    )?;
                    Ok(Outcome::Success)
                }
                Err(e @ (Error::InfeasibleDecision { .. } | Error::DenominatorNonPositive { .. })) => {
                    emit(out, format!("feasible=false reason=\"{e}\""))?;
                    Ok(Outcome::Infeasible)
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}
