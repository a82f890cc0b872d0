//! Command-line front end: config parsing, CSV output and subcommand drivers.

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::{CliError, Command, Invocation, Outcome};
use config::{parse_decision, RawConfig, RunConfig};

/// Environment variable consulted for the worker count when no flag is given.
pub const WORKERS_ENV: &str = "GREENEPQ_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "greenepq", version, about = "Lot sizing for a production and repair system with emission costs")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// Configuration file of `key = value` lines.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set cost.s_p=2500`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// CSV output path. Defaults to `<command>.csv`.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Worker threads. Falls back to GREENEPQ_WORKERS, then `run.workers`.
    #[arg(short, long, global = true)]
    workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Cost, emissions and feasibility of one decision.
    Evaluate {
        /// `Qp,Qr,m,n,s`. Overrides the decision.* keys.
        #[arg(long)]
        decision: Option<String>,
    },
    /// Minimum inventory cost over the search bounds.
    Optimize,
    /// Weighted constrained front between cost and one environmental objective.
    Pareto {
        /// Number of weight vectors.
        #[arg(long)]
        grid: Option<usize>,
        /// `ghg` or `energy`. Overrides `front.pair`.
        #[arg(long)]
        pair: Option<String>,
    },
    /// Exhaustive enumeration of the lot grid with a dominance filter.
    BruteForce {
        #[arg(long)]
        pair: Option<String>,
    },
    /// One- or two-axis parameter sweep of the cost optimum.
    Sweep,
    /// Inventory trajectories of one decision.
    Simulate {
        #[arg(long)]
        decision: Option<String>,
    },
}

fn load(common: &Common, extra: &[String]) -> Result<RunConfig, CliError> {
    let mut raw = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
                path: path.clone(),
                source,
            })?;
            RawConfig::parse(&text)?
        }
        None => RawConfig::default(),
    };
    for kv in common.overrides.iter().chain(extra) {
        raw.set(kv)?;
    }
    let mut cfg = RunConfig::from_raw(&raw)?;
    if common.output.is_some() {
        cfg.output = common.output.clone();
    }
    Ok(cfg)
}

fn workers(flag: Option<usize>, cfg: &RunConfig) -> Result<Option<usize>, CliError> {
    if flag.is_some() {
        return Ok(flag);
    }
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n = v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{WORKERS_ENV}=`{v}` is not a worker count")))?;
        return Ok(Some(n));
    }
    Ok(cfg.workers)
}

fn execute(cli: Cli, out: &mut impl Write) -> Result<Outcome, CliError> {
    let mut extra = Vec::new();
    let (command, decision, grid) = match cli.command {
        Sub::Evaluate { decision } => (Command::Evaluate, decision, None),
        Sub::Optimize => (Command::Optimize, None, None),
        Sub::Pareto { grid, pair } => {
            extra.extend(pair.map(|p| format!("front.pair={p}")));
            (Command::Pareto, None, grid)
        }
        Sub::BruteForce { pair } => {
            extra.extend(pair.map(|p| format!("front.pair={p}")));
            (Command::BruteForce, None, None)
        }
        Sub::Sweep => (Command::Sweep, None, None),
        Sub::Simulate { decision } => (Command::Simulate, decision, None),
    };
    let config = load(&cli.common, &extra)?;
    let decision = decision.as_deref().map(parse_decision).transpose()?;
    let threads = workers(cli.common.workers, &config)?;
    if threads == Some(0) {
        return Err(CliError::Usage("worker count must be at least 1".into()));
    }
    let inv = Invocation {
        command,
        config,
        decision,
        grid,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let mut summary = Vec::new();
    let outcome = pool.install(|| commands::run(&inv, &mut summary))?;
    out.write_all(&summary).map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })?;
    Ok(outcome)
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code: 0 on success, 2 when the problem is infeasible and 1
/// on any error.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli, out) {
        Ok(outcome) => outcome.exit_code(),
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
