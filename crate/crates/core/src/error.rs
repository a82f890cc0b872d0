use thiserror::Error;

/// Which side of the system a rate belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Process {
    Production,
    Remanufacturing,
}

impl std::fmt::Display for Process {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Process::Production => f.write_str("production"),
            Process::Remanufacturing => f.write_str("remanufacturing"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The total lot of a process is too small for its rate to be finite.
    #[error("{process} rate undefined: total lot {total_lot} must exceed {threshold:.4}")]
    DenominatorNonPositive {
        process: Process,
        total_lot: f64,
        threshold: f64,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("parameter block `{0}` is required for this objective")]
    MissingBlock(&'static str),

    #[error("decision infeasible: {depot} depot level {level:.6} at t = {time:.6}")]
    InfeasibleDecision {
        depot: &'static str,
        time: f64,
        level: f64,
    },

    #[error("invalid search bounds: {0}")]
    InvalidBounds(String),

    #[error("front configuration needs a reference decision or a utopia vector")]
    MissingReference,

    #[error("lattice of {size} points exceeds the evaluation budget of {cap}")]
    BudgetExceeded { size: u64, cap: u64 },

    #[error("sweep cell {0:?} does not exist or has no feasible optimum")]
    MissingCell(Vec<usize>),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
