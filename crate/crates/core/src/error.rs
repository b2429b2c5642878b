use thiserror::Error;

/// Errors produced by planning, evaluation and I/O routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter relation does not hold (e.g. `W` not a multiple of `R_p`).
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// An argument is outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// No horizontal distance reaches the threshold SNR.
    #[error("infeasible geometry: {0}")]
    InfeasibleGeometry(String),

    /// The disks of a cluster have an empty intersection.
    #[error("infeasible cluster: {0}")]
    InfeasibleCluster(String),

    /// The planning problem has no feasible solution.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// An iterative solver hit its iteration cap or lost numerical consistency.
    #[error("solver failure: {0}")]
    SolverFailure(String),

    /// A documented precondition was violated by the caller.
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
