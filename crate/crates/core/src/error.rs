use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid model card: {0}")]
    InvalidCard(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("newton iteration did not converge after {iterations} iterations (residual {residual:e} at index {worst_index})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        worst_index: usize,
    },

    #[error("singular jacobian")]
    SingularJacobian,

    #[error("invalid netlist: {0}")]
    Netlist(String),

    #[error("dc operating point failed to converge at node `{node}` (residual {residual:e} A)")]
    OperatingPoint { node: String, residual: f64 },

    #[error("timestep underflow at t = {time:e} s")]
    StepUnderflow { time: f64 },

    #[error("transient failed at t = {time:e} s: {source}")]
    Transient {
        time: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("dc sweep failed at {name} = {value} V: {source}")]
    Sweep {
        name: String,
        value: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("no transition found: {0}")]
    NoTransition(String),

    #[error("unsettled waveform: {0}")]
    Unsettled(String),

    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of a numerical procedure (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::NonConvergence { .. }
            | Error::SingularJacobian
            | Error::OperatingPoint { .. }
            | Error::StepUnderflow { .. }
            | Error::NoTransition(_)
            | Error::Unsettled(_) => true,
            Error::Transient { source, .. } | Error::Sweep { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
