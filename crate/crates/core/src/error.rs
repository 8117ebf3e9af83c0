use thiserror::Error;

/// Crate-wide error type. Configuration problems and numerical failures are
/// kept in distinct variants so callers (the CLI in particular) can map them
/// to different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("malformed input: {0}")]
    InvalidData(String),

    #[error("Newton iteration diverged at t = {t}: residual {residual:.3e} after {iterations} iterations (consider halving dt)")]
    NewtonDiverged {
        t: f64,
        residual: f64,
        iterations: u32,
    },

    #[error("non-finite value encountered at t = {t} during {context}; last valid state retained")]
    NonFinite { t: f64, context: String },

    #[error("stationary solve did not converge: residual {residual:.3e} after {iterations} iterations")]
    StationaryDiverged { residual: f64, iterations: u32 },

    #[error("singular (regularized) Jacobian: pivot {pivot:.3e} at row {row}")]
    SingularJacobian { row: usize, pivot: f64 },

    #[error("Rayleigh quotient minimizer did not converge after {iterations} iterations; last quotient {last_quotient:.6e}")]
    MinimizerStalled {
        last_quotient: f64,
        iterations: u32,
        /// Last iterate, kept for diagnosis.
        last_iterate: Vec<f64>,
    },

    #[error("ledger times must increase: got t = {t} after t = {last}")]
    NonMonotoneTime { t: f64, last: f64 },

    #[error("simulation failed: {0}")]
    SimulationFailed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::InvalidConfig(_) | Error::InvalidData(_))
    }
}
