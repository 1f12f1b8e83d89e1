use thiserror::Error;

/// Errors raised by the sampling, integration and estimation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violates an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// The state became non-finite during time stepping.
    #[error("integration failed at t = {time}: {reason}")]
    Integration { time: f64, reason: String },

    /// A deterministic solution reached the origin, where the drift is not Lipschitz.
    #[error("solution reached the origin at t = {time} (left the uniqueness region)")]
    Singularity { time: f64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    /// Too many trajectories failed to reach the exit radius within the horizon.
    #[error("{non_exits} of {total} trajectories did not reach radius {radius} within t = {horizon}")]
    ExitHorizon {
        non_exits: usize,
        total: usize,
        radius: f64,
        horizon: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
