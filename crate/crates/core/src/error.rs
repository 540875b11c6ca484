use std::path::PathBuf;

/// Errors raised by the modal-analysis library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method exhausted its budget. Signals a bug, not bad input.
    #[error("{what} did not converge after {iterations} iterations")]
    Convergence { what: &'static str, iterations: usize },

    /// A field evaluation point lies outside the resonator.
    #[error("point (r={r}, phi={phi}, z={z}) lies outside the resonator")]
    OutOfDomain { r: f64, phi: f64, z: f64 },

    /// The field has a genuine singularity at the requested point.
    #[error("field is singular on the axis for azimuthal order {v}")]
    SingularAxis { v: f64 },

    #[error("tissue grid mass {total_kg} kg is below the averaging mass {target_kg} kg")]
    InsufficientMass { total_kg: f64, target_kg: f64 },

    #[error("no SAR limit is defined for {0}")]
    UnknownLimit(String),

    #[error("bracket [{lo}, {hi}] does not straddle the target {target}")]
    BracketNoStraddle { lo: f64, hi: f64, target: f64 },

    #[error("frequency is not monotone in radius over [{lo}, {hi}]")]
    NonMonotone { lo: f64, hi: f64 },

    #[error("sweep step {step} ({param} = {value}) gives an invalid geometry: {reason}")]
    InvalidSweepStep { step: usize, param: &'static str, value: f64, reason: String },

    #[error("malformed input: {0}")]
    Format(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
