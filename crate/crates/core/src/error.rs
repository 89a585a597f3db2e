use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The inner system of a rank update is singular; the caller should
    /// recompute the inverse from scratch.
    #[error("rank update is singular (inner pivot {pivot:e})")]
    SingularUpdate { pivot: f64 },

    /// Every coefficient of the polynomial is zero, so every point is a root.
    #[error("polynomial is identically zero")]
    DegeneratePolynomial,

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    /// A detector lost positive definiteness of its covariance. Carries the
    /// last activities that were known to be valid.
    #[error("detector conditioning failure after {sweeps} sweeps: {reason}")]
    Conditioning {
        reason: String,
        sweeps: usize,
        last_soft: Vec<f64>,
    },

    #[error("unsupported: {0}")]
    Capability(String),

    #[error("experiment failed: {0}")]
    Experiment(String),
}
