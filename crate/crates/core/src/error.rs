use thiserror::Error;

/// Errors produced by the dynamics kernels.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inconsistent configuration (e.g. grid does not match the well spec).
    #[error("configuration error: {0}")]
    Config(String),

    /// The field is zero (or masked) everywhere; no polar decomposition exists.
    #[error("degenerate field: every node is masked")]
    DegenerateField,

    /// Too many interior nodes are masked for the quantum potential to be meaningful.
    #[error("ill-conditioned field: masked fraction {masked_fraction:.3} exceeds 0.5")]
    IllConditionedField { masked_fraction: f64 },

    /// A trajectory spent too many consecutive steps inside a masked region.
    #[error("trajectory entered a masked region at t = {time}, x = {position}")]
    MaskedRegion { time: f64, position: f64 },

    /// A trajectory reached the wall clamp, which exact Bohmian dynamics forbids.
    #[error("trajectory hit the wall clamp at t = {time}, x = {position}")]
    WallClamp { time: f64, position: f64 },

    /// Non-finite values appeared during numerical work.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A per-particle failure inside an ensemble run.
    #[error("particle {index}: {source}")]
    Particle {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
