use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The curve carries no convex-hypothesis data (p-ellipses with p >= 1,
    /// or custom curves built without it).
    #[error("convex-hypothesis data unavailable: {0}")]
    HypothesisUnavailable(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("quadrature did not converge within {panels} panels (error estimate {error:e})")]
    QuadratureNotConverged { panels: usize, error: f64 },

    #[error("bound not applicable: {0}")]
    NotApplicable(String),

    #[error("bracket not yet valid: r = {r} is below the threshold {threshold}")]
    BracketNotValid { r: f64, threshold: f64 },

    #[error("no lattice point lies under the curve for any stretch at r = {r}")]
    NoLatticePoint { r: f64 },

    #[error("input exceeds the brute-force size guard: {0}")]
    TooLarge(String),

    /// The dilated curve passes through a lattice point (within tolerance).
    #[error("degenerate: {0}")]
    Degenerate(String),

    #[error("already balanced: every distance to 1 is zero")]
    AlreadyBalanced,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("bracket failure: {0}")]
    BracketFailure(String),
}
