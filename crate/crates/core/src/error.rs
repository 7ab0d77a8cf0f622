use thiserror::Error;

/// Errors raised anywhere in the toolkit.
///
/// Variants split into two families: validation failures (malformed input,
/// violated preconditions) and numerical failures (an iteration or a
/// decomposition that could not settle at the configured tolerance). The CLI
/// maps them onto different exit codes via [`Error::is_numerical`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be square with dimension >= 1 (got {rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not self-adjoint (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not a projector (deviation {deviation:.3e})")]
    NotProjector { deviation: f64 },
    #[error("density has a negative eigenvalue {eigenvalue:.3e}")]
    NotPositive { eigenvalue: f64 },
    #[error("density trace is {trace:.12}, expected 1")]
    NotNormalized { trace: f64 },
    #[error("element does not lie in the algebra (residual {residual:.3e})")]
    NotInAlgebra { residual: f64 },
    #[error("algebra is not commutative")]
    NotCommutative,
    #[error("family is not pairwise orthogonal (members {first} and {second})")]
    NotOrthogonalFamily { first: usize, second: usize },
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("logical value {value} lies outside [0, 1]")]
    ValueOutOfRange { value: f64 },

    #[error("algebra closure still growing at word length {word_cap}")]
    ClosureNotReached { word_cap: usize },
    #[error("meet iteration did not converge after {iterations} steps (residual {residual:.3e})")]
    ConvergenceFailed { iterations: usize, residual: f64 },
    #[error("iterative and null-space meets disagree (residual {residual:.3e})")]
    RouteMismatch { residual: f64 },
    #[error("joint eigenvalue clusters of the center are ambiguous: {0}")]
    CenterDiagonalizationFailed(String),
    #[error("{0} failed to converge")]
    DecompositionFailed(&'static str),
    #[error("envelope differs from the closed algebra (residual {residual:.3e})")]
    EnvelopeMismatch { residual: f64 },

    #[error("scenario `{name}`: {source}")]
    Scenario {
        name: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// True for failures of a numerical procedure rather than of the input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::ClosureNotReached { .. }
            | Error::ConvergenceFailed { .. }
            | Error::RouteMismatch { .. }
            | Error::CenterDiagonalizationFailed(_)
            | Error::DecompositionFailed(_)
            | Error::EnvelopeMismatch { .. } => true,
            Error::Scenario { source, .. } => source.is_numerical(),
            _ => false,
        }
    }

    pub(crate) fn in_scenario(self, name: &str) -> Error {
        Error::Scenario {
            name: name.to_string(),
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
