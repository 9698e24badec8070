use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum Error {
    #[error("particle number must be at least {min}, got {found}")]
    TooFewParticles { min: usize, found: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized: norm^2 = {0}")]
    NotNormalized(f64),

    #[error("operator is not Hermitian: max |M - M^dag| = {0:e}")]
    NotHermitian(f64),

    #[error("degenerate spectrum: eigenvalues {lower} and {upper} are closer than {tol:e}")]
    DegenerateSpectrum { lower: f64, upper: f64, tol: f64 },

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error(
        "Fisher information singular at outcome {index}: P = {probability:e}, dP = {derivative:e}"
    )]
    Singularity { index: usize, probability: f64, derivative: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("no candidate basis satisfies the optimality conditions")]
    NoOptimalBasis,
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Self::InvalidParameter { name, reason: reason.into() }
    }
}
