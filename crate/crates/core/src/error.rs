use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the numerical and categorical operations of this crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite matrix entry")]
    NonFinite,

    #[error("spectra overlap: eigenvalue {left} of the left operand is within {gap:e} of eigenvalue {right} of the right operand")]
    SpectrumCollision {
        left: Complex64,
        right: Complex64,
        gap: f64,
    },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("Schur iteration did not converge within {iterations} sweeps")]
    NoConvergence { iterations: usize },

    #[error("regularity violated: nonzero coefficient of norm {norm:e} at power z^{power}")]
    RegularityViolation { power: i32, norm: f64 },

    #[error("equivariance matrix B has a singular leading coefficient (smallest singular value {sigma_min:e})")]
    SingularB { sigma_min: f64 },

    #[error("equivariance violated: residual {residual:e} exceeds {bound:e}")]
    EquivarianceViolation { residual: f64, bound: f64 },

    #[error("normalized B is not constant: residual {residual:e} exceeds {bound:e} at truncation order {truncation}")]
    NonConstantB {
        residual: f64,
        bound: f64,
        truncation: usize,
    },

    #[error("parameter mismatch: {0}")]
    ParameterMismatch(String),

    #[error("objects are not normalized to the same transversal")]
    TransversalMismatch,

    #[error("invalid tolerances: {0}")]
    InvalidTolerances(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("Moebius transformation has a pole at tau")]
    Pole,

    #[error("tau is real; no modular image has finite width")]
    RealTau,

    #[error("the zero class has no phase")]
    ZeroClass,

    #[error("({m}, {n}) are not coprime")]
    NotCoprime { m: i64, n: i64 },

    #[error("rank m*theta + n = {rank} is not positive")]
    NonPositiveRank { rank: f64 },

    #[error("no common eigenvector found (best residual {residual:e})")]
    CommonEigenvector { residual: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures caused by the input violating a documented invariant
    /// or schema, as opposed to a numerical breakdown inside an algorithm.
    pub fn is_validation(&self) -> bool {
        !matches!(
            self,
            Error::NoConvergence { .. }
                | Error::CommonEigenvector { .. }
                | Error::NonConstantB { .. }
                | Error::SpectrumCollision { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
