use thiserror::Error;

use crate::sqrt::SqrtResult;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: String,
        found: String,
    },

    #[error("non-finite value {value} at position {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("zero divisor at index {index}")]
    ZeroDivisor { index: usize },

    #[error("not a Z-matrix: positive off-diagonal entry {value} at ({row}, {col})")]
    NotZMatrix { row: usize, col: usize, value: f64 },

    #[error("u must be strictly positive; u[{index}] = {value}")]
    NonPositiveU { index: usize, value: f64 },

    #[error("A*u is materially negative at row {index}: {value} (tolerance {tolerance})")]
    NegativeV {
        index: usize,
        value: f64,
        tolerance: f64,
    },

    #[error("invalid triplet: {0}")]
    InvalidTriplet(String),

    #[error("scale factor must be positive, got {0}")]
    InvalidScale(f64),

    #[error("zero pivot at elimination step {step} before the last row")]
    StructuralBreakdown { step: usize },

    #[error("matrix represented by the triplet is singular (last pivot is zero)")]
    Singular,

    #[error("exactly singular matrix: no nonzero pivot in column {column}")]
    SingularPivot { column: usize },

    #[error("the zero matrix has no scaling for the square root iteration")]
    ZeroMatrix,

    #[error("no column of C = I - A/s has all entries positive")]
    NoShiftColumn,

    #[error("shifted variant requires A*u = 0 (v[{index}] = {value})")]
    NotSingularInput { index: usize, value: f64 },

    #[error("shifted variant requires an irreducible matrix, found {blocks} diagonal blocks")]
    Reducible { blocks: usize },

    #[error("invalid shift: {0}")]
    InvalidShift(String),

    #[error("no convergence after {} iterations", .result.iterations)]
    NotConverged { result: Box<SqrtResult> },

    #[error("extended-precision reference did not converge after {iterations} iterations")]
    ReferenceNotConverged { iterations: usize },

    #[error("step mismatch: Newton state at step {newton}, cyclic reduction state at step {cr}")]
    StepMismatch { newton: usize, cr: usize },

    #[error("extended-precision division by zero")]
    XpDivisionByZero,

    #[error("extended-precision square root of negative value {0}")]
    XpNegativeSqrt(f64),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable identifier used on `ERROR` lines of the CLI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NonFinite { .. } => "non_finite",
            Error::ZeroDivisor { .. } => "zero_divisor",
            Error::NotZMatrix { .. } => "not_z_matrix",
            Error::NonPositiveU { .. } => "nonpositive_u",
            Error::NegativeV { .. } => "negative_v",
            Error::InvalidTriplet(_) => "invalid_triplet",
            Error::InvalidScale(_) => "invalid_scale",
            Error::StructuralBreakdown { .. } => "structural_breakdown",
            Error::Singular => "singular",
            Error::SingularPivot { .. } => "singular_pivot",
            Error::ZeroMatrix => "zero_matrix",
            Error::NoShiftColumn => "no_shift_column",
            Error::NotSingularInput { .. } => "not_singular_input",
            Error::Reducible { .. } => "reducible",
            Error::InvalidShift(_) => "invalid_shift",
            Error::NotConverged { .. } => "not_converged",
            Error::ReferenceNotConverged { .. } => "reference_not_converged",
            Error::StepMismatch { .. } => "step_mismatch",
            Error::XpDivisionByZero => "xp_division_by_zero",
            Error::XpNegativeSqrt(_) => "xp_negative_sqrt",
            Error::Parse { .. } => "parse",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
        }
    }

    /// Whether the failure is numerical (as opposed to bad input or usage).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StructuralBreakdown { .. }
                | Error::Singular
                | Error::SingularPivot { .. }
                | Error::NotConverged { .. }
                | Error::ReferenceNotConverged { .. }
                | Error::XpDivisionByZero
                | Error::XpNegativeSqrt(_)
        )
    }
}

pub(crate) fn dim_mismatch(op: &'static str, expected: impl ToString, found: impl ToString) -> Error {
    Error::DimensionMismatch {
        op,
        expected: expected.to_string(),
        found: found.to_string(),
    }
}
