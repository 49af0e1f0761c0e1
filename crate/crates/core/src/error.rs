use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report. Each variant has a stable string
/// code and a process exit code used by the command-line front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial does not split over the exact backend: {0}")]
    IrreducibleOverBackend(String),
    #[error("division by a series that is zero to precision")]
    ZeroDivision,
    #[error("series has a non-zero coefficient killed by the derivation: {0}")]
    NotIntegrable(String),
    #[error("coefficient has negative valuation {0}")]
    NegativeValuation(String),
    #[error("shear exponent {0} exceeds the minimal slope {1}")]
    NotMinimalSlope(String, String),
    #[error("reduced factors are not (shifted) coprime")]
    CoprimalityViolation,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("gauge matrix is singular to precision")]
    SingularGauge,
    #[error("resonance while decoupling eigenvalue classes: {0}")]
    Resonance(String),
    #[error("operator is not unipotent: {0}")]
    NotUnipotent(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::IrreducibleOverBackend(_) => "irreducible_over_backend",
            Error::ZeroDivision => "zero_division",
            Error::NotIntegrable(_) => "not_integrable",
            Error::NegativeValuation(_) => "negative_valuation",
            Error::NotMinimalSlope(..) => "not_minimal_slope",
            Error::CoprimalityViolation => "coprimality_violation",
            Error::PrecisionExhausted(_) => "precision_exhausted",
            Error::SingularGauge => "singular_gauge",
            Error::Resonance(_) => "resonance",
            Error::NotUnipotent(_) => "not_unipotent",
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::Unsupported(_) => "unsupported",
            Error::Parse { .. } => "parse_error",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 2,
            Error::IrreducibleOverBackend(_) => 3,
            Error::PrecisionExhausted(_) => 4,
            Error::Resonance(_) => 5,
            Error::CoprimalityViolation => 6,
            Error::ZeroDivision => 7,
            Error::NotIntegrable(_) => 8,
            Error::NegativeValuation(_) => 9,
            Error::NotMinimalSlope(..) => 10,
            Error::SingularGauge => 11,
            Error::NotUnipotent(_) => 12,
            Error::DimensionMismatch(_) => 13,
            Error::Unsupported(_) => 14,
        }
    }

    /// All error codes, in exit-code order. Used by the CLI documentation and tests.
    pub const CODES: [(&'static str, i32); 13] = [
        ("parse_error", 2),
        ("irreducible_over_backend", 3),
        ("precision_exhausted", 4),
        ("resonance", 5),
        ("coprimality_violation", 6),
        ("zero_division", 7),
        ("not_integrable", 8),
        ("negative_valuation", 9),
        ("not_minimal_slope", 10),
        ("singular_gauge", 11),
        ("not_unipotent", 12),
        ("dimension_mismatch", 13),
        ("unsupported", 14),
    ];
}
