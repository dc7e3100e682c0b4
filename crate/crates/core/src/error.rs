use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Every failure the numerical core can report.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidParameter { name: &'static str, reason: &'static str },
    /// An operation that only exists for one `lambda` was called with another.
    WrongLambda { expected: f64, found: f64 },
    NonConvergence { what: &'static str, detail: f64 },
    EigenSolver { n: usize },
    TableTooShort { needed: usize, available: usize },
    DimensionMismatch { expected: usize, found: usize },
    UnboundedSupport,
    NoAdmissibleXi { n: u64, min_rank: u64 },
    MissingDerivative,
    DegenerateFit,
    TailDominated { ratio: f64 },
    EnumerationBound { bound: u64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, reason } => {
                write!(f, "invalid parameter `{name}`: {reason}")
            }
            Error::WrongLambda { expected, found } => {
                write!(f, "operation requires lambda = {expected}, got {found}")
            }
            Error::NonConvergence { what, detail } => {
                write!(f, "{what} did not converge (last change {detail:e})")
            }
            Error::EigenSolver { n } => write!(f, "tridiagonal eigensolver failed for n = {n}"),
            Error::TableTooShort { needed, available } => write!(
                f,
                "recurrence table too short: need {needed} coefficients, have {available}"
            ),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::UnboundedSupport => write!(f, "operator has unbounded support"),
            Error::NoAdmissibleXi { n, min_rank } => write!(
                f,
                "no admissible xi: n = {n} is below the minimal rank {min_rank}"
            ),
            Error::MissingDerivative => write!(f, "function oracle has no derivative evaluator"),
            Error::DegenerateFit => write!(f, "degenerate design matrix in rate fit"),
            Error::TailDominated { ratio } => write!(
                f,
                "reference box too small: tail changes the error by {:.3}%",
                ratio * 100.0
            ),
            Error::EnumerationBound { bound } => {
                write!(f, "enumeration bound {bound} too small")
            }
        }
    }
}

impl core::error::Error for Error {}
