use core::fmt;

/// Errors raised by the core algebra and quantization routines.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// Operands disagree on the number of variables or on matrix dimensions.
    DimensionMismatch { expected: usize, found: usize },
    /// An argument violates the operation's precondition.
    InvalidInput(&'static str),
    /// Structure constants fail antisymmetry or the Jacobi identity.
    InvalidStructure { defect: f64 },
    /// The Killing metric is singular (or too badly conditioned to invert).
    DegenerateMetric { condition: f64 },
    /// A matrix entry is NaN or infinite.
    NonFinite,
    /// Too few nonzero samples to fit a scaling exponent.
    InsufficientData { nonzero: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::InvalidStructure { defect } => {
                write!(f, "structure constants are not a Lie algebra (defect {defect:.3e})")
            }
            Error::DegenerateMetric { condition } => {
                write!(f, "Killing metric is degenerate (condition number {condition:.3e})")
            }
            Error::NonFinite => f.write_str("matrix contains non-finite entries"),
            Error::InsufficientData { nonzero } => {
                write!(f, "need at least 3 nonzero defects for a fit, got {nonzero}")
            }
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn ensure_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
