use crate::half_integer::HalfInt;

/// Errors shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The raw coefficient vector of a constructed state vanished entirely.
    /// Cannot happen for valid inputs at moderate spin; guards float underflow.
    #[error("degenerate state: all construction coefficients are zero")]
    DegenerateState,

    /// A polynomial root failed its residual check after the iteration budget.
    #[error("root finding failed: residual {residual:.3e} exceeds {limit:.1e}")]
    RootFinding { residual: f64, limit: f64 },

    /// Matrix too large for a permanent evaluation.
    #[error("matrix of size {size} exceeds the permanent cap of {cap}")]
    SizeLimit { size: usize, cap: usize },

    /// Argument outside an operation's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// Quadrature grid cannot integrate the requested band limit exactly.
    #[error("quadrature degree {degree} too low: spin {spin} needs degree >= {needed}")]
    QuadratureDegreeTooLow {
        degree: u32,
        needed: u32,
        spin: HalfInt,
    },

    /// Spin above the configured engine maximum.
    #[error("spin {spin} exceeds the supported maximum {max}")]
    OutOfRange { spin: HalfInt, max: HalfInt },

    /// A text input failed to parse; `line` is 1-based.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
