use thiserror::Error;

/// Errors raised by the operators and validators in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Operands built over different fields, or an invalid field parameter.
    #[error("parameter error: {0}")]
    Parameter(String),
    /// Division by zero, singular matrices, points outside the half space.
    #[error("math domain error: {0}")]
    MathDomain(String),
    /// The prime is inert or ramified in the quadratic field.
    #[error("prime {p} does not split in Q(sqrt(-{d}))")]
    NotSplit { p: u64, d: i64 },
    /// A p-adic computation ran into the precision cap.
    #[error("p-adic precision exhausted at p^{cap}")]
    Precision { cap: u32 },
    /// Degrees, dimensions or tensor blocks do not line up.
    #[error("shape error: {0}")]
    Shape(String),
    /// Input data violates a documented invariant.
    #[error("validation error: {0}")]
    Validation(String),
    /// The operation is outside what is implemented.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// An output failed a post-condition check.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// True for errors that come from mathematics rather than malformed input.
    pub fn is_math_domain(&self) -> bool {
        matches!(
            self,
            Error::MathDomain(_) | Error::NotSplit { .. } | Error::Precision { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
