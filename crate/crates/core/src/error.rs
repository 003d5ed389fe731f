use thiserror::Error;

use crate::algebra::Var;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A product produced a λ-exponent below the lower edge of the window.
    #[error("pole overflow: exponent {exponent} is below the window edge {lo}")]
    PoleOverflow { exponent: i32, lo: i32 },

    #[error("window mismatch: [{0}, {1}] vs [{2}, {3}]")]
    WindowMismatch(i32, i32, i32, i32),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("variable {0} has no value in the evaluation point")]
    UnassignedVariable(Var),

    #[error("tree set is not closed under the coproduct: {0}")]
    NotClosed(String),

    #[error("the two operands live on different tree bases")]
    BasisMismatch,

    #[error("lie algebra is not nilpotent (lower central series stabilizes at dimension {0})")]
    NotNilpotent(usize),

    #[error("exp(-tX) did not terminate within the degree cap")]
    NonNilpotent,

    #[error("character is not local")]
    NotLocal,

    #[error("beta function has a pole at λ^{0}")]
    NotHolomorphicBeta(i32),

    #[error("polynomials belong to different Poisson algebras")]
    AlgebraMismatch,

    #[error("linear system is inconsistent: {0}")]
    Inconsistent(String),

    #[error("locality check changed when the window was enlarged")]
    TruncationSensitive,

    #[error("operation unsupported: {0}")]
    Unsupported(String),

    #[error(
        "conjugations by g- and g+ disagree on tree {0} (a window too narrow for λ^p·L₀ truncates the positive tail)"
    )]
    ConjugationMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),
}
