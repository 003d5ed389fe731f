//! Exact arithmetic substrate: Gaussian rationals, sparse polynomials,
//! truncated Laurent series and exact matrices.

mod laurent;
mod matrix;
mod poly;
mod scalar;

pub use laurent::{Laurent, Window};
pub use matrix::{scalar_rank, solve_linear, ExactMatrix, LinearSolution, SymbolicRank};
pub use poly::{Assignment, Monomial, MultiPoly, Var};
pub use scalar::Scalar;
