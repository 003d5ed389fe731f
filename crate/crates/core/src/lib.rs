//! Exact computations in the Connes–Kreimer Hopf algebra of rooted trees and
//! the Lax-pair flows it induces on nilpotent double Lie algebras.
//!
//! Everything is exact: scalars are Gaussian rationals, flow time `t` and the
//! scaling parameter `s` are polynomial indeterminates, and Laurent series are
//! truncated in an explicit window. The only floating-point code is the RK4
//! cross-check in [`flow::rk4`].

pub mod algebra;
pub mod characters;
pub mod claims;
pub mod error;
pub mod flow;
pub mod lie;
pub mod poisson;
pub mod trees;

pub use error::{Error, Result};
