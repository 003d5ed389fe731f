//! Rooted trees, forests and the Connes–Kreimer Hopf algebra.

mod hopf;
mod tree;

pub use hopf::{
    antipode, coproduct, coproduct_forest, coproduct_with, counit, grading_y, CutTerm, HopfElement, Orientation,
    TensorElement, TreeBasis,
};
pub use tree::{enumerate_forests, enumerate_trees, Forest, RootedTree};
