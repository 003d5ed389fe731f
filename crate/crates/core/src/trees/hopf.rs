//! The Connes–Kreimer Hopf algebra on the forest basis.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::tree::{Forest, RootedTree};
use crate::algebra::Scalar;
use crate::error::{Error, Result};

/// Which tensor factor receives the trunk (the part containing the root).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Orientation {
    /// `Δ(T) = Σ P(T) ⊗ R(T)`: pruned forest left, trunk right.
    #[default]
    PrunedTrunk,
    /// The flipped convention, kept only for mutation testing.
    TrunkPruned,
}

#[derive(Clone, PartialEq, Eq, Default)]
pub struct HopfElement {
    terms: BTreeMap<Forest, Scalar>,
}

impl HopfElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit() -> Self {
        Self::from_forest(Forest::unit())
    }

    pub fn from_forest(f: Forest) -> Self {
        Self::term(f, Scalar::one())
    }

    pub fn from_tree(t: RootedTree) -> Self {
        Self::from_forest(Forest::single(t))
    }

    pub fn term(f: Forest, c: Scalar) -> Self {
        let mut out = Self::zero();
        out.add_term(f, &c);
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Forest, &Scalar)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, f: Forest, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(f.clone()).or_insert_with(Scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&f);
        }
    }

    pub fn add(&self, other: &HopfElement) -> HopfElement {
        let mut out = self.clone();
        for (f, c) in &other.terms {
            out.add_term(f.clone(), c);
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> HopfElement {
        let mut out = HopfElement::zero();
        for (f, a) in &self.terms {
            out.add_term(f.clone(), &(a * c));
        }
        out
    }

    pub fn mul(&self, other: &HopfElement) -> HopfElement {
        let mut out = HopfElement::zero();
        for (f, a) in &self.terms {
            for (g, b) in &other.terms {
                out.add_term(f.mul(g), &(a * b));
            }
        }
        out
    }

    /// Component of degree `n`.
    pub fn homogeneous(&self, n: usize) -> HopfElement {
        HopfElement {
            terms: self.terms.iter().filter(|(f, _)| f.degree() == n).map(|(f, c)| (f.clone(), c.clone())).collect(),
        }
    }
}

impl fmt::Display for HopfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(k, c)| format!("{c}*{{{k}}}")).collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for HopfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Default)]
pub struct TensorElement {
    terms: BTreeMap<(Forest, Forest), Scalar>,
}

impl TensorElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn simple(a: Forest, b: Forest) -> Self {
        let mut out = Self::zero();
        out.add_term(a, b, &Scalar::one());
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(Forest, Forest), &Scalar)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, a: Forest, b: Forest, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        let key = (a, b);
        let entry = self.terms.entry(key.clone()).or_insert_with(Scalar::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &TensorElement) -> TensorElement {
        let mut out = self.clone();
        for ((a, b), c) in &other.terms {
            out.add_term(a.clone(), b.clone(), c);
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> TensorElement {
        let mut out = TensorElement::zero();
        for ((a, b), x) in &self.terms {
            out.add_term(a.clone(), b.clone(), &(x * c));
        }
        out
    }

    /// Product in `ℋ ⊗ ℋ`.
    pub fn mul(&self, other: &TensorElement) -> TensorElement {
        let mut out = TensorElement::zero();
        for ((a, b), x) in &self.terms {
            for ((c, d), y) in &other.terms {
                out.add_term(a.mul(c), b.mul(d), &(x * y));
            }
        }
        out
    }

    /// `τ`: swap the tensor factors.
    pub fn flip(&self) -> TensorElement {
        let mut out = TensorElement::zero();
        for ((a, b), c) in &self.terms {
            out.add_term(b.clone(), a.clone(), c);
        }
        out
    }

    /// `μ(f ⊗ g)` for linear maps given on forests.
    pub fn contract<F, G>(&self, f: F, g: G) -> HopfElement
    where
        F: Fn(&Forest) -> HopfElement,
        G: Fn(&Forest) -> HopfElement,
    {
        let mut out = HopfElement::zero();
        for ((a, b), c) in &self.terms {
            out = out.add(&f(a).mul(&g(b)).scale(c));
        }
        out
    }
}

impl fmt::Display for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|((a, b), c)| format!("{c}*({a} ⊗ {b})")).collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for TensorElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Admissible-cut coproduct of a single tree, trunk on the right, via
/// `Δ(B₊(F)) = B₊(F) ⊗ 1 + (id ⊗ B₊) Δ(F)`.
fn coproduct_tree(t: &RootedTree) -> TensorElement {
    let mut children_delta = TensorElement::simple(Forest::unit(), Forest::unit());
    for c in t.children() {
        children_delta = children_delta.mul(&coproduct_tree(c));
    }
    let mut out = TensorElement::simple(Forest::single(t.clone()), Forest::unit());
    for ((a, b), c) in children_delta.terms() {
        out.add_term(a.clone(), Forest::single(RootedTree::graft(b.trees().to_vec())), c);
    }
    out
}

pub fn coproduct_forest(f: &Forest, orientation: Orientation) -> TensorElement {
    let mut out = TensorElement::simple(Forest::unit(), Forest::unit());
    for t in f.trees() {
        out = out.mul(&coproduct_tree(t));
    }
    match orientation {
        Orientation::PrunedTrunk => out,
        Orientation::TrunkPruned => out.flip(),
    }
}

pub fn coproduct(x: &HopfElement) -> TensorElement {
    coproduct_with(x, Orientation::PrunedTrunk)
}

pub fn coproduct_with(x: &HopfElement, orientation: Orientation) -> TensorElement {
    let mut out = TensorElement::zero();
    for (f, c) in x.terms() {
        out = out.add(&coproduct_forest(f, orientation).scale(c));
    }
    out
}

pub fn counit(x: &HopfElement) -> Scalar {
    x.terms().find(|(f, _)| f.is_unit()).map_or_else(Scalar::zero, |(_, c)| c.clone())
}

/// `Y(x) = n·x` on degree-`n` components.
pub fn grading_y(x: &HopfElement) -> HopfElement {
    let mut out = HopfElement::zero();
    for (f, c) in x.terms() {
        out.add_term(f.clone(), &(c * &Scalar::from_int(f.degree() as i64)));
    }
    out
}

fn antipode_tree(t: &RootedTree, memo: &mut HashMap<RootedTree, HopfElement>) -> HopfElement {
    if let Some(s) = memo.get(t) {
        return s.clone();
    }
    // μ(S ⊗ id)Δ(T) = 0 with the T ⊗ 1 term isolated.
    let mut rest = HopfElement::zero();
    for ((a, b), c) in coproduct_tree(t).terms() {
        if b.is_unit() {
            continue;
        }
        let s_a = antipode_forest_memo(a, memo);
        rest = rest.add(&s_a.mul(&HopfElement::from_forest(b.clone())).scale(c));
    }
    let s = rest.scale(&Scalar::from_int(-1));
    memo.insert(t.clone(), s.clone());
    s
}

fn antipode_forest_memo(f: &Forest, memo: &mut HashMap<RootedTree, HopfElement>) -> HopfElement {
    let mut out = HopfElement::unit();
    for t in f.trees() {
        out = out.mul(&antipode_tree(t, memo));
    }
    out
}

pub fn antipode(x: &HopfElement) -> HopfElement {
    let mut memo = HashMap::new();
    let mut out = HopfElement::zero();
    for (f, c) in x.terms() {
        out = out.add(&antipode_forest_memo(f, &mut memo).scale(c));
    }
    out
}

/// One summand of `Δ(T)` for a basis generator, with trees given by index.
#[derive(Clone, Debug, PartialEq)]
pub struct CutTerm {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub coeff: Scalar,
}

/// A finite set of trees closed under the coproduct, indexed in
/// `(degree, encoding)` order, with the coproduct of every tree precomputed.
#[derive(Clone, Debug)]
pub struct TreeBasis {
    trees: Vec<RootedTree>,
    index: HashMap<RootedTree, usize>,
    cuts: Vec<Vec<CutTerm>>,
    orientation: Orientation,
}

impl PartialEq for TreeBasis {
    fn eq(&self, other: &Self) -> bool {
        self.trees == other.trees && self.orientation == other.orientation
    }
}

impl TreeBasis {
    pub fn new(trees: Vec<RootedTree>) -> Result<Self> {
        Self::with_orientation(trees, Orientation::PrunedTrunk)
    }

    pub fn with_orientation(mut trees: Vec<RootedTree>, orientation: Orientation) -> Result<Self> {
        trees.sort();
        trees.dedup();
        let index: HashMap<RootedTree, usize> = trees.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        let lookup = |f: &Forest| -> Result<Vec<usize>> {
            f.trees().iter().map(|t| index.get(t).copied().ok_or_else(|| Error::NotClosed(t.to_string()))).collect()
        };
        let mut cuts = Vec::with_capacity(trees.len());
        for t in &trees {
            let delta = coproduct_forest(&Forest::single(t.clone()), orientation);
            let mut terms = Vec::new();
            for ((a, b), c) in delta.terms() {
                terms.push(CutTerm { left: lookup(a)?, right: lookup(b)?, coeff: c.clone() });
            }
            cuts.push(terms);
        }
        Ok(TreeBasis { trees, index, cuts, orientation })
    }

    /// Every tree up to `max_degree`.
    pub fn full(max_degree: usize) -> Self {
        Self::new(super::enumerate_trees(max_degree)).expect("all trees form a closed set")
    }

    /// Corollas `c₁ … c_n` (root with `k − 1` leaves), a Hopf subalgebra.
    pub fn corollas(n: usize) -> Self {
        Self::new((1..=n).map(RootedTree::corolla).collect()).expect("corollas are closed")
    }

    pub fn corollas_with(n: usize, orientation: Orientation) -> Self {
        Self::with_orientation((1..=n).map(RootedTree::corolla).collect(), orientation).expect("corollas are closed")
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    pub fn trees(&self) -> &[RootedTree] {
        &self.trees
    }

    pub fn tree(&self, i: usize) -> &RootedTree {
        &self.trees[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.trees[i].degree()
    }

    pub fn index_of(&self, t: &RootedTree) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn cuts(&self, i: usize) -> &[CutTerm] {
        &self.cuts[i]
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Forest as sorted tree indices, or `NotClosed`.
    pub fn forest_indices(&self, f: &Forest) -> Result<Vec<usize>> {
        f.trees().iter().map(|t| self.index_of(t).ok_or_else(|| Error::NotClosed(t.to_string()))).collect()
    }
}
