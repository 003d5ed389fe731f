//! Characters and infinitesimal characters of a tree basis, valued in
//! truncated Laurent series, and the convolution calculus on them.
//!
//! Both kinds are stored by their values on the basis trees. A character is
//! extended multiplicatively to forests; an infinitesimal character vanishes
//! on the unit and on every product of two or more trees.

mod birkhoff;
mod locality;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::algebra::{Laurent, MultiPoly, Scalar, Var, Window};
use crate::error::{Error, Result};
use crate::trees::{antipode, HopfElement, TreeBasis};

pub use birkhoff::{birkhoff, birkhoff_by_splitting, BirkhoffPair};
pub use locality::{beta_function, beta_tilde, is_local, is_local_in, scale_phi_s};

/// Anything that can be paired against the coproduct.
pub trait Functional {
    fn basis(&self) -> &Arc<TreeBasis>;
    fn window(&self) -> Window;
    fn on_unit(&self) -> Laurent;
    fn on_tree(&self, i: usize) -> Laurent;
    /// Value on the forest given by (sorted) tree indices.
    fn on_forest(&self, forest: &[usize]) -> Result<Laurent>;
}

#[derive(Clone, Debug, PartialEq)]
pub struct Character {
    basis: Arc<TreeBasis>,
    window: Window,
    values: Vec<Laurent>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InfChar {
    basis: Arc<TreeBasis>,
    window: Window,
    values: Vec<Laurent>,
}

/// A linear functional known on the unit and on single trees only.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMap {
    basis: Arc<TreeBasis>,
    window: Window,
    unit: Laurent,
    values: Vec<Laurent>,
}

fn check_values(basis: &TreeBasis, window: Window, values: &[Laurent]) -> Result<()> {
    if values.len() != basis.len() {
        return Err(Error::DimensionMismatch { expected: basis.len(), found: values.len() });
    }
    for v in values {
        if v.window() != window {
            let w = v.window();
            return Err(Error::WindowMismatch(window.lo, window.hi, w.lo, w.hi));
        }
    }
    Ok(())
}

fn same_basis(a: &Arc<TreeBasis>, b: &Arc<TreeBasis>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::BasisMismatch)
    }
}

impl Character {
    pub fn new(basis: Arc<TreeBasis>, window: Window, values: Vec<Laurent>) -> Result<Self> {
        check_values(&basis, window, &values)?;
        Ok(Character { basis, window, values })
    }

    /// The counit `ε`, unit of the convolution group.
    pub fn counit(basis: Arc<TreeBasis>, window: Window) -> Self {
        let values = vec![Laurent::zero(window); basis.len()];
        Character { basis, window, values }
    }

    pub fn values(&self) -> &[Laurent] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &Laurent {
        &self.values[i]
    }

    pub fn is_counit(&self) -> bool {
        self.values.iter().all(Laurent::is_zero)
    }

    pub fn map_values<F: Fn(&Laurent) -> Laurent>(&self, f: F) -> Character {
        Character { basis: self.basis.clone(), window: self.window, values: self.values.iter().map(f).collect() }
    }

    pub fn try_map_values<F: Fn(&Laurent) -> Result<Laurent>>(&self, f: F) -> Result<Character> {
        let values = self.values.iter().map(f).collect::<Result<_>>()?;
        Ok(Character { basis: self.basis.clone(), window: self.window, values })
    }

    pub fn try_map_values_indexed<F>(&self, f: F) -> Result<Character>
    where
        F: Fn(usize, &Laurent) -> Result<Laurent>,
    {
        let values = self.values.iter().enumerate().map(|(i, v)| f(i, v)).collect::<Result<_>>()?;
        Ok(Character { basis: self.basis.clone(), window: self.window, values })
    }

    pub fn with_window(&self, window: Window) -> Result<Character> {
        let values = self.values.iter().map(|v| v.with_window(window)).collect::<Result<_>>()?;
        Ok(Character { basis: self.basis.clone(), window, values })
    }

    pub fn convolve<F: Functional>(&self, other: &F) -> Result<Character> {
        Ok(Character::from_linear(convolve(self, other)?))
    }

    /// Trust that `m` is multiplicative and keep its tree values.
    pub fn from_linear(m: LinearMap) -> Character {
        Character { basis: m.basis, window: m.window, values: m.values }
    }

    /// `φ⁻¹` by the recursion `φ⁻¹(T) = −Σ′ φ⁻¹(P)·φ(R)` over non-final cuts.
    pub fn inverse(&self) -> Result<Character> {
        let mut inv: Vec<Laurent> = Vec::with_capacity(self.values.len());
        for i in 0..self.basis.len() {
            let mut acc = Laurent::zero(self.window);
            for cut in self.basis.cuts(i) {
                if cut.left.as_slice() == [i] {
                    continue;
                }
                let left = product(&inv, &cut.left, self.window)?;
                let right = self.on_forest(&cut.right)?;
                acc = acc.add(&left.mul(&right)?.scale(&cut.coeff));
            }
            inv.push(acc.neg());
        }
        Ok(Character { basis: self.basis.clone(), window: self.window, values: inv })
    }

    /// `φ⁻¹ = φ ∘ S`, evaluated through the antipode of each basis tree.
    pub fn inverse_via_antipode(&self) -> Result<Character> {
        let mut values = Vec::with_capacity(self.values.len());
        for t in self.basis.trees() {
            let s = antipode(&HopfElement::from_tree(t.clone()));
            let mut acc = Laurent::zero(self.window);
            for (f, c) in s.terms() {
                let idx = self.basis.forest_indices(f)?;
                acc = acc.add(&self.on_forest(&idx)?.scale(c));
            }
            values.push(acc);
        }
        Ok(Character { basis: self.basis.clone(), window: self.window, values })
    }

    /// Keep only the `λ⁰` coefficient of each value; for a holomorphic
    /// character this is evaluation at `λ = 0`.
    pub fn at_lambda_zero(&self) -> Character {
        self.map_values(|v| Laurent::constant(v.window(), v.coeff(0)))
    }

    pub fn to_json(&self) -> serde_json::Value {
        values_to_json(&self.basis, &self.values)
    }

    pub fn from_json(basis: Arc<TreeBasis>, window: Window, v: &serde_json::Value) -> Result<Self> {
        let values = values_from_json(&basis, window, v)?;
        Character::new(basis, window, values)
    }
}

impl Functional for Character {
    fn basis(&self) -> &Arc<TreeBasis> {
        &self.basis
    }
    fn window(&self) -> Window {
        self.window
    }
    fn on_unit(&self) -> Laurent {
        Laurent::one(self.window)
    }
    fn on_tree(&self, i: usize) -> Laurent {
        self.values[i].clone()
    }
    fn on_forest(&self, forest: &[usize]) -> Result<Laurent> {
        product(&self.values, forest, self.window)
    }
}

fn product(values: &[Laurent], forest: &[usize], window: Window) -> Result<Laurent> {
    match forest {
        [] => Ok(Laurent::one(window)),
        [i] => Ok(values[*i].clone()),
        [first, rest @ ..] => {
            let mut acc = values[*first].clone();
            for i in rest {
                if acc.is_zero() {
                    break;
                }
                acc = acc.mul(&values[*i])?;
            }
            Ok(acc)
        }
    }
}

impl InfChar {
    pub fn new(basis: Arc<TreeBasis>, window: Window, values: Vec<Laurent>) -> Result<Self> {
        check_values(&basis, window, &values)?;
        Ok(InfChar { basis, window, values })
    }

    pub fn zero(basis: Arc<TreeBasis>, window: Window) -> Self {
        let values = vec![Laurent::zero(window); basis.len()];
        InfChar { basis, window, values }
    }

    /// `Z_T`: 1 on tree `i`, 0 elsewhere.
    pub fn basis_element(basis: Arc<TreeBasis>, window: Window, i: usize) -> Self {
        let mut z = Self::zero(basis, window);
        z.values[i] = Laurent::one(window);
        z
    }

    /// Fails if `m` is nonzero on the unit.
    pub fn from_linear(m: LinearMap) -> Result<InfChar> {
        if !m.unit.is_zero() {
            return Err(Error::Unsupported("functional is nonzero on the unit".into()));
        }
        Ok(InfChar { basis: m.basis, window: m.window, values: m.values })
    }

    pub fn values(&self) -> &[Laurent] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &Laurent {
        &self.values[i]
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Laurent::is_zero)
    }

    pub fn map_values<F: Fn(&Laurent) -> Laurent>(&self, f: F) -> InfChar {
        InfChar { basis: self.basis.clone(), window: self.window, values: self.values.iter().map(f).collect() }
    }

    pub fn try_map_values<F: Fn(&Laurent) -> Result<Laurent>>(&self, f: F) -> Result<InfChar> {
        let values = self.values.iter().map(f).collect::<Result<_>>()?;
        Ok(InfChar { basis: self.basis.clone(), window: self.window, values })
    }

    pub fn with_window(&self, window: Window) -> Result<InfChar> {
        self.try_map_values(|v| v.with_window(window)).map(|mut z| {
            z.window = window;
            z
        })
    }

    pub fn add(&self, other: &InfChar) -> Result<InfChar> {
        same_basis(&self.basis, &other.basis)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a.add(b)).collect();
        Ok(InfChar { basis: self.basis.clone(), window: self.window, values })
    }

    pub fn sub(&self, other: &InfChar) -> Result<InfChar> {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, c: &Scalar) -> InfChar {
        self.map_values(|v| v.scale(c))
    }

    pub fn scale_poly(&self, c: &MultiPoly) -> InfChar {
        self.map_values(|v| v.scale_poly(c))
    }

    /// Multiply every value by `λ^k`.
    pub fn shift(&self, k: i32) -> Result<InfChar> {
        self.try_map_values(|v| v.shift(k))
    }

    pub fn derivative(&self, v: Var) -> InfChar {
        self.map_values(|x| x.derivative(v))
    }

    /// `[Z, Z′] = Z⋆Z′ − Z′⋆Z`.
    pub fn lie_bracket(&self, other: &InfChar) -> Result<InfChar> {
        let ab = convolve(self, other)?;
        let ba = convolve(other, self)?;
        let values = ab.values.iter().zip(&ba.values).map(|(x, y)| x.sub(y)).collect();
        Ok(InfChar { basis: self.basis.clone(), window: self.window, values })
    }

    /// Coefficient of `λ^k` on every tree.
    pub fn lambda_coeff(&self, k: i32) -> Vec<MultiPoly> {
        self.values.iter().map(|v| v.coeff(k)).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        values_to_json(&self.basis, &self.values)
    }

    pub fn from_json(basis: Arc<TreeBasis>, window: Window, v: &serde_json::Value) -> Result<Self> {
        let values = values_from_json(&basis, window, v)?;
        InfChar::new(basis, window, values)
    }
}

impl Functional for InfChar {
    fn basis(&self) -> &Arc<TreeBasis> {
        &self.basis
    }
    fn window(&self) -> Window {
        self.window
    }
    fn on_unit(&self) -> Laurent {
        Laurent::zero(self.window)
    }
    fn on_tree(&self, i: usize) -> Laurent {
        self.values[i].clone()
    }
    fn on_forest(&self, forest: &[usize]) -> Result<Laurent> {
        Ok(match forest {
            [i] => self.values[*i].clone(),
            _ => Laurent::zero(self.window),
        })
    }
}

impl LinearMap {
    pub fn on_unit_value(&self) -> &Laurent {
        &self.unit
    }

    pub fn values(&self) -> &[Laurent] {
        &self.values
    }
}

impl Functional for LinearMap {
    fn basis(&self) -> &Arc<TreeBasis> {
        &self.basis
    }
    fn window(&self) -> Window {
        self.window
    }
    fn on_unit(&self) -> Laurent {
        self.unit.clone()
    }
    fn on_tree(&self, i: usize) -> Laurent {
        self.values[i].clone()
    }
    fn on_forest(&self, forest: &[usize]) -> Result<Laurent> {
        match forest {
            [] => Ok(self.unit.clone()),
            [i] => Ok(self.values[*i].clone()),
            _ => Err(Error::Unsupported("linear map evaluated on a product of trees".into())),
        }
    }
}

/// `φ − ε`.
pub struct Deviation<'a>(pub &'a Character);

impl Functional for Deviation<'_> {
    fn basis(&self) -> &Arc<TreeBasis> {
        &self.0.basis
    }
    fn window(&self) -> Window {
        self.0.window
    }
    fn on_unit(&self) -> Laurent {
        Laurent::zero(self.0.window)
    }
    fn on_tree(&self, i: usize) -> Laurent {
        self.0.values[i].clone()
    }
    fn on_forest(&self, forest: &[usize]) -> Result<Laurent> {
        if forest.is_empty() {
            Ok(Laurent::zero(self.0.window))
        } else {
            self.0.on_forest(forest)
        }
    }
}

/// `φ ∘ Y`.
pub struct Graded<'a>(pub &'a Character);

impl Functional for Graded<'_> {
    fn basis(&self) -> &Arc<TreeBasis> {
        &self.0.basis
    }
    fn window(&self) -> Window {
        self.0.window
    }
    fn on_unit(&self) -> Laurent {
        Laurent::zero(self.0.window)
    }
    fn on_tree(&self, i: usize) -> Laurent {
        self.0.values[i].scale(&Scalar::from_int(self.0.basis.degree(i) as i64))
    }
    fn on_forest(&self, forest: &[usize]) -> Result<Laurent> {
        let n: usize = forest.iter().map(|&i| self.0.basis.degree(i)).sum();
        Ok(self.0.on_forest(forest)?.scale(&Scalar::from_int(n as i64)))
    }
}

/// `(a ⋆ b)(h) = ⟨a ⊗ b, Δh⟩` on the unit and every basis tree.
pub fn convolve<A: Functional + ?Sized, B: Functional + ?Sized>(a: &A, b: &B) -> Result<LinearMap> {
    same_basis(a.basis(), b.basis())?;
    let basis = a.basis().clone();
    let window = a.window();
    let unit = a.on_unit().mul(&b.on_unit())?;
    let mut values = Vec::with_capacity(basis.len());
    for i in 0..basis.len() {
        let mut acc = Laurent::zero(window);
        for cut in basis.cuts(i) {
            let right = b.on_forest(&cut.right)?;
            if right.is_zero() {
                continue;
            }
            let left = a.on_forest(&cut.left)?;
            if left.is_zero() {
                continue;
            }
            acc = acc.add(&left.mul(&right)?.scale(&cut.coeff));
        }
        values.push(acc);
    }
    Ok(LinearMap { basis, window, unit, values })
}

/// `⟨a ⊗ b, Δ(F)⟩` on an arbitrary forest of basis trees, using the full
/// coproduct of the forest. Used to test derivation and multiplicativity
/// properties on products.
pub fn pair_on_forest<A: Functional, B: Functional>(a: &A, b: &B, forest: &[usize]) -> Result<Laurent> {
    same_basis(a.basis(), b.basis())?;
    let basis = a.basis();
    let f = crate::trees::Forest::new(forest.iter().map(|&i| basis.tree(i).clone()).collect());
    let delta = crate::trees::coproduct_forest(&f, basis.orientation());
    let mut acc = Laurent::zero(a.window());
    for ((l, r), c) in delta.terms() {
        let li = basis.forest_indices(l)?;
        let ri = basis.forest_indices(r)?;
        acc = acc.add(&a.on_forest(&li)?.mul(&b.on_forest(&ri)?)?.scale(c));
    }
    Ok(acc)
}

/// `Ad(g)Z = g ⋆ Z ⋆ g⁻¹`.
pub fn adjoint(g: &Character, z: &InfChar) -> Result<InfChar> {
    let inner = convolve(z, &g.inverse()?)?;
    InfChar::from_linear(convolve(g, &inner)?)
}

/// `exp⋆(z) = Σ z^{⋆k}/k!`; the sum stops because `z^{⋆k}` vanishes below degree `k`.
pub fn star_exp(z: &InfChar) -> Result<Character> {
    let basis = z.basis.clone();
    let window = z.window;
    let mut total: Vec<Laurent> = vec![Laurent::zero(window); basis.len()];
    let mut power = LinearMap { basis: basis.clone(), window, unit: Laurent::zero(window), values: z.values.clone() };
    let max_deg = (0..basis.len()).map(|i| basis.degree(i)).max().unwrap_or(0);
    let mut factorial = Scalar::one();
    for k in 1..=max_deg {
        factorial = &factorial * &Scalar::from_int(k as i64);
        let inv = factorial.inv().expect("nonzero");
        for (t, p) in total.iter_mut().zip(&power.values) {
            *t = t.add(&p.scale(&inv));
        }
        power = convolve(z, &power)?;
        if power.values.iter().all(Laurent::is_zero) {
            break;
        }
    }
    Ok(Character { basis, window, values: total })
}

/// `log⋆(φ) = Σ (−1)^{k+1} (φ − ε)^{⋆k}/k`.
pub fn star_log(phi: &Character) -> Result<InfChar> {
    let basis = phi.basis.clone();
    let window = phi.window;
    let dev = Deviation(phi);
    let mut total: Vec<Laurent> = vec![Laurent::zero(window); basis.len()];
    let mut power = LinearMap { basis: basis.clone(), window, unit: Laurent::zero(window), values: phi.values.clone() };
    let max_deg = (0..basis.len()).map(|i| basis.degree(i)).max().unwrap_or(0);
    for k in 1..=max_deg {
        let mut c = Scalar::ratio(1, k as i64);
        if k % 2 == 0 {
            c = -c;
        }
        for (t, p) in total.iter_mut().zip(&power.values) {
            *t = t.add(&p.scale(&c));
        }
        power = convolve(&dev, &power)?;
        if power.values.iter().all(Laurent::is_zero) {
            break;
        }
    }
    Ok(InfChar { basis, window, values: total })
}

/// `R̃(φ) = φ⁻¹ ⋆ (φ ∘ Y)`.
pub fn tilde_r(phi: &Character) -> Result<InfChar> {
    InfChar::from_linear(convolve(&phi.inverse()?, &Graded(phi))?)
}

/// The unique character with `φ ∘ Y = φ ⋆ L`, solved degree by degree:
/// `n·φ(T) = L(T) + Σ′ φ(P)·L(R)`.
pub fn tilde_r_inv(l: &InfChar) -> Result<Character> {
    let basis = l.basis.clone();
    let window = l.window;
    let mut values: Vec<Laurent> = Vec::with_capacity(basis.len());
    for i in 0..basis.len() {
        let mut acc = Laurent::zero(window);
        for cut in basis.cuts(i) {
            if cut.left.as_slice() == [i] || cut.right.is_empty() {
                continue;
            }
            let right = l.on_forest(&cut.right)?;
            if right.is_zero() {
                continue;
            }
            let left = product(&values, &cut.left, window)?;
            acc = acc.add(&left.mul(&right)?.scale(&cut.coeff));
        }
        let n = Scalar::from_int(basis.degree(i) as i64);
        values.push(acc.scale(&n.inv().expect("positive degree")));
    }
    Ok(Character { basis, window, values })
}

fn values_to_json(basis: &TreeBasis, values: &[Laurent]) -> serde_json::Value {
    let map: BTreeMap<String, Vec<(i32, String)>> =
        basis.trees().iter().zip(values).map(|(t, v)| (t.code().to_string(), v.to_pairs())).collect();
    serde_json::to_value(map).expect("plain data serializes")
}

fn values_from_json(basis: &TreeBasis, window: Window, v: &serde_json::Value) -> Result<Vec<Laurent>> {
    let map: BTreeMap<String, Vec<(i32, String)>> =
        serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
    let mut values = vec![Laurent::zero(window); basis.len()];
    for (code, pairs) in map {
        let tree: crate::trees::RootedTree = code.parse()?;
        let i = basis.index_of(&tree).ok_or_else(|| Error::NotClosed(code.clone()))?;
        values[i] = Laurent::from_pairs(window, &pairs)?;
    }
    Ok(values)
}
