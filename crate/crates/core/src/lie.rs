//! Finite-dimensional Lie algebras given by structure constants: the truncated
//! algebras of infinitesimal characters, their semidirect doubles `𝔤 ⊕ 𝔤*`,
//! and the linear-algebra attached to them (ad, Lie–Poisson tensor, lower
//! central series).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{scalar_rank, ExactMatrix, Laurent, MultiPoly, Scalar, Var, Window};
use crate::characters::InfChar;
use crate::error::{Error, Result};
use crate::trees::{Orientation, TreeBasis};

#[derive(Clone, PartialEq)]
pub struct LieData {
    names: Vec<String>,
    degrees: Vec<usize>,
    /// `c[(a·n + b)·n + c]` is the coefficient of `X_c` in `[X_a, X_b]`.
    constants: Vec<Scalar>,
    /// For a double, the size `k` of the unstarred block.
    unstarred: Option<usize>,
}

impl LieData {
    pub fn new(
        names: Vec<String>,
        degrees: Vec<usize>,
        constants: Vec<Scalar>,
        unstarred: Option<usize>,
    ) -> Result<Self> {
        let n = names.len();
        if degrees.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: degrees.len() });
        }
        if constants.len() != n * n * n {
            return Err(Error::DimensionMismatch { expected: n * n * n, found: constants.len() });
        }
        Ok(LieData { names, degrees, constants, unstarred })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn unstarred_dim(&self) -> usize {
        self.unstarred.unwrap_or(self.dim())
    }

    pub fn is_double(&self) -> bool {
        self.unstarred.is_some()
    }

    pub fn constant(&self, a: usize, b: usize, c: usize) -> &Scalar {
        let n = self.dim();
        &self.constants[(a * n + b) * n + c]
    }

    /// `[X_a, X_b]` as a coefficient vector.
    pub fn bracket_basis(&self, a: usize, b: usize) -> Vec<Scalar> {
        (0..self.dim()).map(|c| self.constant(a, b, c).clone()).collect()
    }

    pub fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let n = self.dim();
        let mut out = vec![Scalar::zero(); n];
        for a in 0..n {
            if x[a].is_zero() {
                continue;
            }
            for b in 0..n {
                if y[b].is_zero() {
                    continue;
                }
                let xy = &x[a] * &y[b];
                for (c, o) in out.iter_mut().enumerate() {
                    let k = self.constant(a, b, c);
                    if !k.is_zero() {
                        *o += &(&xy * k);
                    }
                }
            }
        }
        out
    }

    pub fn bracket_poly(&self, x: &[MultiPoly], y: &[MultiPoly]) -> Vec<MultiPoly> {
        let n = self.dim();
        let mut out = vec![MultiPoly::zero(); n];
        for a in 0..n {
            for b in 0..n {
                if x[a].is_zero() || y[b].is_zero() {
                    continue;
                }
                let xy = &x[a] * &y[b];
                for (c, o) in out.iter_mut().enumerate() {
                    let k = self.constant(a, b, c);
                    if !k.is_zero() {
                        o.add_assign_ref(&xy.scale(k));
                    }
                }
            }
        }
        out
    }

    /// Nonzero brackets `[X_a, X_b]` with `a < b`.
    pub fn nonzero_brackets(&self) -> Vec<(usize, usize, Vec<(usize, Scalar)>)> {
        let n = self.dim();
        let mut out = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                let terms: Vec<(usize, Scalar)> = (0..n)
                    .filter(|&c| !self.constant(a, b, c).is_zero())
                    .map(|c| (c, self.constant(a, b, c).clone()))
                    .collect();
                if !terms.is_empty() {
                    out.push((a, b, terms));
                }
            }
        }
        out
    }

    /// First antisymmetry violation, if any.
    pub fn check_antisymmetry(&self) -> std::result::Result<(), String> {
        let n = self.dim();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if self.constant(a, b, c) != &-self.constant(b, a, c) {
                        return Err(format!("[{0},{1}] ≠ −[{1},{0}]", self.names[a], self.names[b]));
                    }
                }
            }
        }
        Ok(())
    }

    /// First basis triple violating Jacobi, if any.
    pub fn check_jacobi(&self) -> std::result::Result<(), String> {
        let n = self.dim();
        let e = |i: usize| {
            let mut v = vec![Scalar::zero(); n];
            v[i] = Scalar::one();
            v
        };
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let t1 = self.bracket(&e(a), &self.bracket_basis(b, c));
                    let t2 = self.bracket(&e(b), &self.bracket_basis(c, a));
                    let t3 = self.bracket(&e(c), &self.bracket_basis(a, b));
                    if t1.iter().zip(&t2).zip(&t3).any(|((x, y), z)| !(x + y + z).is_zero()) {
                        return Err(format!(
                            "Jacobi fails on ({}, {}, {})",
                            self.names[a], self.names[b], self.names[c]
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// The coordinate variable of basis index `i`: `x_i` or `x_i*`.
    pub fn coord_var(&self, i: usize) -> Var {
        match self.unstarred {
            Some(k) if i >= k => Var::Xs((i - k + 1) as u16),
            _ => Var::X((i + 1) as u16),
        }
    }

    pub fn coordinates(&self) -> Vec<MultiPoly> {
        (0..self.dim()).map(|i| MultiPoly::var(self.coord_var(i))).collect()
    }

    /// The restriction to the unstarred block (equal to `self` if not a double).
    pub fn unstarred_part(&self) -> LieData {
        let k = self.unstarred_dim();
        let mut constants = Vec::with_capacity(k * k * k);
        for a in 0..k {
            for b in 0..k {
                for c in 0..k {
                    constants.push(self.constant(a, b, c).clone());
                }
            }
        }
        LieData { names: self.names[..k].to_vec(), degrees: self.degrees[..k].to_vec(), constants, unstarred: None }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let brackets = self
            .nonzero_brackets()
            .into_iter()
            .flat_map(|(a, b, terms)| terms.into_iter().map(move |(c, k)| (a, b, c, k.to_string())))
            .map(|(a, b, c, k)| (self.names[a].clone(), self.names[b].clone(), self.names[c].clone(), k))
            .collect();
        serde_json::to_value(LieJson { basis: self.names.clone(), degrees: self.degrees.clone(), brackets })
            .expect("plain data serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: LieJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let n = j.basis.len();
        let pos = |name: &str| {
            j.basis
                .iter()
                .position(|b| b == name)
                .ok_or_else(|| Error::Parse(format!("unknown basis element `{name}`")))
        };
        let mut constants = vec![Scalar::zero(); n * n * n];
        for (a, b, c, k) in &j.brackets {
            let (a, b, c) = (pos(a)?, pos(b)?, pos(c)?);
            let k: Scalar = k.parse()?;
            constants[(a * n + b) * n + c] = k.clone();
            constants[(b * n + a) * n + c] = -k;
        }
        let starred = j.basis.iter().filter(|s| s.ends_with('*')).count();
        let unstarred = (starred > 0).then_some(n - starred);
        LieData::new(j.basis, j.degrees, constants, unstarred)
    }
}

#[derive(Serialize, Deserialize)]
struct LieJson {
    basis: Vec<String>,
    degrees: Vec<usize>,
    brackets: Vec<(String, String, String, String)>,
}

impl fmt::Display for LieData {
    /// One line per nonzero bracket, e.g. `[X1, X3*] = -2*X2*`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (a, b, terms) in self.nonzero_brackets() {
            let rhs: Vec<String> = terms
                .iter()
                .map(|(c, k)| {
                    if k.is_one() {
                        self.names[*c].clone()
                    } else if (-k).is_one() {
                        format!("-{}", self.names[*c])
                    } else {
                        format!("{}*{}", k, self.names[*c])
                    }
                })
                .collect();
            writeln!(f, "[{}, {}] = {}", self.names[a], self.names[b], rhs.join(" + "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for LieData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `𝔤⁽ᵏ⁾`: span of `Z_T` for basis trees of degree ≤ `k`, with brackets of
/// total degree above `k` set to zero. Brackets are computed by convolution.
pub fn truncated_lie_algebra(basis: Arc<TreeBasis>, k: usize) -> Result<LieData> {
    let window = Window::new(0, 0);
    let kept: Vec<usize> = (0..basis.len()).filter(|&i| basis.degree(i) <= k).collect();
    let n = kept.len();
    let z: Vec<InfChar> = kept.iter().map(|&i| InfChar::basis_element(basis.clone(), window, i)).collect();
    let mut constants = vec![Scalar::zero(); n * n * n];
    for a in 0..n {
        for b in 0..n {
            if a == b || basis.degree(kept[a]) + basis.degree(kept[b]) > k {
                continue;
            }
            let br = z[a].lie_bracket(&z[b])?;
            for (i, v) in br.values().iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let c = kept.iter().position(|&j| j == i).ok_or_else(|| Error::NotClosed(basis.tree(i).to_string()))?;
                let value: &Laurent = v;
                let coeff = value.coeff(0);
                if !coeff.is_constant() {
                    return Err(Error::Unsupported("non-scalar structure constant".into()));
                }
                constants[(a * n + b) * n + c] = coeff.constant_term();
            }
        }
    }
    let names = (1..=n).map(|i| format!("X{i}")).collect();
    let degrees = kept.iter().map(|&i| basis.degree(i)).collect();
    LieData::new(names, degrees, constants, None)
}

/// `δ = 𝔤 ⊕ 𝔤*` with `[X_a, X_b*] = −Σ_c C^b_{ac} X_c*` and `𝔤*` abelian.
pub fn double(g: &LieData) -> LieData {
    let k = g.dim();
    let n = 2 * k;
    let mut constants = vec![Scalar::zero(); n * n * n];
    let idx = |a: usize, b: usize, c: usize| (a * n + b) * n + c;
    for a in 0..k {
        for b in 0..k {
            for c in 0..k {
                constants[idx(a, b, c)] = g.constant(a, b, c).clone();
                // coefficient of X_c* in [X_a, X_b*]
                let v = -g.constant(a, c, b);
                constants[idx(a, b + k, c + k)] = v.clone();
                constants[idx(b + k, a, c + k)] = -v;
            }
        }
    }
    let mut names = g.names.clone();
    names.extend(g.names.iter().map(|s| format!("{s}*")));
    let mut degrees = g.degrees.clone();
    degrees.extend(g.degrees.iter().copied());
    LieData { names, degrees, constants, unstarred: Some(k) }
}

/// Row-reduced basis of the span of `vectors`.
fn span_basis(vectors: Vec<Vec<Scalar>>) -> Vec<Vec<Scalar>> {
    let mut basis: Vec<Vec<Scalar>> = Vec::new();
    for v in vectors.into_iter().filter(|v| v.iter().any(|x| !x.is_zero())) {
        let mut candidate = basis.clone();
        candidate.push(v.clone());
        if scalar_rank(candidate) > basis.len() {
            basis.push(v);
        }
    }
    basis
}

/// Smallest `m` with `𝔤^{(m+1)} = 0` in the lower central series
/// `𝔤^{(1)} = 𝔤`, `𝔤^{(i+1)} = [𝔤, 𝔤^{(i)}]`.
pub fn nilpotency_step(g: &LieData) -> Result<usize> {
    let n = g.dim();
    let unit = |i: usize| {
        let mut v = vec![Scalar::zero(); n];
        v[i] = Scalar::one();
        v
    };
    let mut current: Vec<Vec<Scalar>> = (0..n).map(unit).collect();
    let mut m = 1;
    loop {
        let next_vectors: Vec<Vec<Scalar>> =
            (0..n).flat_map(|a| current.iter().map(move |v| (a, v))).map(|(a, v)| g.bracket(&unit(a), v)).collect();
        let next = span_basis(next_vectors);
        if next.is_empty() {
            return Ok(m);
        }
        if next.len() == current.len() {
            return Err(Error::NotNilpotent(next.len()));
        }
        current = next;
        m += 1;
    }
}

/// Matrix of `ad_x`, entry `(c, b) = Σ_a x_a C^c_{ab}`.
pub fn ad_matrix(g: &LieData, x: &[MultiPoly]) -> Result<ExactMatrix> {
    let n = g.dim();
    if x.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: x.len() });
    }
    let mut m = ExactMatrix::zeros(n, n);
    for c in 0..n {
        for b in 0..n {
            let mut e = MultiPoly::zero();
            for (a, xa) in x.iter().enumerate() {
                let k = g.constant(a, b, c);
                if !k.is_zero() {
                    e.add_assign_ref(&xa.scale(k));
                }
            }
            m.set(c, b, e);
        }
    }
    Ok(m)
}

/// `P_ab = {x_a, x_b} = Σ_c C^c_{ab} · point[σ(c)]`, where `σ` swaps the
/// starred and unstarred halves of a double (the identification `δ ≅ δ*`
/// under which `{x₁, x₂} = 2x₃*`).
pub fn lie_poisson_matrix(g: &LieData, point: &[MultiPoly]) -> Result<ExactMatrix> {
    let n = g.dim();
    if point.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: point.len() });
    }
    let sigma = |c: usize| match g.unstarred {
        Some(k) if c < k => c + k,
        Some(k) => c - k,
        None => c,
    };
    let mut m = ExactMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let mut e = MultiPoly::zero();
            for c in 0..n {
                let k = g.constant(a, b, c);
                if !k.is_zero() {
                    e.add_assign_ref(&point[sigma(c)].scale(k));
                }
            }
            m.set(a, b, e);
        }
    }
    Ok(m)
}

/// The algebras studied here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlgebraName {
    G1,
    G2,
    G3,
    Delta1,
    Delta2,
    Delta3,
}

impl AlgebraName {
    pub const ALL: [AlgebraName; 6] = [
        AlgebraName::G1,
        AlgebraName::G2,
        AlgebraName::G3,
        AlgebraName::Delta1,
        AlgebraName::Delta2,
        AlgebraName::Delta3,
    ];

    /// Index `1..=3` of the underlying `𝔤ᵢ`.
    pub fn level(self) -> usize {
        match self {
            AlgebraName::G1 | AlgebraName::Delta1 => 1,
            AlgebraName::G2 | AlgebraName::Delta2 => 2,
            AlgebraName::G3 | AlgebraName::Delta3 => 3,
        }
    }

    pub fn is_double(self) -> bool {
        matches!(self, AlgebraName::Delta1 | AlgebraName::Delta2 | AlgebraName::Delta3)
    }

    /// The undoubled algebra at the same level.
    pub fn base(self) -> AlgebraName {
        match self.level() {
            1 => AlgebraName::G1,
            2 => AlgebraName::G2,
            _ => AlgebraName::G3,
        }
    }

    pub fn doubled(self) -> AlgebraName {
        match self.level() {
            1 => AlgebraName::Delta1,
            2 => AlgebraName::Delta2,
            _ => AlgebraName::Delta3,
        }
    }

    /// Corollas `c₁ … c_{level+2}` generate the Hopf subalgebra `ℋ_level`.
    pub fn tree_basis(self, orientation: Orientation) -> TreeBasis {
        TreeBasis::corollas_with(self.level() + 2, orientation)
    }

    pub fn lie_data(self) -> LieData {
        self.lie_data_with(Orientation::PrunedTrunk)
    }

    pub fn lie_data_with(self, orientation: Orientation) -> LieData {
        let basis = Arc::new(self.tree_basis(orientation));
        let g = truncated_lie_algebra(basis, self.level() + 2).expect("corolla algebras are closed");
        if self.is_double() {
            double(&g)
        } else {
            g
        }
    }
}

impl fmt::Display for AlgebraName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AlgebraName::G1 => "g1",
            AlgebraName::G2 => "g2",
            AlgebraName::G3 => "g3",
            AlgebraName::Delta1 => "delta1",
            AlgebraName::Delta2 => "delta2",
            AlgebraName::Delta3 => "delta3",
        };
        f.write_str(s)
    }
}

impl FromStr for AlgebraName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AlgebraName::ALL.into_iter().find(|a| a.to_string() == s).ok_or_else(|| {
            Error::Parse(format!("unknown algebra `{s}` (expected g1, g2, g3, delta1, delta2 or delta3)"))
        })
    }
}
