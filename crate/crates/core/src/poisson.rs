//! Polynomial functions on a (double) Lie algebra with the Lie–Poisson
//! bracket, involution and independence checks, and Hamiltonian fitting.

use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::algebra::{solve_linear, Assignment, ExactMatrix, MultiPoly, Scalar, SymbolicRank, Var};
use crate::error::{Error, Result};
use crate::lie::{lie_poisson_matrix, LieData};

#[derive(Clone, Debug, PartialEq)]
pub struct PoissonPoly {
    algebra: Arc<LieData>,
    poly: MultiPoly,
}

impl PoissonPoly {
    /// Fails with `Parse` if `poly` uses a variable that is not a coordinate.
    pub fn new(algebra: Arc<LieData>, poly: MultiPoly) -> Result<Self> {
        let coords: Vec<Var> = (0..algebra.dim()).map(|i| algebra.coord_var(i)).collect();
        if let Some(v) = poly.vars().into_iter().find(|v| !coords.contains(v)) {
            return Err(Error::Parse(format!("{v} is not a coordinate of this algebra")));
        }
        Ok(PoissonPoly { algebra, poly })
    }

    pub fn parse(algebra: Arc<LieData>, s: &str) -> Result<Self> {
        Self::new(algebra, s.parse()?)
    }

    pub fn poly(&self) -> &MultiPoly {
        &self.poly
    }

    pub fn algebra(&self) -> &Arc<LieData> {
        &self.algebra
    }

    pub fn add(&self, other: &PoissonPoly) -> Result<PoissonPoly> {
        same_algebra(self, other)?;
        Ok(PoissonPoly { algebra: self.algebra.clone(), poly: &self.poly + &other.poly })
    }

    /// Partial derivatives along every coordinate, in basis order.
    pub fn gradient(&self) -> Vec<MultiPoly> {
        (0..self.algebra.dim()).map(|i| self.poly.derivative(self.algebra.coord_var(i))).collect()
    }
}

fn same_algebra(f: &PoissonPoly, g: &PoissonPoly) -> Result<()> {
    if Arc::ptr_eq(&f.algebra, &g.algebra) || f.algebra == g.algebra {
        Ok(())
    } else {
        Err(Error::AlgebraMismatch)
    }
}

/// `{F, G} = Σ_{a,b} ∂_a F · ∂_b G · {x_a, x_b}`.
pub fn poisson_bracket(f: &PoissonPoly, g: &PoissonPoly) -> Result<PoissonPoly> {
    same_algebra(f, g)?;
    let alg = &f.algebra;
    let p = lie_poisson_matrix(alg, &alg.coordinates())?;
    let df = f.gradient();
    let dg = g.gradient();
    let mut out = MultiPoly::zero();
    for (a, fa) in df.iter().enumerate() {
        if fa.is_zero() {
            continue;
        }
        for (b, gb) in dg.iter().enumerate() {
            if gb.is_zero() || p.get(a, b).is_zero() {
                continue;
            }
            out.add_assign_ref(&(&(fa * gb) * p.get(a, b)));
        }
    }
    Ok(PoissonPoly { algebra: alg.clone(), poly: out })
}

/// Nonzero pairwise brackets, with the bracket polynomial as witness.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct InvolutionReport {
    pub pairs_checked: usize,
    pub failures: Vec<(usize, usize, String)>,
}

impl InvolutionReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn check_involution(funcs: &[PoissonPoly]) -> Result<InvolutionReport> {
    let mut report = InvolutionReport::default();
    for i in 0..funcs.len() {
        for j in i + 1..funcs.len() {
            report.pairs_checked += 1;
            let b = poisson_bracket(&funcs[i], &funcs[j])?;
            if !b.poly.is_zero() {
                report.failures.push((i, j, b.poly.to_string()));
            }
        }
    }
    Ok(report)
}

/// Rows are the gradients of the functions.
pub fn jacobian(funcs: &[PoissonPoly]) -> Result<ExactMatrix> {
    ExactMatrix::from_rows(funcs.iter().map(PoissonPoly::gradient).collect())
}

pub fn jacobian_rank(funcs: &[PoissonPoly], points: &[Assignment]) -> Result<usize> {
    jacobian(funcs)?.rank_at(points)
}

pub fn jacobian_symbolic_rank(funcs: &[PoissonPoly]) -> Result<SymbolicRank> {
    Ok(jacobian(funcs)?.symbolic_rank())
}

/// Random rational points with numerators in `[-9, 9]` and denominators in `[1, 5]`.
pub fn random_points<R: Rng>(algebra: &LieData, count: usize, rng: &mut R) -> Vec<Assignment> {
    (0..count)
        .map(|_| {
            (0..algebra.dim())
                .map(|i| (algebra.coord_var(i), Scalar::ratio(rng.gen_range(-9..=9), rng.gen_range(1..=5))))
                .collect()
        })
        .collect()
}

fn family(algebra: &Arc<LieData>, sources: &[&str]) -> Vec<PoissonPoly> {
    sources
        .iter()
        .map(|s| PoissonPoly::parse(algebra.clone(), s).expect("family polynomials are well formed"))
        .collect()
}

/// `H₁ … H₅` on `δ₁`.
pub fn delta1_family(algebra: &Arc<LieData>) -> Vec<PoissonPoly> {
    family(algebra, &["x1^2/2 + x2^2/2", "x3^2/2", "x1s^2/2", "x2s^2/2", "x3s^2/2 + x1^2/2 + x2^2/2"])
}

/// `H₁ … H₆` on `δ₂`.
pub fn delta2_family(algebra: &Arc<LieData>) -> Vec<PoissonPoly> {
    family(
        algebra,
        &[
            "x1^2/2 + x3^2/2",
            "x4^2/2",
            "x1s^2/2",
            "x2s^2/2",
            "x4s^2/2 + x1^2/2 + x3^2/2",
            "x2^2/2 + x3s^2/2 + x4s^2/2 + x1^2/2 + x3^2/2",
        ],
    )
}

/// `H₁ … H₇` on `δ₃`.
pub fn delta3_family(algebra: &Arc<LieData>) -> Vec<PoissonPoly> {
    family(
        algebra,
        &["x1^2/2 + x4^2/2", "x5^2/2", "x1s^2/2", "x2s^2/2", "x2^2/2 + x3s^2/2", "x3^2/2 + x4s^2/2", "x5s^2/2"],
    )
}

/// Shape of the quadratic Hamiltonian on the unstarred coordinates `x₁ … x_k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HamiltonianAnsatz {
    /// `Σ kᵢxᵢ + lᵢxᵢ²/2`: `2k` unknowns.
    Diagonal { dim: usize },
    /// Diagonal part plus `Σ_{j<p} ξ_{j,p} x_j x_p`: `2k + k(k−1)/2` unknowns.
    FullQuadratic { dim: usize },
}

impl HamiltonianAnsatz {
    pub fn dim(&self) -> usize {
        match *self {
            HamiltonianAnsatz::Diagonal { dim } | HamiltonianAnsatz::FullQuadratic { dim } => dim,
        }
    }

    /// Unknowns are `a1, a2, …`: first `k₁…k_k`, then `l₁…l_k`, then `ξ` in
    /// lexicographic `(j, p)` order.
    pub fn unknown_names(&self) -> Vec<String> {
        let k = self.dim();
        let mut names: Vec<String> = (1..=k).map(|i| format!("k{i}")).collect();
        names.extend((1..=k).map(|i| format!("l{i}")));
        if let HamiltonianAnsatz::FullQuadratic { .. } = self {
            for j in 1..=k {
                for p in j + 1..=k {
                    names.push(format!("xi{j}{p}"));
                }
            }
        }
        names
    }

    pub fn unknowns(&self) -> usize {
        self.unknown_names().len()
    }

    /// The ansatz as a polynomial in `x` and the parameters `a1 …`.
    pub fn polynomial(&self) -> MultiPoly {
        let k = self.dim();
        let x = |i: usize| MultiPoly::var(Var::X(i as u16));
        let a = |i: usize| MultiPoly::var(Var::Param(i as u16));
        let half = Scalar::ratio(1, 2);
        let mut h = MultiPoly::zero();
        for i in 1..=k {
            h.add_assign_ref(&(&a(i) * &x(i)));
            h.add_assign_ref(&(&a(k + i) * &x(i).pow(2)).scale(&half));
        }
        if let HamiltonianAnsatz::FullQuadratic { .. } = self {
            let mut next = 2 * k + 1;
            for j in 1..=k {
                for p in j + 1..=k {
                    h.add_assign_ref(&(&a(next) * &(&x(j) * &x(p))));
                    next += 1;
                }
            }
        }
        h
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    #[serde(serialize_with = "ser_display")]
    pub hamiltonian: MultiPoly,
    pub unknowns: usize,
    pub equations: usize,
    pub rank: usize,
    /// Values of the unknowns, in [`HamiltonianAnsatz::unknown_names`] order.
    #[serde(serialize_with = "ser_display_vec")]
    pub solution: Vec<Scalar>,
}

fn ser_display<S: serde::Serializer, T: std::fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn ser_display_vec<S: serde::Serializer, T: std::fmt::Display>(v: &[T], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

/// `∇H(β₀(t))` for a polynomial `h` in `x₁ … x_k`.
pub fn gradient_along(h: &MultiPoly, beta0: &[MultiPoly]) -> Vec<MultiPoly> {
    (1..=beta0.len())
        .map(|i| {
            let mut d = h.derivative(Var::X(i as u16));
            for (j, b) in beta0.iter().enumerate() {
                d = d.substitute(Var::X(j as u16 + 1), b);
            }
            d
        })
        .collect()
}

/// Solve `∇H(β̃₀(t)) = β̃_next(t)` for the ansatz parameters by matching the
/// coefficients of each power of `t` in each coordinate.
pub fn fit_hamiltonian(beta0: &[MultiPoly], beta_next: &[MultiPoly], ansatz: HamiltonianAnsatz) -> Result<FitResult> {
    let k = ansatz.dim();
    if beta0.len() != k || beta_next.len() != k {
        return Err(Error::DimensionMismatch { expected: k, found: beta0.len().min(beta_next.len()) });
    }
    let h = ansatz.polynomial();
    let n = ansatz.unknowns();
    let grad = gradient_along(&h, beta0);
    let degree = grad.iter().chain(beta_next).map(|p| p.degree_in(Var::T)).max().unwrap_or(0);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for (g, target) in grad.iter().zip(beta_next) {
        let residual = g - target;
        for d in 0..=degree {
            let eq = residual.coeff_in(Var::T, d);
            rows.push((1..=n).map(|p| eq.coeff_in(Var::Param(p as u16), 1).constant_term()).collect());
            let mut constant = eq;
            for p in 1..=n {
                constant = constant.coeff_in(Var::Param(p as u16), 0);
            }
            rhs.push(-constant.constant_term());
        }
    }
    let equations = rows.len();
    let sol = solve_linear(&rows, &rhs)?;
    let mut hamiltonian = h;
    for (p, v) in sol.values.iter().enumerate() {
        hamiltonian = hamiltonian.substitute(Var::Param(p as u16 + 1), &MultiPoly::constant(v.clone()));
    }
    Ok(FitResult { hamiltonian, unknowns: n, equations, rank: sol.rank, solution: sol.values })
}

/// `∇H(β̃₀(t)) − β̃_next(t)`; all zero when the fit is exact.
pub fn fit_residual(h: &MultiPoly, beta0: &[MultiPoly], beta_next: &[MultiPoly]) -> Vec<MultiPoly> {
    gradient_along(h, beta0).iter().zip(beta_next).map(|(g, b)| g - b).collect()
}

/// A flow is degenerate for fitting when some coordinate of `β̃₀(t)` has
/// lower t-degree than the matching coordinate of `β̃_next(t)`: no gradient
/// that is affine in that coordinate can follow it.
pub fn is_degenerate_flow(beta0: &[MultiPoly], beta_next: &[MultiPoly]) -> bool {
    beta0.iter().zip(beta_next).any(|(b, n)| b.degree_in(Var::T) < n.degree_in(Var::T))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::AlgebraName;

    fn delta1() -> Arc<LieData> {
        Arc::new(AlgebraName::Delta1.lie_data())
    }

    #[test]
    fn coordinate_brackets() {
        let d = delta1();
        let f = |s: &str| PoissonPoly::parse(d.clone(), s).unwrap();
        assert_eq!(poisson_bracket(&f("x1"), &f("x2")).unwrap().poly(), &"2*x3s".parse().unwrap());
        assert_eq!(poisson_bracket(&f("x1"), &f("x3s")).unwrap().poly(), &"-2*x2".parse().unwrap());
        assert_eq!(poisson_bracket(&f("x2"), &f("x3s")).unwrap().poly(), &"2*x1".parse().unwrap());
        let g = f("x1^2*x2s + x3s");
        assert!(poisson_bracket(&g, &g).unwrap().poly().is_zero());
        assert!(PoissonPoly::parse(d, "x4").is_err());
    }

    #[test]
    fn generic_diagonal_hamiltonian_commutes_with_delta1_family() {
        let d = delta1();
        let h = PoissonPoly::new(d.clone(), HamiltonianAnsatz::Diagonal { dim: 3 }.polynomial());
        // parameters are not coordinates, so substitute generic values first
        assert!(h.is_err());
        let h = PoissonPoly::parse(d.clone(), "2*x1 - 3*x2 + x3 + 5*x1^2/2 - x2^2/2 + 7*x3^2/2").unwrap();
        let mut funcs = vec![h];
        funcs.extend(delta1_family(&d).into_iter().skip(1));
        assert!(check_involution(&funcs).unwrap().holds());
        assert_eq!(jacobian_symbolic_rank(&funcs).unwrap().rank, 5);
    }

    #[test]
    fn gradient_examples() {
        let d = delta1();
        let h = PoissonPoly::parse(d.clone(), "x1^2/2").unwrap();
        assert_eq!(h.gradient()[0], MultiPoly::var(Var::X(1)));
        assert!(PoissonPoly::parse(d, "7").unwrap().gradient().iter().all(MultiPoly::is_zero));
    }

    #[test]
    fn fit_constant_flow() {
        let c = |n: i64| MultiPoly::from_int(n);
        let ansatz = HamiltonianAnsatz::Diagonal { dim: 3 };
        let fit = fit_hamiltonian(&[c(1), c(2), c(3)], &[c(4), c(5), c(6)], ansatz).unwrap();
        assert_eq!(fit.hamiltonian, "4*x1 + 5*x2 + 6*x3".parse().unwrap());
        assert_eq!(fit.unknowns, 6);
        assert_eq!(fit.equations, 3);
        let zero = fit_hamiltonian(&[c(1), c(2), c(3)], &[c(0), c(0), c(0)], ansatz).unwrap();
        assert!(zero.hamiltonian.is_zero());
    }

    #[test]
    fn degenerate_flow_is_inconsistent() {
        // β̃₀ constant but β̃_next moving: no diagonal quadratic fits
        let p = |s: &str| s.parse::<MultiPoly>().unwrap();
        let r = fit_hamiltonian(
            &[p("1"), p("2"), p("3")],
            &[p("t"), p("0"), p("0")],
            HamiltonianAnsatz::Diagonal { dim: 3 },
        );
        assert!(matches!(r, Err(Error::Inconsistent(_))));
    }

    #[test]
    fn unknown_counts() {
        assert_eq!(HamiltonianAnsatz::Diagonal { dim: 3 }.unknowns(), 6);
        assert_eq!(HamiltonianAnsatz::FullQuadratic { dim: 4 }.unknowns(), 14);
        assert_eq!(HamiltonianAnsatz::FullQuadratic { dim: 5 }.unknowns(), 20);
    }
}
