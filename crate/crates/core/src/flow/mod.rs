//! Lax flows `dL/dt = [L, R(λᵖL)]` solved in closed form by Birkhoff
//! factorization of `exp⋆(−tX)`, `X = 2λᵖL₀`, with the flow time `t` kept as
//! a polynomial variable.

pub mod rk4;

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use crate::algebra::{Laurent, MultiPoly, Scalar, Var, Window};
use crate::characters::{adjoint, beta_tilde, birkhoff, star_exp, tilde_r_inv, Character, Functional, InfChar};
use crate::error::{Error, Result};
use crate::lie::{nilpotency_step, AlgebraName, LieData};
use crate::poisson::PoissonPoly;
use crate::trees::TreeBasis;

/// Window used for flows unless configured otherwise.
pub const FLOW_WINDOW: Window = Window { lo: -12, hi: 12 };

#[derive(Clone, Debug, PartialEq)]
pub struct FlowParams {
    /// Exponent in `f(L) = 2λᵖL`.
    pub p: i32,
    pub algebra: AlgebraName,
    pub l0: InfChar,
    pub window: Window,
}

impl FlowParams {
    pub fn new(algebra: AlgebraName, p: i32, l0: InfChar) -> Self {
        let window = l0.window();
        FlowParams { p, algebra, l0, window }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowTrajectory {
    pub l_of_t: InfChar,
    pub g_minus: Character,
    pub g_plus: Character,
    pub phi_t: Character,
    /// `β̃_k(t)` for `k ≥ 0`: coordinates of the `λᵏ` coefficient of `β̃_{φ_t}`.
    pub beta: BTreeMap<i32, Vec<MultiPoly>>,
}

impl FlowTrajectory {
    pub fn beta_k(&self, k: i32) -> Vec<MultiPoly> {
        self.beta.get(&k).cloned().unwrap_or_else(|| vec![MultiPoly::zero(); self.l_of_t.values().len()])
    }

    pub fn beta0(&self) -> Vec<MultiPoly> {
        self.beta_k(0)
    }

    /// Largest t-degree among the coordinates of `β̃₀(t)`.
    pub fn beta0_degree(&self) -> u32 {
        self.beta0().iter().map(|c| c.degree_in(Var::T)).max().unwrap_or(0)
    }

    /// `L(t)` at a rational time.
    pub fn l_at(&self, t: &Scalar) -> InfChar {
        let point = [(Var::T, t.clone())].into_iter().collect();
        self.l_of_t.map_values(|v| v.partial_eval(&point))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let beta: BTreeMap<String, Vec<String>> =
            self.beta.iter().map(|(k, v)| (k.to_string(), v.iter().map(ToString::to_string).collect())).collect();
        serde_json::json!({
            "L": self.l_of_t.to_json(),
            "g_minus": self.g_minus.to_json(),
            "g_plus": self.g_plus.to_json(),
            "phi_t": self.phi_t.to_json(),
            "beta": beta,
        })
    }
}

/// Every flow acts on the tree basis of `𝔤₁`, `𝔤₂` or `𝔤₃`.
pub fn check_flow_algebra(algebra: AlgebraName) -> Result<()> {
    if algebra.is_double() {
        return Err(Error::Unsupported(format!("flows live on g1, g2 or g3, not {algebra}")));
    }
    Ok(())
}

/// `exp⋆(−tX)` with `X = 2λᵖL₀`.
pub fn flow_exponential(params: &FlowParams) -> Result<Character> {
    let x = params.l0.with_window(params.window)?.shift(params.p)?.scale(&Scalar::from_int(2));
    let minus_t = MultiPoly::var(Var::T).scale(&Scalar::from_int(-1));
    star_exp(&x.scale_poly(&minus_t))
}

pub fn solve_lax(params: &FlowParams) -> Result<FlowTrajectory> {
    check_flow_algebra(params.algebra)?;
    let l0 = params.l0.with_window(params.window)?;
    let pair = birkhoff(&flow_exponential(params)?)?;
    let l_minus = adjoint(&pair.neg, &l0)?;
    let l_plus = adjoint(&pair.pos, &l0)?;
    if l_minus != l_plus {
        let i = (0..l0.values().len()).find(|&i| l_minus.value(i) != l_plus.value(i)).unwrap_or(0);
        return Err(Error::ConjugationMismatch(l0.basis().tree(i).to_string()));
    }
    let phi_t = tilde_r_inv(&l_minus)?;
    let beta = beta_hierarchy_of(&l_minus)?;
    Ok(FlowTrajectory { l_of_t: l_minus, g_minus: pair.neg, g_plus: pair.pos, phi_t, beta })
}

/// `β̃_{φ} = λ·R̃(φ)`, so with `φ_t = R̃⁻¹(L(t))` the coefficient `β̃_k` is
/// the `λ^{k−1}` coefficient of `L(t)`.
fn beta_hierarchy_of(l: &InfChar) -> Result<BTreeMap<i32, Vec<MultiPoly>>> {
    let beta = l.shift(1)?;
    let mut out = BTreeMap::new();
    let lo = beta.values().iter().filter_map(Laurent::lowest_exponent).min();
    let hi = beta.values().iter().filter_map(Laurent::highest_exponent).max();
    if let (Some(lo), Some(hi)) = (lo, hi) {
        if lo < 0 {
            return Err(Error::NotHolomorphicBeta(lo));
        }
        for k in 0..=hi {
            out.insert(k, beta.lambda_coeff(k));
        }
    }
    Ok(out)
}

/// Taylor coefficients of `β̃_{φ_t}`, computed from `φ_t` through the
/// scaling derivative rather than read off `L(t)`.
pub fn beta_hierarchy(traj: &FlowTrajectory) -> Result<BTreeMap<i32, Vec<MultiPoly>>> {
    let bt = beta_tilde(&traj.phi_t)?;
    let mut out = BTreeMap::new();
    for v in bt.values() {
        if let Some(lo) = v.lowest_exponent() {
            if lo < 0 {
                return Err(Error::NotHolomorphicBeta(lo));
            }
        }
    }
    let hi = bt.values().iter().filter_map(Laurent::highest_exponent).max();
    if let Some(hi) = hi {
        for k in 0..=hi {
            out.insert(k, bt.lambda_coeff(k));
        }
    }
    Ok(out)
}

/// A list of named identities, each with its nonzero residuals.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub residuals: Vec<String>,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.residuals.is_empty())
    }

    fn push_polys(&mut self, name: impl Into<String>, residuals: &[MultiPoly]) {
        let residuals = residuals
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_zero())
            .map(|(i, r)| format!("x{}: {}", i + 1, r))
            .collect();
        self.checks.push(IdentityCheck { name: name.into(), residuals });
    }

    fn push_inf(&mut self, name: impl Into<String>, residual: &InfChar) {
        let residuals = residual
            .values()
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.is_zero())
            .map(|(i, r)| format!("{}: {}", residual.basis().tree(i), r))
            .collect();
        self.checks.push(IdentityCheck { name: name.into(), residuals });
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks.iter().flat_map(|c| c.residuals.iter().map(move |r| format!("{}: {}", c.name, r))).collect()
    }
}

/// `M = R(λᵖL)`, where `R = π₊ − π₋`.
pub fn m_of(l: &InfChar, p: i32) -> Result<InfChar> {
    Ok(l.shift(p)?.map_values(Laurent::r_matrix))
}

/// Checks `dL/dt = [L, M]` exactly, that `½R(f(L))` with `f(L) = 2λᵖL`
/// equals `R(λᵖL)`, and `L(0) = L₀`.
pub fn verify_lax_identity(traj: &FlowTrajectory, params: &FlowParams) -> Result<IdentityReport> {
    let l = &traj.l_of_t;
    let mut report = IdentityReport::default();
    let m = m_of(l, params.p)?;
    let half_rf =
        l.shift(params.p)?.scale(&Scalar::from_int(2)).map_values(Laurent::r_matrix).scale(&Scalar::ratio(1, 2));
    report.push_inf("half_r_of_f", &half_rf.sub(&m)?);
    let lhs = l.derivative(Var::T);
    let rhs = l.lie_bracket(&m)?;
    report.push_inf("lax_equation", &lhs.sub(&rhs)?);
    let at_zero = traj.l_at(&Scalar::zero());
    report.push_inf("initial_condition", &at_zero.sub(&params.l0.with_window(params.window)?)?);
    Ok(report)
}

fn d_dt(v: &[MultiPoly]) -> Vec<MultiPoly> {
    v.iter().map(|c| c.derivative(Var::T)).collect()
}

fn sub(a: &[MultiPoly], b: &[MultiPoly]) -> Vec<MultiPoly> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn add(a: &[MultiPoly], b: &[MultiPoly]) -> Vec<MultiPoly> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn scale(a: &[MultiPoly], c: i64) -> Vec<MultiPoly> {
    a.iter().map(|x| x.scale(&Scalar::from_int(c))).collect()
}

/// Checks, along a flow with `p ≤ 0` and `n = 1 − p`:
/// `dβ̃₀/dt = 2[β̃₀, β̃ₙ]`, the full hierarchy
/// `dβ̃/dt = −2[Σ_{k≥n} β̃ₖλ^{k−n}, Σ_{j<n} β̃ⱼλʲ]` coefficient by coefficient,
/// the second-derivative form of the first identity, and
/// `dβ̃ₙ/dt = −2 Σ_{j=0}^{n−1} [β̃_{2n−j}, β̃ⱼ]`.
pub fn verify_beta0_equation(traj: &FlowTrajectory, params: &FlowParams, g: &LieData) -> Result<IdentityReport> {
    if params.p > 0 {
        return Err(Error::Unsupported("the beta0 equation concerns p <= 0".into()));
    }
    let n = 1 - params.p;
    let br = |a: &[MultiPoly], b: &[MultiPoly]| g.bracket_poly(a, b);
    let beta = |k: i32| traj.beta_k(k);
    let mut report = IdentityReport::default();

    let b0 = beta(0);
    let bn = beta(n);
    let rhs = scale(&br(&b0, &bn), 2);
    report.push_polys("beta0_equation", &sub(&d_dt(&b0), &rhs));

    let top = traj.beta.keys().copied().max().unwrap_or(0);
    let zero = vec![MultiPoly::zero(); g.dim()];
    for m in 0..=top {
        // λᵐ: pairs (k, j) with k ≥ n, 0 ≤ j < n, (k − n) + j = m
        let mut rhs = zero.clone();
        for j in 0..n {
            let k = m + n - j;
            if k >= n {
                rhs = add(&rhs, &br(&beta(k), &beta(j)));
            }
        }
        report.push_polys(format!("hierarchy[{m}]"), &sub(&d_dt(&beta(m)), &scale(&rhs, -2)));
    }

    let second = add(&scale(&br(&br(&b0, &bn), &bn), 4), &scale(&br(&b0, &d_dt(&bn)), 2));
    report.push_polys("beta0_second_derivative", &sub(&d_dt(&d_dt(&b0)), &second));

    let mut dn = zero;
    for j in 0..n {
        dn = add(&dn, &br(&beta(2 * n - j), &beta(j)));
    }
    report.push_polys("beta_n_equation", &sub(&d_dt(&bn), &scale(&dn, -2)));
    Ok(report)
}

/// For each function, `H(β̃₀(t))` with starred coordinates set to zero,
/// minus its value at `t = 0`. All zero means every function is conserved.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ConservationReport {
    pub drifts: Vec<String>,
}

impl ConservationReport {
    pub fn conserved(&self) -> bool {
        self.drifts.iter().all(|d| d == "0")
    }
}

pub fn evaluate_along(h: &MultiPoly, beta0: &[MultiPoly]) -> MultiPoly {
    let mut out = h.clone();
    for v in h.vars() {
        let value = match v {
            Var::X(i) => beta0.get(i as usize - 1).cloned().unwrap_or_else(MultiPoly::zero),
            Var::Xs(_) => MultiPoly::zero(),
            _ => continue,
        };
        out = out.substitute(v, &value);
    }
    out
}

pub fn conservation_report(traj: &FlowTrajectory, hamiltonians: &[PoissonPoly]) -> ConservationReport {
    let b0 = traj.beta0();
    let drifts = hamiltonians
        .iter()
        .map(|h| {
            let along = evaluate_along(h.poly(), &b0);
            let drift = &along - &MultiPoly::constant(along.coeff_in(Var::T, 0).constant_term());
            drift.to_string()
        })
        .collect();
    ConservationReport { drifts }
}

/// `β̃₀(t) ↦ Ad((φ_t)₊(0)) β̃₀(t)`.
pub fn gauge_transform(traj: &FlowTrajectory) -> Result<Vec<MultiPoly>> {
    let basis = traj.phi_t.basis().clone();
    let window = traj.phi_t.window();
    let b0 = traj.beta0();
    let z = InfChar::new(basis, window, b0.into_iter().map(|c| Laurent::constant(window, c)).collect())?;
    let pos0 = birkhoff(&traj.phi_t)?.pos.at_lambda_zero();
    Ok(adjoint(&pos0, &z)?.lambda_coeff(0))
}

/// Largest t-degree over every coefficient of `L(t)`, against the bound
/// `step − 1` forced by nilpotency.
pub fn t_degree(traj: &FlowTrajectory) -> u32 {
    traj.l_of_t.values().iter().map(|v| v.degree_in(Var::T)).max().unwrap_or(0)
}

pub fn t_degree_bound(g: &LieData) -> Result<u32> {
    Ok(nilpotency_step(g)? as u32 - 1)
}

/// Random `L₀` with rational coefficients at `λ⁻¹ … λ²` on every tree.
pub fn random_l0<R: Rng>(basis: Arc<TreeBasis>, window: Window, rng: &mut R) -> Result<InfChar> {
    random_l0_in(basis, window, -1, 2, rng)
}

/// Random holomorphic `L₀` (coefficients at `λ⁰ … λ²`).
pub fn random_holomorphic_l0<R: Rng>(basis: Arc<TreeBasis>, window: Window, rng: &mut R) -> Result<InfChar> {
    random_l0_in(basis, window, 0, 2, rng)
}

fn random_l0_in<R: Rng>(basis: Arc<TreeBasis>, window: Window, lo: i32, hi: i32, rng: &mut R) -> Result<InfChar> {
    let values = (0..basis.len())
        .map(|_| {
            Laurent::from_terms(
                window,
                (lo..=hi).map(|k| (k, MultiPoly::constant(Scalar::ratio(rng.gen_range(-3..=3), rng.gen_range(1..=3))))),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    InfChar::new(basis, window, values)
}
