//! Floating-point cross-check: integrate `dL/dt = [L, R(λᵖL)]` numerically
//! with adaptive step-doubling RK4 and compare with the exact trajectory.
//!
//! This path shares no code with the exact solver beyond reading the
//! structure constants and the initial value.

use serde::Serialize;

use super::{FlowParams, FlowTrajectory};
use crate::algebra::{Scalar, Window};
use crate::characters::InfChar;
use crate::error::{Error, Result};
use crate::lie::LieData;

/// Dense real state: `state[tree][exponent − lo]`.
type State = Vec<Vec<f64>>;

struct System {
    n: usize,
    width: usize,
    lo: i32,
    p: i32,
    /// `(a, b, c, C^c_{ab})` for nonzero constants.
    constants: Vec<(usize, usize, usize, f64)>,
}

impl System {
    fn new(g: &LieData, p: i32, window: Window) -> Self {
        let n = g.dim();
        let mut constants = Vec::new();
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let v = g.constant(a, b, c);
                    if !v.is_zero() {
                        constants.push((a, b, c, v.re_f64()));
                    }
                }
            }
        }
        System { n, width: (window.hi - window.lo + 1) as usize, lo: window.lo, p, constants }
    }

    /// `R(λᵖL)` with `R = π₊ − π₋`.
    fn m(&self, l: &State) -> State {
        let mut out = vec![vec![0.0; self.width]; self.n];
        for (row, src) in out.iter_mut().zip(l) {
            for (j, v) in src.iter().enumerate() {
                let e = j as i32 + self.lo + self.p;
                let k = e - self.lo;
                if k < 0 || k >= self.width as i32 {
                    continue;
                }
                row[k as usize] = if e < 0 { -v } else { *v };
            }
        }
        out
    }

    fn rhs(&self, l: &State) -> State {
        let m = self.m(l);
        let mut out = vec![vec![0.0; self.width]; self.n];
        for &(a, b, c, coeff) in &self.constants {
            for (i, x) in l[a].iter().enumerate() {
                if *x == 0.0 {
                    continue;
                }
                for (j, y) in m[b].iter().enumerate() {
                    // exponent (i + lo) + (j + lo) → index i + j + lo
                    let k = i as i32 + j as i32 + self.lo;
                    if k < 0 || k >= self.width as i32 {
                        continue;
                    }
                    out[c][k as usize] += coeff * x * y;
                }
            }
        }
        out
    }

    fn rk4_step(&self, y: &State, h: f64) -> State {
        let k1 = self.rhs(y);
        let k2 = self.rhs(&axpy(y, h / 2.0, &k1));
        let k3 = self.rhs(&axpy(y, h / 2.0, &k2));
        let k4 = self.rhs(&axpy(y, h, &k3));
        let mut out = y.clone();
        for (((o, a), (b, c)), d) in out.iter_mut().zip(&k1).zip(k2.iter().zip(&k3)).zip(&k4) {
            for i in 0..o.len() {
                o[i] += h / 6.0 * (a[i] + 2.0 * b[i] + 2.0 * c[i] + d[i]);
            }
        }
        out
    }

    /// Advance from `t0` to `t1` with step doubling and Richardson correction.
    fn advance(&self, mut y: State, t0: f64, t1: f64, tol: f64) -> State {
        let mut t = t0;
        let mut h = (t1 - t0) / 8.0;
        while t1 - t > 1e-15 {
            h = h.min(t1 - t);
            let full = self.rk4_step(&y, h);
            let half = self.rk4_step(&self.rk4_step(&y, h / 2.0), h / 2.0);
            let err = max_abs_diff(&full, &half) / 15.0;
            let scale = max_abs(&half).max(1.0);
            if err <= tol * scale || h < 1e-9 {
                y = half
                    .iter()
                    .zip(&full)
                    .map(|(a, b)| a.iter().zip(b).map(|(x, z)| x + (x - z) / 15.0).collect())
                    .collect();
                t += h;
            }
            let ratio = if err == 0.0 { 2.0 } else { 0.9 * (tol * scale / err).powf(0.2) };
            h *= ratio.clamp(0.2, 2.0);
        }
        y
    }
}

fn axpy(y: &State, a: f64, x: &State) -> State {
    y.iter().zip(x).map(|(r, s)| r.iter().zip(s).map(|(u, v)| u + a * v).collect()).collect()
}

fn max_abs(y: &State) -> f64 {
    y.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
}

fn max_abs_diff(a: &State, b: &State) -> f64 {
    a.iter().flatten().zip(b.iter().flatten()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn dense(l: &InfChar, window: Window) -> Result<State> {
    let width = (window.hi - window.lo + 1) as usize;
    l.values()
        .iter()
        .map(|v| {
            let mut row = vec![0.0; width];
            for (e, c) in v.terms() {
                if !c.is_constant() || !c.constant_term().is_real() {
                    return Err(Error::Unsupported("RK4 oracle needs real constant coefficients".into()));
                }
                row[(e - window.lo) as usize] = c.constant_term().re_f64();
            }
            Ok(row)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rk4Sample {
    pub t: String,
    pub rel_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rk4Report {
    pub samples: Vec<Rk4Sample>,
    pub max_rel_err: f64,
}

impl Rk4Report {
    pub fn within(&self, tol: f64) -> bool {
        self.max_rel_err <= tol
    }
}

/// Sample times `1/10, 2/10, …, 10/10`.
pub fn sample_times() -> Vec<Scalar> {
    (1..=10).map(|k| Scalar::ratio(k, 10)).collect()
}

/// Integrate numerically and return the dense states at the given times.
pub fn integrate(g: &LieData, params: &FlowParams, times: &[f64], tol: f64) -> Result<Vec<Vec<Vec<f64>>>> {
    let sys = System::new(g, params.p, params.window);
    let mut y = dense(&params.l0.with_window(params.window)?, params.window)?;
    let mut t = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        y = sys.advance(y, t, target, tol);
        t = target;
        out.push(y.clone());
    }
    Ok(out)
}

/// Relative error `‖exact − numeric‖∞ / ‖exact‖∞` at each sample time.
pub fn compare_with_rk4(traj: &FlowTrajectory, params: &FlowParams, g: &LieData, tol: f64) -> Result<Rk4Report> {
    let times = sample_times();
    let floats: Vec<f64> = times.iter().map(Scalar::re_f64).collect();
    let numeric = integrate(g, params, &floats, tol)?;
    let mut samples = Vec::new();
    let mut max_rel_err: f64 = 0.0;
    for (t, y) in times.iter().zip(numeric) {
        let exact = dense(&traj.l_at(t), params.window)?;
        let norm = max_abs(&exact).max(f64::MIN_POSITIVE);
        let rel_err = max_abs_diff(&exact, &y) / norm;
        max_rel_err = max_rel_err.max(rel_err);
        samples.push(Rk4Sample { t: t.to_string(), rel_err });
    }
    Ok(Rk4Report { samples, max_rel_err })
}
