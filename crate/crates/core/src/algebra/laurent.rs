//! Truncated Laurent series in λ with polynomial coefficients.
//!
//! A series lives in a [`Window`] `[lo, hi]`. Products silently drop every
//! exponent above `hi` (that is the series tail) but refuse to produce an
//! exponent below `lo`, since the pole order of an element of `ℂ[λ⁻¹, λ]]` is
//! finite and must never be lost.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::poly::{Assignment, MultiPoly, Var};
use super::scalar::Scalar;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub lo: i32,
    pub hi: i32,
}

impl Window {
    pub const DEFAULT: Window = Window { lo: -8, hi: 8 };

    pub fn new(lo: i32, hi: i32) -> Self {
        assert!(lo <= 0 && hi >= 0, "window must contain λ^0");
        Window { lo, hi }
    }

    pub fn enlarged(&self, by: i32) -> Self {
        Window { lo: self.lo - by, hi: self.hi + by }
    }
}

impl Default for Window {
    fn default() -> Self {
        Window::DEFAULT
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Laurent {
    window: Window,
    coeffs: BTreeMap<i32, MultiPoly>,
}

impl Laurent {
    pub fn zero(window: Window) -> Self {
        Laurent { window, coeffs: BTreeMap::new() }
    }

    pub fn one(window: Window) -> Self {
        Self::constant(window, MultiPoly::one())
    }

    pub fn constant(window: Window, c: MultiPoly) -> Self {
        let mut out = Self::zero(window);
        out.set(0, c);
        out
    }

    pub fn from_scalar(window: Window, c: Scalar) -> Self {
        Self::constant(window, MultiPoly::constant(c))
    }

    /// `c·λ^k`; exponents above the window vanish, below it is an error.
    pub fn monomial(window: Window, k: i32, c: MultiPoly) -> Result<Self> {
        if k < window.lo {
            return Err(Error::PoleOverflow { exponent: k, lo: window.lo });
        }
        let mut out = Self::zero(window);
        if k <= window.hi {
            out.set(k, c);
        }
        Ok(out)
    }

    /// Build from `(exponent, coefficient)` pairs.
    pub fn from_terms<I>(window: Window, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i32, MultiPoly)>,
    {
        let mut out = Self::zero(window);
        for (k, c) in terms {
            out = out.add(&Self::monomial(window, k, c)?);
        }
        Ok(out)
    }

    fn set(&mut self, k: i32, c: MultiPoly) {
        if c.is_zero() {
            self.coeffs.remove(&k);
        } else {
            self.coeffs.insert(k, c);
        }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, k: i32) -> MultiPoly {
        self.coeffs.get(&k).cloned().unwrap_or_else(MultiPoly::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &MultiPoly)> {
        self.coeffs.iter().map(|(k, c)| (*k, c))
    }

    pub fn lowest_exponent(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn highest_exponent(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    /// Re-home the series in another window.
    pub fn with_window(&self, window: Window) -> Result<Self> {
        if let Some(k) = self.lowest_exponent() {
            if k < window.lo {
                return Err(Error::PoleOverflow { exponent: k, lo: window.lo });
            }
        }
        Ok(Laurent { window, coeffs: self.coeffs.range(..=window.hi).map(|(k, c)| (*k, c.clone())).collect() })
    }

    fn check_window(&self, other: &Laurent) -> Result<()> {
        if self.window != other.window {
            return Err(Error::WindowMismatch(self.window.lo, self.window.hi, other.window.lo, other.window.hi));
        }
        Ok(())
    }

    /// Sum; panics if the windows differ (a programming error, never data-driven).
    pub fn add(&self, other: &Laurent) -> Laurent {
        assert_eq!(self.window, other.window, "adding series from different windows");
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            let sum = &out.coeff(*k) + c;
            out.set(*k, sum);
        }
        out
    }

    pub fn sub(&self, other: &Laurent) -> Laurent {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Laurent {
        Laurent { window: self.window, coeffs: self.coeffs.iter().map(|(k, c)| (*k, -c)).collect() }
    }

    /// Cauchy product truncated at `hi`.
    pub fn mul(&self, other: &Laurent) -> Result<Laurent> {
        self.check_window(other)?;
        let mut out = Laurent::zero(self.window);
        if self.is_zero() || other.is_zero() {
            return Ok(out);
        }
        let lowest = self.lowest_exponent().unwrap() + other.lowest_exponent().unwrap();
        if lowest < self.window.lo {
            return Err(Error::PoleOverflow { exponent: lowest, lo: self.window.lo });
        }
        let mut acc: BTreeMap<i32, MultiPoly> = BTreeMap::new();
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                let k = i + j;
                if k > self.window.hi {
                    break;
                }
                acc.entry(k).or_default().add_assign_ref(&(a * b));
            }
        }
        for (k, c) in acc {
            out.set(k, c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> Laurent {
        self.map_coeffs(|p| p.scale(c))
    }

    pub fn scale_poly(&self, c: &MultiPoly) -> Laurent {
        self.map_coeffs(|p| p * c)
    }

    /// Apply `f` to every coefficient, dropping those that become zero.
    pub fn map_coeffs<F: Fn(&MultiPoly) -> MultiPoly>(&self, f: F) -> Laurent {
        let mut out = Laurent::zero(self.window);
        for (k, c) in &self.coeffs {
            out.set(*k, f(c));
        }
        out
    }

    /// Multiply by `λ^k`.
    pub fn shift(&self, k: i32) -> Result<Laurent> {
        let mut out = Laurent::zero(self.window);
        for (e, c) in &self.coeffs {
            let e = e + k;
            if e < self.window.lo {
                return Err(Error::PoleOverflow { exponent: e, lo: self.window.lo });
            }
            if e <= self.window.hi {
                out.set(e, c.clone());
            }
        }
        Ok(out)
    }

    /// `π`: the strictly negative part.
    pub fn pi(&self) -> Laurent {
        Laurent { window: self.window, coeffs: self.coeffs.range(..0).map(|(k, c)| (*k, c.clone())).collect() }
    }

    /// `(π(a), (id − π)(a))`.
    pub fn minimal_subtraction(&self) -> (Laurent, Laurent) {
        let neg = self.pi();
        let pos =
            Laurent { window: self.window, coeffs: self.coeffs.range(0..).map(|(k, c)| (*k, c.clone())).collect() };
        (neg, pos)
    }

    /// `R = π₊ − π₋ = id − 2π`.
    pub fn r_matrix(&self) -> Laurent {
        self.sub(&self.pi().scale(&Scalar::from_int(2)))
    }

    pub fn is_holomorphic(&self) -> bool {
        self.lowest_exponent().is_none_or(|k| k >= 0)
    }

    pub fn is_pure_pole(&self) -> bool {
        self.highest_exponent().is_none_or(|k| k < 0)
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.coeffs.values().any(|c| c.contains_var(v))
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.coeffs.values().map(|c| c.degree_in(v)).max().unwrap_or(0)
    }

    pub fn derivative(&self, v: Var) -> Laurent {
        self.map_coeffs(|c| c.derivative(v))
    }

    pub fn partial_eval(&self, point: &Assignment) -> Laurent {
        self.map_coeffs(|c| c.partial_eval(point))
    }

    pub fn substitute(&self, v: Var, value: &MultiPoly) -> Laurent {
        self.map_coeffs(|c| c.substitute(v, value))
    }

    /// `(exponent, coefficient string)` pairs, the JSON wire form.
    pub fn to_pairs(&self) -> Vec<(i32, String)> {
        self.coeffs.iter().map(|(k, c)| (*k, c.to_string())).collect()
    }

    pub fn from_pairs(window: Window, pairs: &[(i32, String)]) -> Result<Self> {
        let mut terms = Vec::with_capacity(pairs.len());
        for (k, s) in pairs {
            terms.push((*k, s.parse::<MultiPoly>()?));
        }
        Self::from_terms(window, terms)
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, c)) in self.coeffs.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})*λ")?,
                _ => write!(f, "({c})*λ^{k}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
