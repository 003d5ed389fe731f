//! Sparse multivariate polynomials over the Gaussian rationals.
//!
//! Variables come from one global namespace ([`Var`]) so that polynomials built
//! in different places can always be combined. A monomial is a sorted list of
//! `(variable, exponent)` pairs with positive exponents; the zero polynomial
//! has no terms and no stored coefficient is ever zero.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use super::scalar::{parse_rational, Scalar};
use crate::error::{Error, Result};

/// Indeterminates. `X(i)` / `Xs(i)` are the (1-based) unstarred and starred
/// coordinates on a double Lie algebra, `T` is the flow time, `S` the scaling
/// parameter of `φˢ`, and `Param(i)` are free unknowns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    T,
    S,
    X(u16),
    Xs(u16),
    Param(u16),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::T => write!(f, "t"),
            Var::S => write!(f, "s"),
            Var::X(i) => write!(f, "x{i}"),
            Var::Xs(i) => write!(f, "x{i}s"),
            Var::Param(i) => write!(f, "a{i}"),
        }
    }
}

impl FromStr for Var {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown variable `{s}`"));
        match s {
            "t" => return Ok(Var::T),
            "s" => return Ok(Var::S),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix('a') {
            return rest.parse().map(Var::Param).map_err(|_| bad());
        }
        if let Some(rest) = s.strip_prefix('x') {
            if let Some(idx) = rest.strip_suffix('s') {
                return idx.parse().map(Var::Xs).map_err(|_| bad());
            }
            return rest.parse().map(Var::X).map_err(|_| bad());
        }
        Err(bad())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var, e: u32) -> Self {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(v, e)])
        }
    }

    pub fn from_pairs(pairs: &[(Var, u32)]) -> Self {
        let mut m = Monomial::one();
        for &(v, e) in pairs {
            m = m.mul(&Monomial::var(v, e));
        }
        m
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponent(&self, v: Var) -> u32 {
        self.0.iter().find(|(w, _)| *w == v).map_or(0, |(_, e)| *e)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn pairs(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            match a.0.cmp(&b.0) {
                Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == v {
                let f = other.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((v, e - f)),
                }
            } else {
                out.push((v, e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Pure lexicographic order with `t > s > x1 > x2 > … > x1s > …`.
    pub fn lex_cmp(&self, other: &Monomial) -> Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(a), Some(b)) => match a.0.cmp(&b.0) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => match a.1.cmp(&b.1) {
                        Ordering::Equal => {
                            i += 1;
                            j += 1;
                        }
                        ord => return ord,
                    },
                },
            }
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (k, (v, e)) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

pub type Assignment = BTreeMap<Var, Scalar>;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiPoly {
    terms: BTreeMap<Monomial, Scalar>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn constant(c: Scalar) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn from_int(n: i64) -> Self {
        Self::constant(Scalar::from_int(n))
    }

    pub fn var(v: Var) -> Self {
        Self::term(Scalar::one(), Monomial::var(v, 1))
    }

    pub fn term(c: Scalar, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        MultiPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn constant_term(&self) -> Scalar {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, m: Monomial, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &MultiPoly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c);
        }
    }

    pub fn sub_assign_ref(&mut self, other: &MultiPoly) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), &-c);
        }
    }

    pub fn scale(&self, c: &Scalar) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero();
        }
        MultiPoly { terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect() }
    }

    pub fn mul_monomial(&self, mono: &Monomial) -> MultiPoly {
        MultiPoly { terms: self.terms.iter().map(|(m, a)| (m.mul(mono), a.clone())).collect() }
    }

    pub fn pow(&self, n: u32) -> MultiPoly {
        let mut acc = MultiPoly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|m| m.0.iter().map(|(v, _)| *v)).collect()
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.exponent(v) > 0)
    }

    pub fn degree_in(&self, v: Var) -> u32 {
        self.terms.keys().map(|m| m.exponent(v)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Coefficient of `v^k`, as a polynomial in the remaining variables.
    pub fn coeff_in(&self, v: Var, k: u32) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            if m.exponent(v) == k {
                let rest = Monomial(m.0.iter().copied().filter(|(w, _)| *w != v).collect());
                out.add_term(rest, c);
            }
        }
        out
    }

    pub fn derivative(&self, v: Var) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(v);
            if e == 0 {
                continue;
            }
            let rest: Vec<_> =
                m.0.iter()
                    .filter_map(|&(w, f)| {
                        if w != v {
                            Some((w, f))
                        } else if f > 1 {
                            Some((w, f - 1))
                        } else {
                            None
                        }
                    })
                    .collect();
            out.add_term(Monomial(rest), &(c * &Scalar::from_int(e as i64)));
        }
        out
    }

    /// Replace `v` by the polynomial `value`.
    pub fn substitute(&self, v: Var, value: &MultiPoly) -> MultiPoly {
        let deg = self.degree_in(v);
        if deg == 0 {
            return self.clone();
        }
        let powers: Vec<MultiPoly> = (0..=deg)
            .scan(MultiPoly::one(), |acc, k| {
                let out = acc.clone();
                if k < deg {
                    *acc = &*acc * value;
                }
                Some(out)
            })
            .collect();
        let mut out = MultiPoly::zero();
        for k in 0..=deg {
            let c = self.coeff_in(v, k);
            if !c.is_zero() {
                out.add_assign_ref(&(&c * &powers[k as usize]));
            }
        }
        out
    }

    /// Substitute every variable bound in `point`; unbound variables stay symbolic.
    pub fn partial_eval(&self, point: &Assignment) -> MultiPoly {
        let mut out = MultiPoly::zero();
        for (m, c) in &self.terms {
            let mut coeff = c.clone();
            let mut rest = Vec::new();
            for &(v, e) in &m.0 {
                match point.get(&v) {
                    Some(x) => coeff = &coeff * &x.pow(e),
                    None => rest.push((v, e)),
                }
            }
            out.add_term(Monomial(rest), &coeff);
        }
        out
    }

    pub fn eval(&self, point: &Assignment) -> Result<Scalar> {
        let p = self.partial_eval(point);
        if let Some(v) = p.vars().into_iter().next() {
            return Err(Error::UnassignedVariable(v));
        }
        Ok(p.constant_term())
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().max_by(|a, b| a.0.lex_cmp(b.0))
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &MultiPoly) -> Option<MultiPoly> {
        let (dm, dc) = d.leading_term()?;
        let dc_inv = dc.inv()?;
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero();
        while let Some((rm, rc)) = rem.leading_term() {
            let qm = rm.div(dm)?;
            let qc = rc * &dc_inv;
            let step = MultiPoly::term(qc, qm);
            rem.sub_assign_ref(&(&step * d));
            quot.add_assign_ref(&step);
        }
        Some(quot)
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = self.clone();
        out.sub_assign_ref(rhs);
        out
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        let mut out = MultiPoly::zero();
        if self.is_zero() || rhs.is_zero() {
            return out;
        }
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), &(ca * cb));
            }
        }
        out
    }
}

macro_rules! forward_poly_binop {
    ($imp:ident, $method:ident) => {
        impl $imp<MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $imp<&'a MultiPoly> for MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: &MultiPoly) -> MultiPoly {
                (&self).$method(rhs)
            }
        }
        impl<'a> $imp<MultiPoly> for &'a MultiPoly {
            type Output = MultiPoly;
            fn $method(self, rhs: MultiPoly) -> MultiPoly {
                self.$method(&rhs)
            }
        }
    };
}

forward_poly_binop!(Add, add);
forward_poly_binop!(Sub, sub);
forward_poly_binop!(Mul, mul);

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

impl From<Scalar> for MultiPoly {
    fn from(c: Scalar) -> Self {
        MultiPoly::constant(c)
    }
}

impl From<Var> for MultiPoly {
    fn from(v: Var) -> Self {
        MultiPoly::var(v)
    }
}

impl fmt::Display for MultiPoly {
    /// Terms in decreasing total degree, e.g. `1/2*x1^2 + x3s^2 - 3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<_> = self.terms.iter().collect();
        ordered.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then_with(|| b.0.lex_cmp(a.0)));
        for (k, (m, c)) in ordered.into_iter().enumerate() {
            let zero = num_rational::BigRational::from_integer(0.into());
            let negative = if c.re() == &zero { c.im() < &zero } else { c.is_real() && c.re() < &zero };
            let magnitude = if negative { -c } else { c.clone() };
            if k == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{magnitude}")?;
            } else if magnitude.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{magnitude}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

// ---- parsing ----

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Int(String),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push(Token::Int(chars[start..i].iter().collect()));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character `{c}` in `{s}`")));
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn eat_op(&mut self, op: char) -> bool {
        if self.peek() == Some(&Token::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = if self.eat_op('-') {
            -self.term()?
        } else {
            self.eat_op('+');
            self.term()?
        };
        loop {
            if self.eat_op('+') {
                acc = acc + self.term()?;
            } else if self.eat_op('-') {
                acc = acc - self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.factor()?;
        loop {
            if self.eat_op('*') {
                acc = acc * self.factor()?;
            } else if self.eat_op('/') {
                let d = self.factor()?;
                if !d.is_constant() || d.is_zero() {
                    return Err(Error::Parse("division by a non-constant or zero".into()));
                }
                acc = acc.scale(&d.constant_term().inv().expect("nonzero"));
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<MultiPoly> {
        let base = self.primary()?;
        if self.eat_op('^') {
            match self.tokens.get(self.pos).cloned() {
                Some(Token::Int(n)) => {
                    self.pos += 1;
                    let e: u32 = n.parse().map_err(|_| Error::Parse(format!("bad exponent `{n}`")))?;
                    Ok(base.pow(e))
                }
                other => Err(Error::Parse(format!("expected exponent, found {other:?}"))),
            }
        } else {
            Ok(base)
        }
    }

    fn primary(&mut self) -> Result<MultiPoly> {
        match self.tokens.get(self.pos).cloned() {
            Some(Token::Int(n)) => {
                self.pos += 1;
                Ok(MultiPoly::constant(Scalar::from_rational(parse_rational(&n)?)))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                if name == "i" {
                    Ok(MultiPoly::constant(Scalar::i()))
                } else {
                    Ok(MultiPoly::var(name.parse()?))
                }
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat_op(')') {
                    return Err(Error::Parse("missing `)`".into()));
                }
                Ok(inner)
            }
            other => Err(Error::Parse(format!("unexpected token {other:?}"))),
        }
    }
}

impl FromStr for MultiPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let tokens = tokenize(s)?;
        if tokens.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut parser = Parser { tokens, pos: 0 };
        let p = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(Error::Parse(format!("trailing input in `{s}`")));
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> MultiPoly {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_print() {
        let h = p("1/2*x1^2 + x3s^2");
        assert_eq!(h.to_string(), "1/2*x1^2 + x3s^2");
        assert_eq!(p("x1^2/2 - 3").to_string(), "1/2*x1^2 - 3");
        assert_eq!(p("(1+i)*t").to_string(), "(1+i)*t");
        assert_eq!(p("-(t - s)^2"), p("-t^2 + 2*t*s - s^2"));
        assert!("x1 +".parse::<MultiPoly>().is_err());
        assert!("y7".parse::<MultiPoly>().is_err());
        assert!("1/0".parse::<MultiPoly>().is_err());
    }

    #[test]
    fn derivative_and_substitution() {
        let f = p("t^3 + 2*t*x1 + 5");
        assert_eq!(f.derivative(Var::T), p("3*t^2 + 2*x1"));
        assert_eq!(f.substitute(Var::T, &p("s+1")), p("(s+1)^3 + 2*(s+1)*x1 + 5"));
        assert_eq!(f.coeff_in(Var::T, 1), p("2*x1"));
        assert_eq!(f.degree_in(Var::T), 3);
    }

    #[test]
    fn exact_division() {
        let a = p("x1^2 - x2^2");
        let b = p("x1 + x2");
        assert_eq!(a.div_exact(&b), Some(p("x1 - x2")));
        assert_eq!(p("x1^2 + 1").div_exact(&b), None);
        assert_eq!(MultiPoly::zero().div_exact(&b), Some(MultiPoly::zero()));
    }

    #[test]
    fn eval_requires_all_variables() {
        let f = p("x1*x2");
        let mut pt = Assignment::new();
        pt.insert(Var::X(1), Scalar::from_int(3));
        assert_eq!(f.eval(&pt), Err(Error::UnassignedVariable(Var::X(2))));
        pt.insert(Var::X(2), Scalar::ratio(1, 3));
        assert_eq!(f.eval(&pt).unwrap(), Scalar::one());
    }
}
