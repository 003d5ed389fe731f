use super::{convolve, product, star_exp, star_log, Character, Functional};
use crate::algebra::Laurent;
use crate::error::{Error, Result};

/// `φ = neg⁻¹ ⋆ pos` with `neg` pure-pole on positive degree and `pos` holomorphic.
#[derive(Clone, Debug, PartialEq)]
pub struct BirkhoffPair {
    pub neg: Character,
    pub pos: Character,
}

impl BirkhoffPair {
    pub fn recompose(&self) -> Result<Character> {
        self.neg.inverse()?.convolve(&self.pos)
    }

    pub fn is_normalized(&self) -> bool {
        self.neg.values().iter().all(Laurent::is_pure_pole) && self.pos.values().iter().all(Laurent::is_holomorphic)
    }
}

/// Bogoliubov recursion:
/// `φ̄(T) = φ(T) + Σ′ φ₋(P)·φ(R)`, `φ₋(T) = −π(φ̄(T))`, `φ₊(T) = φ̄(T) + φ₋(T)`.
pub fn birkhoff(phi: &Character) -> Result<BirkhoffPair> {
    let basis = phi.basis().clone();
    let window = phi.window();
    let mut neg: Vec<Laurent> = Vec::with_capacity(basis.len());
    let mut pos: Vec<Laurent> = Vec::with_capacity(basis.len());
    for i in 0..basis.len() {
        let mut bar = Laurent::zero(window);
        for cut in basis.cuts(i) {
            if cut.left.as_slice() == [i] {
                continue;
            }
            let right = phi.on_forest(&cut.right)?;
            if right.is_zero() {
                continue;
            }
            let left = product(&neg, &cut.left, window)?;
            bar = bar.add(&left.mul(&right)?.scale(&cut.coeff));
        }
        let n = bar.pi().neg();
        pos.push(bar.add(&n));
        neg.push(n);
    }
    Ok(BirkhoffPair { neg: Character::new(basis.clone(), window, neg)?, pos: Character::new(basis, window, pos)? })
}

/// Independent route: repeatedly strip the pole part of `log⋆ψ` by left
/// multiplication with `exp⋆(−π log⋆ψ)` until `ψ` is holomorphic.
pub fn birkhoff_by_splitting(phi: &Character) -> Result<BirkhoffPair> {
    let basis = phi.basis().clone();
    let window = phi.window();
    let max_deg = (0..basis.len()).map(|i| basis.degree(i)).max().unwrap_or(0);
    let mut c = Character::counit(basis, window);
    let mut psi = phi.clone();
    for _ in 0..=2 * max_deg + 1 {
        let z = star_log(&psi)?;
        let z_neg = z.map_values(|v| v.pi().neg());
        if z_neg.is_zero() {
            return Ok(BirkhoffPair { neg: c, pos: psi });
        }
        let e = star_exp(&z_neg)?;
        c = Character::from_linear(convolve(&e, &c)?);
        psi = Character::from_linear(convolve(&e, &psi)?);
    }
    Err(Error::Unsupported("pole stripping did not terminate".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{MultiPoly, Window};
    use crate::trees::TreeBasis;
    use std::sync::Arc;

    fn lam(w: Window, k: i32, c: i64) -> Laurent {
        Laurent::monomial(w, k, MultiPoly::from_int(c)).unwrap()
    }

    #[test]
    fn holomorphic_input_is_untouched() {
        let b = Arc::new(TreeBasis::corollas(3));
        let w = Window::DEFAULT;
        let phi = Character::new(b.clone(), w, vec![lam(w, 0, 2), lam(w, 1, 1), lam(w, 2, -3)]).unwrap();
        let pair = birkhoff(&phi).unwrap();
        assert!(pair.neg.is_counit());
        assert_eq!(pair.pos, phi);
    }

    #[test]
    fn single_pole_on_the_vertex() {
        let b = Arc::new(TreeBasis::corollas(3));
        let w = Window::DEFAULT;
        let phi = Character::new(b, w, vec![lam(w, -1, 1), Laurent::zero(w), Laurent::zero(w)]).unwrap();
        let pair = birkhoff(&phi).unwrap();
        assert_eq!(pair.neg.value(0), &lam(w, -1, -1));
        assert!(pair.pos.value(0).is_zero());
        assert_eq!(pair.recompose().unwrap(), phi);
        assert!(pair.is_normalized());
        assert_eq!(birkhoff_by_splitting(&phi).unwrap(), pair);
    }

    #[test]
    fn routes_agree_on_mixed_input() {
        let b = Arc::new(TreeBasis::full(4));
        let w = Window::DEFAULT;
        let values =
            (0..b.len()).map(|i| lam(w, -1, i as i64 + 1).add(&lam(w, 1, 2)).add(&lam(w, -2, 1 - i as i64))).collect();
        let phi = Character::new(b, w, values).unwrap();
        let a = birkhoff(&phi).unwrap();
        assert_eq!(a.recompose().unwrap(), phi);
        assert!(a.is_normalized());
        assert_eq!(birkhoff_by_splitting(&phi).unwrap(), a);
    }
}
