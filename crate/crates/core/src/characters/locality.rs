use super::{adjoint, birkhoff, Character, Functional, InfChar};
use crate::algebra::{Laurent, MultiPoly, Scalar, Var, Window};
use crate::error::{Error, Result};

/// `φˢ(x) = e^{sλ|x|} φ(x)`, with the exponential truncated at the window top.
pub fn scale_phi_s(phi: &Character) -> Result<Character> {
    let window = phi.window();
    let basis = phi.basis().clone();
    let s = MultiPoly::var(Var::S);
    phi.try_map_values_indexed(|i, v| {
        let Some(low) = v.lowest_exponent() else {
            return Ok(v.clone());
        };
        let n = Scalar::from_int(basis.degree(i) as i64);
        let sn = s.scale(&n);
        let top = (window.hi - low).max(0);
        let mut series = Laurent::zero(window);
        let mut coeff = MultiPoly::one();
        for j in 0..=top {
            if j > 0 {
                coeff = (&coeff * &sn).scale(&Scalar::ratio(1, j as i64));
            }
            series = series.add(&Laurent::monomial(window, j, coeff.clone())?);
        }
        series.mul(v)
    })
}

/// `β̃_φ = d/ds|₀ (φ⁻¹ ⋆ φˢ)`, read off as the `s¹` coefficient.
pub fn beta_tilde(phi: &Character) -> Result<InfChar> {
    let scaled = scale_phi_s(phi)?;
    let conv = super::convolve(&phi.inverse()?, &scaled)?;
    let values = conv.values().iter().map(|v| v.map_coeffs(|c| c.coeff_in(Var::S, 1))).collect();
    InfChar::new(phi.basis().clone(), phi.window(), values)
}

/// Whether the counterterm of `φˢ` is free of `s`, evaluated in `window`.
pub fn is_local_in(phi: &Character, window: Window) -> Result<bool> {
    let phi = phi.with_window(window)?;
    let pair = birkhoff(&scale_phi_s(&phi)?)?;
    Ok(pair.neg.values().iter().all(|v| !v.contains_var(Var::S)))
}

/// Exact locality test, repeated in a window enlarged by 4 on both sides.
pub fn is_local(phi: &Character) -> Result<bool> {
    let w = phi.window();
    let here = is_local_in(phi, w)?;
    let wider = is_local_in(phi, w.enlarged(4))?;
    if here != wider {
        return Err(Error::TruncationSensitive);
    }
    Ok(here)
}

/// `β_φ = Ad(φ₊(0)) (β̃_φ|_{λ=0})`.
pub fn beta_function(phi: &Character) -> Result<InfChar> {
    if !is_local(phi)? {
        return Err(Error::NotLocal);
    }
    let pos0 = birkhoff(phi)?.pos.at_lambda_zero();
    let slice = beta_tilde(phi)?.map_values(|v| Laurent::constant(v.window(), v.coeff(0)));
    adjoint(&pos0, &slice)
}

#[cfg(test)]
mod tests {
    use super::super::tilde_r;
    use super::*;
    use crate::trees::TreeBasis;
    use std::sync::Arc;

    fn lam(w: Window, k: i32, c: i64) -> Laurent {
        Laurent::monomial(w, k, MultiPoly::from_int(c)).unwrap()
    }

    fn sample() -> Character {
        let b = Arc::new(TreeBasis::corollas(3));
        let w = Window::DEFAULT;
        Character::new(b, w, vec![lam(w, 0, 2).add(&lam(w, 1, 1)), lam(w, 1, 3), lam(w, 0, -1)]).unwrap()
    }

    #[test]
    fn scaling_basics() {
        let phi = sample();
        let scaled = scale_phi_s(&phi).unwrap();
        let at_zero = scaled.map_values(|v| v.map_coeffs(|c| c.coeff_in(Var::S, 0)));
        assert_eq!(at_zero, phi);
        let d = scaled.map_values(|v| v.map_coeffs(|c| c.coeff_in(Var::S, 1)));
        let expect = phi.value(2).shift(1).unwrap().scale(&Scalar::from_int(3));
        assert_eq!(d.value(2), &expect);
    }

    #[test]
    fn beta_tilde_is_lambda_tilde_r() {
        let phi = sample();
        let bt = beta_tilde(&phi).unwrap();
        assert_eq!(bt.value(0), &phi.value(0).shift(1).unwrap());
        assert_eq!(bt, tilde_r(&phi).unwrap().shift(1).unwrap());
        assert!(bt.values().iter().all(Laurent::is_holomorphic));
    }

    #[test]
    fn locality_of_simple_cases() {
        let phi = sample();
        assert!(is_local(&phi).unwrap());
        let eps = Character::counit(phi.basis().clone(), phi.window());
        assert!(is_local(&eps).unwrap());
        assert!(beta_function(&eps).unwrap().is_zero());
        let b = phi.basis().clone();
        let w = phi.window();
        let pole = Character::new(b, w, vec![lam(w, -1, 1), Laurent::zero(w), Laurent::zero(w)]).unwrap();
        // the counterterm on the 2-corolla picks up −s·λ⁻¹
        assert!(!is_local(&pole).unwrap());
        assert_eq!(beta_function(&pole), Err(Error::NotLocal));
    }
}
