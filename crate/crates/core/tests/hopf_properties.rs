use std::sync::Arc;

use ck_lax::algebra::{Laurent, MultiPoly, Scalar, Var, Window};
use ck_lax::characters::{
    beta_tilde, birkhoff, birkhoff_by_splitting, is_local, pair_on_forest, star_exp, star_log, tilde_r, Character,
    InfChar,
};
use ck_lax::trees::{antipode, enumerate_forests, enumerate_trees, Forest, HopfElement, TreeBasis};
use proptest::prelude::*;

const W: Window = Window { lo: -10, hi: 10 };

fn basis() -> Arc<TreeBasis> {
    Arc::new(TreeBasis::full(4))
}

fn rational() -> impl Strategy<Value = Scalar> {
    (-5i64..=5, 1i64..=4).prop_map(|(a, b)| Scalar::ratio(a, b))
}

fn series(lo: i32) -> impl Strategy<Value = Laurent> {
    prop::collection::vec(rational(), 4).prop_map(move |cs| {
        Laurent::from_terms(W, cs.into_iter().enumerate().map(|(k, c)| (lo + k as i32, MultiPoly::constant(c))))
            .unwrap()
    })
}

fn character(lo: i32) -> impl Strategy<Value = Character> {
    prop::collection::vec(series(lo), 8).prop_map(|v| Character::new(basis(), W, v).unwrap())
}

fn inf_char() -> impl Strategy<Value = InfChar> {
    prop::collection::vec(series(-1), 8).prop_map(|v| InfChar::new(basis(), W, v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn convolution_is_associative_with_unit(a in character(0), b in character(-1), c in character(0)) {
        let eps = Character::counit(basis(), W);
        prop_assert_eq!(a.convolve(&eps).unwrap(), a.clone());
        prop_assert_eq!(eps.convolve(&a).unwrap(), a.clone());
        let left = a.convolve(&b).unwrap().convolve(&c).unwrap();
        let right = a.convolve(&b.convolve(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn inverse_routes_agree(a in character(-1)) {
        let inv = a.inverse().unwrap();
        prop_assert_eq!(&inv, &a.inverse_via_antipode().unwrap());
        prop_assert!(a.convolve(&inv).unwrap().is_counit());
    }

    #[test]
    fn exp_and_log_are_inverse(z in inf_char()) {
        prop_assert_eq!(star_log(&star_exp(&z).unwrap()).unwrap(), z);
    }

    #[test]
    fn brackets_are_infinitesimal_characters(x in inf_char(), y in inf_char()) {
        // ⟨Z, hk⟩ = ⟨Z, h⟩ε(k) + ε(h)⟨Z, k⟩ vanishes on products of two trees
        let z = x.lie_bracket(&y).unwrap();
        let b = basis();
        let eps = Character::counit(b.clone(), W);
        for i in 0..b.len() {
            for j in i..b.len() {
                if b.degree(i) + b.degree(j) > 4 {
                    continue;
                }
                let lhs = pair_on_forest(&x, &y, &[i, j]).unwrap().sub(&pair_on_forest(&y, &x, &[i, j]).unwrap());
                prop_assert!(lhs.is_zero());
                prop_assert!(pair_on_forest(&z, &eps, &[i, j]).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn birkhoff_factorization(phi in character(-2)) {
        let pair = birkhoff(&phi).unwrap();
        prop_assert_eq!(pair.recompose().unwrap(), phi.clone());
        prop_assert!(pair.is_normalized());
        prop_assert_eq!(birkhoff_by_splitting(&phi).unwrap(), pair);
    }

    #[test]
    fn beta_tilde_is_lambda_times_tilde_r(phi in character(-1)) {
        prop_assert_eq!(beta_tilde(&phi).unwrap(), tilde_r(&phi).unwrap().shift(1).unwrap());
    }

    #[test]
    fn holomorphic_characters_are_local(phi in character(0)) {
        prop_assert!(is_local(&phi).unwrap());
        prop_assert!(birkhoff(&phi).unwrap().neg.is_counit());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn antipode_is_an_involution(i in 0usize..enumerate_forests(5).len()) {
        let f = HopfElement::from_forest(enumerate_forests(5)[i].clone());
        prop_assert_eq!(antipode(&antipode(&f)), f);
    }
}

#[test]
fn degree_zero_is_the_unit_alone() {
    let forests = enumerate_forests(6);
    let zero: Vec<&Forest> = forests.iter().filter(|f| f.degree() == 0).collect();
    assert_eq!(zero, vec![&Forest::unit()]);
}

/// Unlabeled rooted trees counted through the Euler transform of the
/// sequence itself, a route independent of the recurrence in the claims.
#[test]
fn tree_counts_by_euler_transform() {
    let max = 7;
    let mut a = vec![0i64; max + 1];
    a[1] = 1;
    for n in 1..max {
        // forests with n vertices: product over tree sizes of 1/(1−x^k)^{a_k}
        let mut forests = vec![0i64; n + 1];
        forests[0] = 1;
        for k in 1..=n {
            for _ in 0..a[k] {
                for m in k..=n {
                    forests[m] += forests[m - k];
                }
            }
        }
        a[n + 1] = forests[n];
    }
    let mut counts = vec![0i64; max + 1];
    for t in enumerate_trees(max) {
        counts[t.degree()] += 1;
    }
    assert_eq!(counts, a);
    assert_eq!(&a[1..=6], &[1, 1, 2, 4, 9, 20]);
}

#[test]
fn scaling_in_s_is_polynomial() {
    let b = basis();
    let phi = Character::new(
        b.clone(),
        W,
        (0..b.len()).map(|i| Laurent::from_scalar(W, Scalar::from_int(i as i64 + 1))).collect(),
    )
    .unwrap();
    let scaled = ck_lax::characters::scale_phi_s(&phi).unwrap();
    assert!(scaled.values().iter().all(|v| v.contains_var(Var::S)));
}
