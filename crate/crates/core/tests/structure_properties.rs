use std::sync::Arc;

use ck_lax::algebra::{MultiPoly, Scalar, Var, Window};
use ck_lax::flow::{self, FlowParams, FLOW_WINDOW};
use ck_lax::lie::{double, lie_poisson_matrix, nilpotency_step, AlgebraName, LieData};
use ck_lax::poisson::{self, poisson_bracket, HamiltonianAnsatz, PoissonPoly};
use ck_lax::trees::Orientation;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn lie(a: AlgebraName) -> Arc<LieData> {
    Arc::new(a.lie_data())
}

#[test]
fn every_algebra_is_antisymmetric_and_satisfies_jacobi() {
    for a in AlgebraName::ALL {
        let g = a.lie_data();
        assert_eq!(g.check_antisymmetry(), Ok(()), "{a}");
        assert_eq!(g.check_jacobi(), Ok(()), "{a}");
    }
}

#[test]
fn double_restricts_to_the_base_and_dual_is_abelian() {
    for a in [AlgebraName::G1, AlgebraName::G2, AlgebraName::G3] {
        let g = a.lie_data();
        let d = double(&g);
        assert_eq!(d.unstarred_part(), g);
        let k = g.dim();
        for x in k..2 * k {
            for y in k..2 * k {
                assert!(d.bracket_basis(x, y).iter().all(Scalar::is_zero));
            }
        }
    }
}

#[test]
fn delta2_is_a_truncation_of_delta3() {
    let (d2, d3) = (AlgebraName::Delta2.lie_data(), AlgebraName::Delta3.lie_data());
    // X1 = index 0, X4 = index 3, X5 = index 4
    assert!(d2.bracket_basis(0, 3).iter().all(Scalar::is_zero));
    assert_eq!(d3.constant(0, 3, 4), &Scalar::from_int(4));
}

#[test]
fn poisson_brackets_of_delta3() {
    let d = lie(AlgebraName::Delta3);
    let f = |s: &str| PoissonPoly::parse(d.clone(), s).unwrap();
    let cases = [
        ("x1", "x2", "2*x3s"),
        ("x1", "x3s", "-2*x2"),
        ("x2", "x3s", "2*x1"),
        ("x1", "x3", "3*x4s"),
        ("x1", "x4s", "-3*x3"),
        ("x3", "x4s", "3*x1"),
        ("x1", "x4", "4*x5s"),
        ("x1", "x5s", "-4*x4"),
        ("x4", "x5s", "4*x1"),
    ];
    for (a, b, want) in cases {
        assert_eq!(poisson_bracket(&f(a), &f(b)).unwrap().poly(), &want.parse::<MultiPoly>().unwrap(), "{{{a}, {b}}}");
    }
}

#[test]
fn poisson_matrix_is_antisymmetric_and_linear() {
    for a in [AlgebraName::Delta1, AlgebraName::Delta2, AlgebraName::Delta3] {
        let g = a.lie_data();
        let n = g.dim();
        let p = lie_poisson_matrix(&g, &g.coordinates()).unwrap();
        for i in 0..n {
            for j in 0..n {
                assert_eq!(p.get(i, j), &-p.get(j, i));
                assert!(p.get(i, j).total_degree() <= 1 && p.get(i, j).constant_term().is_zero());
            }
        }
    }
}

#[test]
fn casimirs_of_delta1() {
    let d = lie(AlgebraName::Delta1);
    let fam = poisson::delta1_family(&d);
    for c in ["x1s", "x2s", "x3"] {
        let c = PoissonPoly::parse(d.clone(), c).unwrap();
        for i in 0..d.dim() {
            let x = PoissonPoly::new(d.clone(), MultiPoly::var(d.coord_var(i))).unwrap();
            assert!(poisson_bracket(&c, &x).unwrap().poly().is_zero());
        }
        for h in &fam {
            assert!(poisson_bracket(&c, h).unwrap().poly().is_zero());
        }
    }
}

#[test]
fn listed_families_are_in_involution() {
    for (a, fam) in [
        (AlgebraName::Delta1, poisson::delta1_family as fn(&Arc<LieData>) -> Vec<PoissonPoly>),
        (AlgebraName::Delta2, poisson::delta2_family),
        (AlgebraName::Delta3, poisson::delta3_family),
    ] {
        let d = lie(a);
        let mut fam = fam(&d);
        if a == AlgebraName::Delta3 {
            // the δ₃ family combines H₁ with H₅, H₆, H₇
            let combo = fam[0].add(&fam[4]).unwrap().add(&fam[5]).unwrap().add(&fam[6]).unwrap();
            fam = vec![fam[1].clone(), fam[2].clone(), fam[3].clone(), combo];
        }
        assert!(poisson::check_involution(&fam).unwrap().holds(), "{a}");
    }
}

type Terms = Vec<(i64, usize, usize, u32)>;

fn terms() -> impl Strategy<Value = Terms> {
    prop::collection::vec((-3i64..=3, 0usize..10, 0usize..10, 0u32..2), 1..4)
}

/// Sum of `c · x_a · x_b^e` over coordinates of `d` (indices taken mod the dimension).
fn small_poly(d: &LieData, terms: &Terms) -> MultiPoly {
    let x = |i: usize| MultiPoly::var(d.coord_var(i % d.dim()));
    let mut p = MultiPoly::zero();
    for &(c, a, b, e) in terms {
        p.add_assign_ref(&(&x(a) * &x(b).pow(e)).scale(&Scalar::from_int(c)));
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn poisson_bracket_is_antisymmetric_and_leibniz(a in terms(), b in terms(), c in terms(), level in 0usize..3) {
        let d = lie([AlgebraName::Delta1, AlgebraName::Delta2, AlgebraName::Delta3][level]);
        let (a, b, c) = (small_poly(&d, &a), small_poly(&d, &b), small_poly(&d, &c));
        let f = |p: &MultiPoly| PoissonPoly::new(d.clone(), p.clone()).unwrap();
        let br = |x: &MultiPoly, y: &MultiPoly| poisson_bracket(&f(x), &f(y)).unwrap().poly().clone();
        prop_assert_eq!(br(&a, &b), -br(&b, &a));
        prop_assert_eq!(br(&a, &(&b * &c)), &(&br(&a, &b) * &c) + &(&b * &br(&a, &c)));
    }

    #[test]
    fn poisson_bracket_of_delta1_satisfies_jacobi(a in terms(), b in terms(), c in terms()) {
        let d = lie(AlgebraName::Delta1);
        let (a, b, c) = (small_poly(&d, &a), small_poly(&d, &b), small_poly(&d, &c));
        let f = |p: &MultiPoly| PoissonPoly::new(d.clone(), p.clone()).unwrap();
        let br = |x: &MultiPoly, y: &MultiPoly| poisson_bracket(&f(x), &f(y)).unwrap().poly().clone();
        let jacobi = &(&br(&a, &br(&b, &c)) + &br(&b, &br(&c, &a))) + &br(&c, &br(&a, &b));
        prop_assert!(jacobi.is_zero());
    }

    #[test]
    fn flow_invariants(seed in 0u64..1000, p in -1i32..=0, level in 0usize..3) {
        let alg = [AlgebraName::G1, AlgebraName::G2, AlgebraName::G3][level];
        let basis = Arc::new(alg.tree_basis(Orientation::PrunedTrunk));
        let l0 = flow::random_l0(basis, FLOW_WINDOW, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let params = FlowParams::new(alg, p, l0.clone());
        // solve_lax fails unless Ad g₋ and Ad g₊ agree on L₀
        let traj = flow::solve_lax(&params).unwrap();
        prop_assert_eq!(traj.l_at(&Scalar::zero()), l0);
        let at_zero = [(Var::T, Scalar::zero())].into_iter().collect();
        prop_assert!(traj.g_minus.map_values(|v| v.partial_eval(&at_zero)).is_counit());
        prop_assert!(traj.g_plus.map_values(|v| v.partial_eval(&at_zero)).is_counit());
        let g = alg.lie_data();
        prop_assert!(flow::t_degree(&traj) < nilpotency_step(&g).unwrap() as u32);
        prop_assert!(flow::verify_beta0_equation(&traj, &params, &g).unwrap().holds());
    }

    #[test]
    fn trivial_regime_for_positive_p(seed in 0u64..1000, p in 1i32..=2, level in 0usize..3) {
        let alg = [AlgebraName::G1, AlgebraName::G2, AlgebraName::G3][level];
        let basis = Arc::new(alg.tree_basis(Orientation::PrunedTrunk));
        // λ²·L₀ on 𝔤₃ overflows the default window's positive side
        let window = Window::new(-12, 30);
        let l0 = flow::random_l0(basis, window, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let traj = flow::solve_lax(&FlowParams::new(alg, p, l0.clone())).unwrap();
        prop_assert_eq!(&traj.l_of_t, &l0);
        prop_assert_eq!(traj.phi_t, ck_lax::characters::tilde_r_inv(&l0).unwrap());
    }

    #[test]
    fn fitted_hamiltonians_reproduce_the_flow(seed in 0u64..1000, p in -1i32..=0) {
        let alg = AlgebraName::G1;
        let basis = Arc::new(alg.tree_basis(Orientation::PrunedTrunk));
        let l0 = flow::random_l0(basis, FLOW_WINDOW, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let traj = flow::solve_lax(&FlowParams::new(alg, p, l0)).unwrap();
        let (b0, bn) = (traj.beta0(), traj.beta_k(1 - p));
        match poisson::fit_hamiltonian(&b0, &bn, HamiltonianAnsatz::Diagonal { dim: 3 }) {
            Ok(fit) => prop_assert!(poisson::fit_residual(&fit.hamiltonian, &b0, &bn).iter().all(MultiPoly::is_zero)),
            Err(_) => prop_assert!(poisson::is_degenerate_flow(&b0, &bn)),
        }
    }
}

/// Along a generated flow, `d/dt H(β̃₀) = ⟨∇H, 2[β̃₀, β̃ₙ]⟩`, which does not
/// vanish in general: the family functions are not constants of this motion.
#[test]
fn family_functions_drift_along_generic_flows() {
    let basis = Arc::new(AlgebraName::G1.tree_basis(Orientation::PrunedTrunk));
    let l0 = flow::random_l0(basis, FLOW_WINDOW, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    let traj = flow::solve_lax(&FlowParams::new(AlgebraName::G1, 0, l0)).unwrap();
    assert_eq!(traj.beta0_degree(), 1);
    let d = lie(AlgebraName::Delta1);
    let report = flow::conservation_report(&traj, &poisson::delta1_family(&d));
    // H₁ and H₅ only see x₁, x₂ (constant on 𝔤₁); H₂ = x₃²/2 follows the moving x₃
    assert_eq!(report.drifts[0], "0");
    assert_ne!(report.drifts[1], "0");
    let x3 = &traj.beta0()[2];
    let expect =
        &(&(x3 * x3) - &MultiPoly::constant(x3.coeff_in(Var::T, 0).constant_term().pow(2))).scale(&Scalar::ratio(1, 2));
    assert_eq!(report.drifts[1], expect.to_string());
}

/// The δ₂ bracket is antisymmetric and Leibniz but not Jacobi:
/// `{x₃, {x₃*, x₂}} = {x₃, −2x₁} = 6x₄*` while the other two terms vanish.
#[test]
fn delta2_bracket_violates_jacobi() {
    let d = lie(AlgebraName::Delta2);
    let f = |s: &str| PoissonPoly::parse(d.clone(), s).unwrap();
    let br = |a: &PoissonPoly, b: &PoissonPoly| poisson_bracket(a, b).unwrap();
    let (x, y, z) = (f("x2"), f("x3"), f("x3s"));
    let j = &(br(&x, &br(&y, &z)).poly() + br(&y, &br(&z, &x)).poly()) + br(&z, &br(&x, &y)).poly();
    assert_eq!(j, "6*x4s".parse().unwrap());
}
