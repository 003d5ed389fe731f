use ck_lax::algebra::{scalar_rank, ExactMatrix, Laurent, Monomial, MultiPoly, Scalar, Var, Window};
use proptest::prelude::*;

fn scalar() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=4, -3i64..=3, 1i64..=3)
        .prop_map(|(a, b, c, d)| &Scalar::ratio(a, b) + &(&Scalar::i() * &Scalar::ratio(c, d)))
}

fn poly() -> impl Strategy<Value = MultiPoly> {
    prop::collection::vec((scalar(), 0u32..3, 0u32..3, 0u32..2), 0..5).prop_map(|terms| {
        let mut p = MultiPoly::zero();
        for (c, a, b, e) in terms {
            let m = Monomial::from_pairs(&[(Var::T, a), (Var::X(1), b), (Var::Xs(2), e)]);
            p.add_assign_ref(&MultiPoly::term(c, m));
        }
        p
    })
}

const W: Window = Window { lo: -8, hi: 8 };

fn laurent() -> impl Strategy<Value = Laurent> {
    prop::collection::vec((-2i32..=3, poly()), 0..4)
        .prop_map(|terms| Laurent::from_terms(W, terms).expect("exponents inside the window"))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn scalar_field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, Scalar::zero());
        if let Some(inv) = a.inv() {
            prop_assert!((&a * &inv).is_one());
        } else {
            prop_assert!(a.is_zero());
        }
    }

    #[test]
    fn poly_ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &MultiPoly::one(), a.clone());
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn poly_display_parses_back(a in poly()) {
        let back: MultiPoly = a.to_string().parse().unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn poly_derivative_is_a_derivation(a in poly(), b in poly()) {
        let d = |p: &MultiPoly| p.derivative(Var::T);
        prop_assert_eq!(d(&(&a * &b)), &(&d(&a) * &b) + &(&a * &d(&b)));
    }

    #[test]
    fn laurent_ring_axioms(a in laurent(), b in laurent(), c in laurent()) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b.add(&c)).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()));
        prop_assert_eq!(a.mul(&Laurent::one(W)).unwrap(), a.clone());
        // a truncated tail of a·b can reach λ^{hi−2} after multiplying by c
        let lhs = a.mul(&b).unwrap().mul(&c).unwrap();
        let rhs = a.mul(&b.mul(&c).unwrap()).unwrap();
        for k in W.lo..=W.hi - 2 {
            prop_assert_eq!(lhs.coeff(k), rhs.coeff(k));
        }
    }

    #[test]
    fn minimal_subtraction_is_a_rota_baxter_projection(a in laurent(), b in laurent(), k in scalar()) {
        let pi = |x: &Laurent| x.pi();
        prop_assert_eq!(pi(&pi(&a)), pi(&a));
        prop_assert_eq!(pi(&a.add(&b.scale(&k))), pi(&a).add(&pi(&b).scale(&k)));
        let lhs = pi(&a.mul(&b).unwrap()).add(&pi(&a).mul(&pi(&b)).unwrap());
        let rhs = pi(&a.mul(&pi(&b)).unwrap()).add(&pi(&pi(&a).mul(&b).unwrap()));
        prop_assert_eq!(lhs, rhs);
        let (neg, pos) = a.minimal_subtraction();
        prop_assert_eq!(neg.add(&pos), a.clone());
        prop_assert!(neg.is_pure_pole() && pos.is_holomorphic());
    }

    #[test]
    fn r_matrix_is_identity_minus_twice_pi(a in laurent()) {
        prop_assert_eq!(a.r_matrix(), a.sub(&a.pi().scale(&Scalar::from_int(2))));
        let (neg, pos) = a.minimal_subtraction();
        prop_assert_eq!(a.r_matrix(), pos.sub(&neg));
    }
}

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = Vec<Vec<Scalar>>> {
    prop::collection::vec(prop::collection::vec((-3i64..=3).prop_map(Scalar::from_int), cols), rows)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn rank_is_invariant_under_invertible_operations(
        m in matrix(4, 5),
        ops in prop::collection::vec((0usize..4, 0usize..4, -3i64..=3), 0..8),
        cops in prop::collection::vec((0usize..5, 0usize..5, -3i64..=3), 0..8),
    ) {
        let r = scalar_rank(m.clone());
        let mut n = m.clone();
        for (i, j, c) in ops {
            if i != j {
                let add: Vec<Scalar> = n[j].iter().map(|x| x * &Scalar::from_int(c)).collect();
                for (x, y) in n[i].iter_mut().zip(add) {
                    *x += &y;
                }
            }
        }
        for (i, j, c) in cops {
            if i != j {
                for row in n.iter_mut() {
                    let y = &row[j] * &Scalar::from_int(c);
                    row[i] += &y;
                }
            }
        }
        prop_assert_eq!(scalar_rank(n.clone()), r);
        let t: Vec<Vec<Scalar>> = (0..5).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect();
        prop_assert_eq!(scalar_rank(t), r);
        prop_assert_eq!(ExactMatrix::from_scalars(n).unwrap().symbolic_rank().rank, r);
    }
}

#[test]
fn pole_overflow_is_an_error() {
    let w = Window::new(-2, 2);
    let a = Laurent::from_terms(w, [(-2, MultiPoly::one())]).unwrap();
    assert!(a.mul(&a).is_err());
}
