use std::sync::Arc;

use lgb_core::algebra::FrobeniusAlgebra;
use lgb_core::isomorphism::{solve_scaling_iso, ScalingOutcome};
use lgb_core::kernel::rational::frac;
use lgb_core::kernel::{parse_polynomial, rat, Field, Modulus, Monomial, Polynomial, Rational, Scalar};
use lgb_core::milnor::MilnorRing;
use lgb_core::orbifold::build_bmodel;
use lgb_core::structure::compute_weights;
use lgb_core::symmetry::{act_on_monomial, check_symmetry, max_symmetry_group, subgroup_generated};
use lgb_core::Exec;
use proptest::prelude::*;

const INVERTIBLE: &[&str] = &[
    "x^4 + y^4",
    "x^3*y + x*y^3",
    "x^2 + x*y^3",
    "x^2*y + y^3",
    "x^5 + y^3",
    "x^2*y + y^2*z + z^3",
    "x^2*y + y^2*z + z^2*x",
];

const SMALL: &[&str] = &[
    "x^4 + y^4",
    "x^3*y + x*y^3",
    "x^2 + y^6",
    "x^2 + x*y^3",
    "x^2*y + y^3",
    "x^2*y + x*y^2",
    "x^2 + x*y^3 + y^6",
    "x^3 + y^3 + z^2",
    "x^2*y + y^2*z + z^3",
];

fn vars_for(n: usize) -> Vec<&'static str> {
    ["x", "y", "z", "w"][..n].to_vec()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn group_action_is_additive(k in 0..INVERTIBLE.len(), i in 0usize..64, j in 0usize..64, e in prop::collection::vec(0u32..7, 3)) {
        let w = parse_polynomial(INVERTIBLE[k], None).unwrap();
        let g = max_symmetry_group(&w).unwrap();
        let els = g.elements();
        let (a, b) = (&els[i % els.len()], &els[j % els.len()]);
        let m = Monomial::new(e[..w.nvars()].to_vec());
        let lhs = frac(&act_on_monomial(&a.add(b), &m));
        let rhs = frac(&(act_on_monomial(a, &m) + act_on_monomial(b, &m)));
        prop_assert_eq!(lhs, rhs);
        prop_assert!(g.contains(&a.add(b)));
        prop_assert!(g.contains(&a.neg()));
        prop_assert!(check_symmetry(&w, a).is_ok());
    }

    #[test]
    fn renaming_variables_permutes_weights(k in 0..SMALL.len(), perm in Just(()).prop_perturb(|_, mut rng| {
        let mut p: Vec<usize> = (0..4).collect();
        for i in (1..4).rev() {
            let j = (rng.next_u32() as usize) % (i + 1);
            p.swap(i, j);
        }
        p
    })) {
        let base = parse_polynomial(SMALL[k], None).unwrap();
        let n = base.nvars();
        let names = vars_for(n);
        let order: Vec<usize> = perm.into_iter().filter(|&i| i < n).collect();
        let shuffled: Vec<&str> = order.iter().map(|&i| names[i]).collect();
        let w = parse_polynomial(SMALL[k], Some(&shuffled)).unwrap();
        let q0 = compute_weights(&base).unwrap();
        let q1 = compute_weights(&w).unwrap();
        for (slot, &orig) in order.iter().enumerate() {
            prop_assert_eq!(&q1.q[slot], &q0.q[orig]);
        }
        let r0 = MilnorRing::new(&base).unwrap();
        let r1 = MilnorRing::new(&w).unwrap();
        prop_assert_eq!(r0.mu(), r1.mu());
        prop_assert_eq!(r0.c_hat(), r1.c_hat());
    }

    #[test]
    fn extension_field_arithmetic(a in prop::collection::vec(-5i64..6, 3), b in prop::collection::vec(-5i64..6, 3), c in prop::collection::vec(-5i64..6, 3)) {
        let field = Field::extension(Modulus::root_of("t", 3, &rat(2, 1)).unwrap());
        let t = Scalar::generator(&field);
        let make = |v: &[i64]| {
            let mut acc = Scalar::zero_in(&field);
            let mut p = Scalar::one_in(&field);
            for x in v {
                acc = &acc + &(&p * &Scalar::from_int(*x));
                p = &p * &t;
            }
            acc
        };
        let (x, y, z) = (make(&a), make(&b), make(&c));
        prop_assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        prop_assert_eq!(&x * &(&y + &z), &(&x * &y) + &(&x * &z));
        if !x.is_zero() {
            let inv = x.inv().unwrap();
            prop_assert!((&x * &inv).is_one());
        }
        prop_assert!((&(&(&t * &t) * &t) - &Scalar::from_int(2)).is_zero());
    }

    #[test]
    fn rescaled_polynomial_has_scaling_isomorphism(k in 0..SMALL.len(), s in prop::collection::vec(prop_oneof![Just(1i64), Just(2), Just(-1), Just(3), Just(-2)], 3)) {
        let w = parse_polynomial(SMALL[k], None).unwrap();
        let n = w.nvars();
        let images: Vec<Polynomial> = (0..n)
            .map(|i| Polynomial::var(w.vars(), i).scale(&Scalar::from_int(s[i])))
            .collect();
        let v = w.compose(&images);
        let a = Arc::new(MilnorRing::new(&w).unwrap());
        let b = Arc::new(MilnorRing::new(&v).unwrap());
        prop_assert_eq!(a.mu(), b.mu());
        match solve_scaling_iso(&a, &b, Exec::Sequential).unwrap() {
            ScalingOutcome::Found(sol) => {
                prop_assert!(sol.certificate.passed(), "{}", sol.certificate);
            }
            ScalingOutcome::Infeasible(why) => prop_assert!(false, "{w} -> {v}: {why:?}"),
        }
    }

    #[test]
    fn bmodel_pairing_only_between_inverse_sectors(k in 0..3usize) {
        let cases: [(&str, Vec<Vec<Rational>>); 3] = [
            ("x^2 + y^6", vec![vec![rat(1, 2), rat(1, 2)]]),
            ("x^4 + y^4", vec![vec![rat(1, 4), rat(3, 4)]]),
            ("x^3 + y^3 + z^3", vec![vec![rat(1, 3), rat(2, 3), rat(0, 1)]]),
        ];
        let (s, gens) = &cases[k];
        let w = parse_polynomial(s, None).unwrap();
        let g = subgroup_generated(&w, gens).unwrap();
        let b = build_bmodel(&w, &g).unwrap();
        for i in 0..b.dim() {
            for j in 0..b.dim() {
                let (si, _) = b.element(i);
                let (sj, _) = b.element(j);
                let gi = &b.sectors()[si].element;
                let gj = &b.sectors()[sj].element;
                if !FrobeniusAlgebra::pairing(&b, i, j).is_zero() {
                    prop_assert!(gi.add(gj).is_identity(), "{} {}", b.label(i), b.label(j));
                    let deg = b.degree(i) + b.degree(j);
                    prop_assert_eq!(deg, b.top_degree());
                }
            }
        }
    }
}

#[test]
fn sequential_and_parallel_rings_agree() {
    for s in SMALL {
        let w = parse_polynomial(s, None).unwrap();
        let a = MilnorRing::with_exec(&w, Exec::Sequential).unwrap();
        let b = MilnorRing::with_exec(&w, Exec::default()).unwrap();
        assert_eq!(a.basis(), b.basis());
        assert_eq!(a.product_table().len(), b.product_table().len());
        for (ra, rb) in a.product_table().iter().zip(b.product_table()) {
            assert_eq!(ra, rb, "{s}");
        }
    }
}
