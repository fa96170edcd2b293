use std::sync::Arc;

use lgb_core::algebra::FrobeniusAlgebra;
use lgb_core::equivalence::{search_linear_equivalence, verify_substitution, EquivalenceResult};
use lgb_core::isomorphism::{
    extend_isomorphism, solve_scaling_iso, verify_frobenius_iso, Algebra, FrobeniusMap, ScalingOutcome,
};
use lgb_core::kernel::{parse_polynomial, rat, Monomial, Scalar};
use lgb_core::milnor::MilnorRing;
use lgb_core::orbifold::{build_bmodel, verify_bmodel_axioms, BModelOptions};
use lgb_core::symmetry::{subgroup_generated, SymmetryGroup};
use lgb_core::{Error, Exec};

fn ring(s: &str) -> Arc<MilnorRing> {
    Arc::new(MilnorRing::new(&parse_polynomial(s, Some(&["x", "y"])).unwrap()).unwrap())
}

fn half(s: &str) -> SymmetryGroup {
    let w = parse_polynomial(s, Some(&["x", "y"])).unwrap();
    subgroup_generated(&w, &[vec![rat(1, 2), rat(1, 2)]]).unwrap()
}

#[test]
fn element_outside_sl_is_rejected() {
    let w = parse_polynomial("x^2 + y^6", None).unwrap();
    let g = subgroup_generated(&w, &[vec![rat(1, 2), rat(0, 1)]]).unwrap();
    assert!(matches!(build_bmodel(&w, &g), Err(Error::NotInSl(_))));
}

#[test]
fn non_symmetry_is_rejected() {
    let w = parse_polynomial("x^2 + y^6", None).unwrap();
    assert!(matches!(subgroup_generated(&w, &[vec![rat(1, 3), rat(2, 3)]]), Err(Error::NotASymmetry { .. })));
}

#[test]
fn sector_degrees_are_shifted_by_the_unfixed_weights() {
    let w = parse_polynomial("x^3 + y^3 + z^3", None).unwrap();
    let g = subgroup_generated(&w, &[vec![rat(1, 3), rat(2, 3), rat(0, 1)]]).unwrap();
    let b = build_bmodel(&w, &g).unwrap();
    assert!(verify_bmodel_axioms(&b).passed());
    for i in 0..b.dim() {
        let (s, _) = b.element(i);
        let sector = &b.sectors()[s];
        if sector.locus.len() == 1 && sector.ring.mu() > 0 {
            // x and y are moved, each of weight 1/3
            let label = b.label(i);
            let local = b.degree(i) - rat(2, 3);
            assert!(local >= rat(0, 1), "{label}");
        }
    }
    assert_eq!(b.top_degree(), rat(2, 1));
}

#[test]
fn wrong_scalars_fail_the_certificate_with_a_witness() {
    let (a, b) = (ring("x^2 + y^6"), ring("x^2 + x*y^3 + y^6"));
    let sol = match solve_scaling_iso(&a, &b, Exec::Sequential).unwrap() {
        ScalingOutcome::Found(s) => s,
        ScalingOutcome::Infeasible(w) => panic!("{w:?}"),
    };
    assert!(sol.certificate.passed());
    assert_eq!(sol.top_constant, rat(3, 4));
    let entries: Vec<(usize, usize, Scalar)> = (0..a.mu())
        .map(|i| {
            let m = &a.basis()[i];
            (i, b.index_of(m).unwrap(), Scalar::one())
        })
        .collect();
    let naive = FrobeniusMap::diagonal(Algebra::Milnor(a.clone()), Algebra::Milnor(b.clone()), &entries).unwrap();
    let cert = verify_frobenius_iso(&naive, None, Exec::Sequential);
    assert!(!cert.passed());
    let check = cert.get("pairings").unwrap();
    assert!(!check.passed && !check.witnesses.is_empty());
    assert!(cert.get("products").unwrap().passed);
}

#[test]
fn extension_requires_an_equivariant_map() {
    let a = ring("x^2 + y^6");
    let id = FrobeniusMap::identity(Algebra::Milnor(a.clone()));
    let ext = extend_isomorphism(&id, &half("x^2 + y^6"), BModelOptions::default()).unwrap();
    assert!(ext.certificate.passed());
    assert_eq!(ext.map.source().dim(), 4);

    let b = ring("x^4 + y^4");
    let swap = FrobeniusMap::new(
        Algebra::Milnor(b.clone()),
        Algebra::Milnor(b.clone()),
        b.basis()
            .iter()
            .map(|m| {
                let t = Monomial::new([m.exp(1), m.exp(0)]);
                vec![(b.index_of(&t).unwrap(), Scalar::one())]
            })
            .collect(),
    )
    .unwrap();
    let w = parse_polynomial("x^4 + y^4", None).unwrap();
    let g = subgroup_generated(&w, &[vec![rat(1, 4), rat(3, 4)]]).unwrap();
    // the swap is a ring automorphism but does not commute with (1/4,3/4)
    let cert = verify_frobenius_iso(&swap, Some(&g), Exec::Sequential);
    assert!(!cert.passed());
    assert_eq!(cert.failed_checks(), vec!["equivariant"]);
    assert!(matches!(extend_isomorphism(&swap, &g, BModelOptions::default()), Err(Error::PreconditionFailed(_))));
}

#[test]
fn equivalence_rejects_weight_mismatch() {
    let a = parse_polynomial("x^2 + y^6", None).unwrap();
    let b = parse_polynomial("x^3 + y^3", None).unwrap();
    assert!(matches!(search_linear_equivalence(&a, &b), Err(Error::WeightMismatch(..))));
}

#[test]
fn equivalence_witness_for_cubic_pair() {
    let a = parse_polynomial("x^3 + y^3", None).unwrap();
    let b = parse_polynomial("x^2*y + x*y^2", None).unwrap();
    match search_linear_equivalence(&a, &b).unwrap() {
        EquivalenceResult::Equivalent(h) => assert!(verify_substitution(&a, &b, &h).unwrap()),
        EquivalenceResult::Inequivalent(c) => panic!("{:?}", c.groebner_basis),
    }
}

#[test]
fn extension_over_trivial_group_is_the_milnor_map() {
    let (a, b) = (ring("x^2 + x*y^3"), ring("x^2 + x*y^3 + y^6"));
    let outcome = solve_scaling_iso(&a, &b, Exec::Sequential).unwrap();
    let sol = outcome.found().unwrap();
    let ext = extend_isomorphism(&sol.map, &SymmetryGroup::trivial(2), BModelOptions::default()).unwrap();
    assert!(ext.certificate.passed());
    assert_eq!(ext.map.source().dim(), a.mu());
    assert!(ext.map.is_diagonal());
    let lhs: Vec<Scalar> = sol.map.diagonal_constants().unwrap().into_iter().map(|(_, c)| c).collect();
    let rhs: Vec<Scalar> = ext.map.diagonal_constants().unwrap().into_iter().map(|(_, c)| c).collect();
    assert_eq!(lhs, rhs);
}
