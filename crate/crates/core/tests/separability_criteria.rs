use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rotstate_core::dense::{
    alpha_functionals, invariant_operator_from, partial_transpose, projectors, realignment, trace_norm, twirl_with,
    DenseOperator, Functional, LocalState,
};
use rotstate_core::invariant::{apply_theta, max_entropy_alpha, theta_matrix, werner_alpha, AlphaVector};
use rotstate_core::separability::*;
use rotstate_core::Surd;

fn random_alpha(n: usize, r: &mut impl Rng) -> AlphaVector {
    let w: Vec<f64> = (0..n).map(|_| -r.random::<f64>().ln()).collect();
    let total: f64 = w.iter().sum();
    AlphaVector::from_f64(
        w.iter()
            .enumerate()
            .map(|(k, x)| x / total * n as f64 / ((2 * k + 1) as f64).sqrt())
            .collect(),
    )
    .unwrap()
}

fn reduced_exact(n: usize, xs: &[&str]) -> AlphaVector {
    let v: Vec<Surd> = xs.iter().map(|x| x.parse().unwrap()).collect();
    AlphaVector::from_reduced_exact(n, &v).unwrap()
}

#[test]
fn ppt_is_theta_symmetric() {
    let mut r = ChaCha8Rng::seed_from_u64(31);
    for n in 2..=6 {
        let theta = theta_matrix(n).unwrap();
        for _ in 0..300 {
            let a = random_alpha(n, &mut r);
            let img = apply_theta(&theta, &a).unwrap();
            if !img.is_state() {
                assert!(!is_ppt(&a).unwrap());
                continue;
            }
            assert_eq!(is_ppt(&a).unwrap(), is_ppt(&img).unwrap());
            if n == 4 {
                assert_eq!(
                    classify(&a) == Classification::Separable,
                    classify(&img) == Classification::Separable
                );
            }
        }
    }
}

#[test]
fn prism_vertices_swap_under_theta() {
    let theta = theta_matrix(4).unwrap();
    let pairs = [
        (["0", "0", "0"], ["1", "3/5*sqrt(3)", "sqrt(1/5)"]),
        (["0", "3/5*sqrt(3)", "0"], ["1", "0", "sqrt(1/5)"]),
        (["0", "0", "2*sqrt(1/5)"], ["0", "2/5*sqrt(3)", "2*sqrt(1/5)"]),
    ];
    for (p, q) in pairs {
        let a = reduced_exact(4, &p);
        let b = reduced_exact(4, &q);
        assert_eq!(apply_theta(&theta, &a).unwrap(), b);
        assert_eq!(classify(&a), Classification::Separable);
        assert_eq!(classify(&b), Classification::Separable);
    }
    let e = reduced_exact(4, &["2/3", "0", "0"]);
    let e2 = reduced_exact(4, &["2/3", "2/3*sqrt(3)", "0"]);
    assert_eq!(apply_theta(&theta, &e).unwrap(), e2);
    assert_eq!(classify(&e2), Classification::BoundEntangledPpt);
}

#[test]
fn separable_implies_necessary_criteria() {
    let mut r = ChaCha8Rng::seed_from_u64(37);
    let mut separable = 0;
    for _ in 0..10_000 {
        let a = random_alpha(4, &mut r);
        if classify(&a) == Classification::Separable {
            separable += 1;
            assert!(is_ppt(&a).unwrap());
            assert!(reduction_criterion(&a));
            assert!(cross_norm(&a) <= 1.0 + 1e-12);
        }
        let ppt = is_ppt(&a).unwrap();
        assert_eq!((negativity_trace_norm(&a) - 1.0).abs() < 1e-12, ppt);
    }
    assert!(separable > 100);
}

#[test]
fn product_states_land_in_prism() {
    let mut r = ChaCha8Rng::seed_from_u64(41);
    let ps = projectors(4).unwrap();
    for _ in 0..2_000 {
        let p1 = LocalState::random(4, &mut r).unwrap();
        let p2 = LocalState::random(4, &mut r).unwrap();
        let a = alpha_functionals(&p1, &p2, Functional::Tensor).unwrap();
        assert!(a.values()[2] >= a.values()[0] / 5f64.sqrt() - 1e-12);
        let rho = DenseOperator::pure(4, &p1.tensor(&p2)).unwrap();
        let (tw, _) = twirl_with(&rho, &ps).unwrap();
        assert_eq!(classify(&tw), Classification::Separable);
        assert!(phi_map_check(&rho).unwrap());
    }
}

#[test]
fn phi_map_detects_bound_entanglement() {
    let ps = projectors(4).unwrap();
    let e = reduced_exact(4, &["2/3", "0", "0"]);
    let rho = invariant_operator_from(&e, &ps);
    assert!(!phi_map_check(&rho).unwrap());
    let id = DenseOperator::identity(4).unwrap();
    assert!(phi_map(&id).unwrap().is_hermitian(1e-14));
    assert!(phi_map_check(&DenseOperator::identity(3).unwrap()).is_err());
}

#[test]
fn phi_map_agrees_with_prism_on_ppt_states() {
    let mut r = ChaCha8Rng::seed_from_u64(43);
    let ps = projectors(4).unwrap();
    let mut checked = 0;
    for _ in 0..3_000 {
        let a = random_alpha(4, &mut r);
        if !is_ppt(&a).unwrap() {
            continue;
        }
        let gap = witness_expectation(&a).unwrap();
        if gap.abs() < 1e-9 {
            continue;
        }
        let rho = invariant_operator_from(&a, &ps);
        assert_eq!(phi_map_check(&rho).unwrap(), gap > 0.0, "α = {:?}", a.values());
        checked += 1;
    }
    assert!(checked > 200);
}

#[test]
fn negativity_matches_dense_trace_norm() {
    let mut r = ChaCha8Rng::seed_from_u64(47);
    for n in 2..=5 {
        let ps = projectors(n).unwrap();
        for _ in 0..100 {
            let a = random_alpha(n, &mut r);
            let rho = invariant_operator_from(&a, &ps);
            let dense = partial_transpose(&rho).trace_norm();
            assert!((negativity_trace_norm(&a) - dense).abs() < 1e-11);
            let realigned = trace_norm(&realignment(&rho));
            assert!((cross_norm(&a) - realigned).abs() < 1e-10);
        }
    }
}

#[test]
fn werner_cross_norm_matches_realignment() {
    for n in 2..=5 {
        let ps = projectors(n).unwrap();
        for lambda in [-1.0, -0.2, 0.0, 0.6, 1.0] {
            let w = werner_alpha(n, lambda).unwrap();
            let rho = invariant_operator_from(&w, &ps);
            assert!((cross_norm(&w) - trace_norm(&realignment(&rho))).abs() < 1e-10);
        }
        let me = max_entropy_alpha(n).unwrap();
        assert!((cross_norm(&me) - 1.0 / n as f64).abs() < 1e-14);
    }
}

#[test]
fn reduction_is_weaker_than_ppt() {
    let a = reduction_not_ppt_example();
    assert!(a.is_state());
    assert!(reduction_criterion(&a));
    assert!(!is_ppt(&a).unwrap());
    // the search that produced it
    let mut r = ChaCha8Rng::seed_from_u64(2024);
    random_alpha(4, &mut r);
    assert_eq!(random_alpha(4, &mut r).values(), &REDUCTION_NOT_PPT_N4);
}

#[test]
fn exact_boundaries_resolve_to_closed_side() {
    // on the prism face α₂ = α₀/√5
    let face = reduced_exact(4, &["1/2", "0", "1/2*sqrt(1/5)"]);
    assert_eq!(witness_expectation_exact(&face).unwrap().unwrap(), Surd::zero());
    assert_eq!(classify(&face), Classification::Separable);
    let n2_edge = reduced_exact(2, &["1"]);
    assert_eq!(classify(&n2_edge), Classification::Separable);
    let n2_out = reduced_exact(2, &["1001/1000"]);
    assert_eq!(classify(&n2_out), Classification::NptEntangled);
}

proptest! {
    #[test]
    fn report_is_consistent(seed in any::<u64>(), n in 2usize..=6) {
        let mut r = ChaCha8Rng::seed_from_u64(seed);
        let a = random_alpha(n, &mut r);
        let rep = criteria_report(&a).unwrap();
        prop_assert_eq!(rep.ppt, is_ppt(&a).unwrap());
        prop_assert!(rep.negativity_trace_norm >= 1.0 - 1e-12);
        prop_assert!(rep.cross_norm >= 0.0);
        if rep.classification == Classification::Separable {
            prop_assert!(rep.ppt && rep.reduction_ok && rep.cross_norm_ok);
        }
        prop_assert_eq!(rep.prism_inequality.is_some(), n == 4);
    }
}
