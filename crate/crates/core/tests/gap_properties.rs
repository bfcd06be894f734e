mod common;

use common::{gap_identities, random_subspace, subspace_pair};
use proptest::prelude::*;
use schurlab::gaps::{gap, projector, semigap, Subspace};
use schurlab::lab::{ginibre, rng_from_seed};
use schurlab::{kernel_semigap_ratio, operator_norm, CMatrix};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn identities_hold(seed in any::<u64>()) {
        let (m, n, mode) = subspace_pair(8, seed);
        let r = gap_identities(&m, &n, &mut rng_from_seed(!seed));
        prop_assert!(r.is_ok(), "mode {}: {}", mode, r.unwrap_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gap_is_a_metric(seed in any::<u64>(), k in 0usize..=6) {
        let mut rng = rng_from_seed(seed);
        let a = random_subspace(6, k, &mut rng);
        let b = random_subspace(6, k, &mut rng);
        let c = random_subspace(6, k, &mut rng);
        prop_assert!(gap(&a, &a).unwrap() <= 1e-14);
        prop_assert!((gap(&a, &b).unwrap() - gap(&b, &a).unwrap()).abs() <= 1e-14);
        prop_assert!(gap(&a, &c).unwrap() <= gap(&a, &b).unwrap() + gap(&b, &c).unwrap() + 1e-12);
    }

    #[test]
    fn projectors_are_orthogonal(seed in any::<u64>(), k in 0usize..=6) {
        let s = random_subspace(6, k, &mut rng_from_seed(seed));
        let p = projector(&s).matrix;
        prop_assert!((&p.matmul(&p) - &p).max_abs() <= 1e-14);
        prop_assert!((&p.adjoint() - &p).max_abs() <= 1e-15);
        let tr: f64 = p.diagonal().iter().map(|z| z.re).sum();
        prop_assert!((tr - k as f64).abs() <= 1e-12);
    }

    #[test]
    fn semigap_matches_sup_definition(seed in any::<u64>(), k in 1usize..=4, j in 1usize..=4) {
        // sampled unit vectors of M never exceed the semigap, and the top
        // right singular direction attains it
        let mut rng = rng_from_seed(seed);
        let m = random_subspace(6, k, &mut rng);
        let n = random_subspace(6, j, &mut rng);
        let sg = semigap(&m, &n).unwrap();
        for _ in 0..16 {
            let coeff: CMatrix = ginibre(k, 1, &mut rng);
            let x = schurlab::normalized(&m.basis().mul_vec(&coeff.column(0))).unwrap();
            let d = schurlab::vec_norm(&schurlab::vec_sub(&x, &n.project(&x)));
            prop_assert!(d <= sg + 1e-12);
        }
        let resid = m.basis() - &n.basis().matmul(&n.basis().adjoint().matmul(m.basis()));
        prop_assert!((operator_norm(&resid).unwrap().min(1.0) - sg).abs() <= 1e-14);
    }

    #[test]
    fn kernel_semigap_is_lipschitz(seed in any::<u64>(), delta_exp in 2i32..=6) {
        // x ∈ ker A, ‖x‖ = 1 gives σ_r(A₀)·dist(x, ker A₀) ≤ ‖A₀x‖ = ‖(A₀ − A)x‖,
        // so the ratio never exceeds 1/σ_r(A₀)
        let mut rng = rng_from_seed(seed);
        let l: CMatrix = ginibre(4, 2, &mut rng);
        let r: CMatrix = ginibre(2, 4, &mut rng);
        let a0 = l.matmul(&r);
        let delta = 10f64.powi(-delta_exp);
        let dr: CMatrix = ginibre(2, 4, &mut rng);
        let a = l.matmul(&(&r + &dr.scale_real(delta)));
        let kr = kernel_semigap_ratio(&a0, &a, 1e-8).unwrap();
        let sigma_r = schurlab::singular_values(&a0).unwrap()[1];
        prop_assert!(kr.semigap <= 1e-12 + kr.norm_diff / sigma_r);
        prop_assert!(kr.ratio <= (1.0 + 1e-6) / sigma_r);
        prop_assert!(kr.semigap > 0.0);
    }
}

#[test]
fn nested_subspaces_have_zero_semigap() {
    let mut rng = rng_from_seed(4);
    let big = random_subspace(8, 5, &mut rng);
    let small = Subspace::span(8, &big.vectors()[..2]).unwrap();
    assert!(semigap(&small, &big).unwrap() <= 1e-14);
    assert!((semigap(&big, &small).unwrap() - 1.0).abs() <= 1e-12);
}
