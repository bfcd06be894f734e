use proptest::prelude::*;
use schurlab::lab::{ginibre, haar_unitary, rng_from_seed};
use schurlab::linalg::basis::orthonormality_defect;
use schurlab::{
    gram_schmidt, inverse, operator_norm, orthonormal_extend, singular_values, svd, CMatrix, Lu,
};

fn sample(rows: usize, cols: usize, seed: u64) -> CMatrix {
    ginibre(rows, cols, &mut rng_from_seed(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn norm_axioms(n in 1usize..8, seed in any::<u64>(), s in -3.0f64..3.0) {
        let a = sample(n, n, seed);
        let b = sample(n, n, seed ^ 1);
        let na = operator_norm(&a).unwrap();
        let nb = operator_norm(&b).unwrap();
        prop_assert!(na > 0.0);
        prop_assert!(operator_norm(&(&a + &b)).unwrap() <= na + nb + 1e-12);
        prop_assert!((operator_norm(&a.scale_real(s)).unwrap() - s.abs() * na).abs() <= 1e-12 * na.max(1.0));
        prop_assert!(operator_norm(&a.matmul(&b)).unwrap() <= na * nb * (1.0 + 1e-12));
        prop_assert!((operator_norm(&a.adjoint()).unwrap() - na).abs() <= 1e-12 * na);
        prop_assert!(na <= a.frobenius_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn unitary_invariance(n in 1usize..8, seed in any::<u64>()) {
        let a = sample(n, n, seed);
        let mut rng = rng_from_seed(seed ^ 2);
        let u: CMatrix = haar_unitary(n, &mut rng);
        let v: CMatrix = haar_unitary(n, &mut rng);
        let na = operator_norm(&a).unwrap();
        let nb = operator_norm(&u.matmul(&a).matmul(&v)).unwrap();
        prop_assert!((na - nb).abs() <= 1e-12 * na);
        prop_assert!((operator_norm(&u).unwrap() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn svd_reconstructs(r in 1usize..9, c in 1usize..9, seed in any::<u64>()) {
        let a = sample(r, c, seed);
        let s = svd(&a).unwrap();
        prop_assert!((&s.reconstruct() - &a).max_abs() <= 1e-12 * a.max_abs().max(1.0));
        prop_assert!(orthonormality_defect(&s.left) <= 1e-12);
        prop_assert!(orthonormality_defect(&s.right) <= 1e-12);
        prop_assert!(s.singular_values.windows(2).all(|w| w[0] >= w[1]));
        // Σσ² = ‖A‖_F²
        let ss: f64 = s.singular_values.iter().map(|x| x * x).sum();
        prop_assert!((ss.sqrt() - a.frobenius_norm()).abs() <= 1e-12 * a.frobenius_norm());
    }

    #[test]
    fn low_rank_products(n in 2usize..9, k in 1usize..4, seed in any::<u64>()) {
        let k = k.min(n - 1);
        let a = sample(n, k, seed).matmul(&sample(k, n, seed ^ 3));
        prop_assert_eq!(schurlab::rank_with_tol(&a, 1e-8).unwrap(), k);
        let ker = schurlab::null_space(&a, 1e-8).unwrap();
        prop_assert_eq!(ker.cols(), n - k);
        prop_assert!(a.matmul(&ker).max_abs() <= 1e-10 * operator_norm(&a).unwrap());
    }

    #[test]
    fn lu_solves(n in 1usize..9, seed in any::<u64>()) {
        let a = sample(n, n, seed);
        let x = sample(n, 1, seed ^ 4).column(0);
        let b = a.mul_vec(&x);
        let lu = Lu::factor(&a).unwrap();
        let y = lu.solve(&b).unwrap();
        let cond = operator_norm(&a).unwrap() * operator_norm(&inverse(&a).unwrap()).unwrap();
        let err = schurlab::vec_norm(&schurlab::vec_sub(&x, &y)) / schurlab::vec_norm(&x);
        prop_assert!(err <= 1e-13 * cond.max(1.0) * n as f64);
    }

    #[test]
    fn extension_is_unitary(n in 1usize..9, k in 0usize..9, seed in any::<u64>()) {
        let k = k.min(n);
        let g = sample(n, k, seed);
        let q = gram_schmidt(&(0..k).map(|j| g.column(j)).collect::<Vec<_>>());
        let full = orthonormal_extend(&q, n).unwrap();
        prop_assert!(orthonormality_defect(&full) <= 1e-12);
        for (j, v) in q.iter().enumerate() {
            prop_assert!(schurlab::vec_norm(&schurlab::vec_sub(v, &full.column(j))) <= 1e-14);
        }
    }
}

#[test]
fn singular_values_of_diagonal() {
    let d = CMatrix::from_real_rows(&[&[3.0, 0.0, 0.0], &[0.0, -5.0, 0.0], &[0.0, 0.0, 1e-12]]);
    let s = singular_values(&d).unwrap();
    assert_eq!(s, vec![5.0, 3.0, 1e-12]);
}
