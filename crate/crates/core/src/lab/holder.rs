//! Eigenvalue Hölder ratios between `A₀` and a perturbation `A`.

use serde::Serialize;

use super::matching::match_eigenvalues;
use crate::eigen::{cluster_values, eigenvalues, DEFAULT_CLUSTER_TOL};
use crate::error::{LabError, Result};
use crate::linalg::{operator_norm, ComplexMatrix};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HolderRecord {
    /// bottleneck cost of the optimal eigenvalue pairing
    pub matched_dist: f64,
    pub norm_diff: f64,
    /// `matched_dist / norm_diff^{1/n}`
    pub ratio_1n: f64,
    /// `matched_dist / norm_diff`, only when both spectra have the same number of distinct values
    pub ratio_1: Option<f64>,
}

pub fn holder_ratio<T: Real>(a0: &ComplexMatrix<T>, a: &ComplexMatrix<T>) -> Result<HolderRecord> {
    holder_ratio_with(a0, a, T::lit(DEFAULT_CLUSTER_TOL))
}

pub fn holder_ratio_with<T: Real>(a0: &ComplexMatrix<T>, a: &ComplexMatrix<T>, cluster_tol: T) -> Result<HolderRecord> {
    if !a0.is_square() || a0.rows() != a.rows() || a0.cols() != a.cols() {
        return Err(LabError::dims(
            format!("square {}x{}", a0.rows(), a0.rows()),
            format!("{}x{}", a.rows(), a.cols()),
        ));
    }
    let n = a0.rows();
    let nd = operator_norm(&(a - a0))?;
    if nd == T::zero() {
        return Err(LabError::invalid("A and A₀ coincide; the ratio is undefined"));
    }
    let ev0 = eigenvalues(a0)?;
    let ev = eigenvalues(a)?;
    let m = match_eigenvalues(&ev0, &ev)?;
    let ratio_1n = m.cost / nd.powf(T::one() / T::lit(n as f64));
    let same_count = cluster_values(&ev0, cluster_tol).len() == cluster_values(&ev, cluster_tol).len();
    Ok(HolderRecord {
        matched_dist: m.cost.as_f64(),
        norm_diff: nd.as_f64(),
        ratio_1n: ratio_1n.as_f64(),
        ratio_1: same_count.then(|| (m.cost / nd).as_f64()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    type M = ComplexMatrix<f64>;

    #[test]
    fn square_root_family() {
        let a0 = M::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        for eps in [1e-2, 1e-4, 1e-6] {
            let a = M::from_real_rows(&[&[0.0, 1.0], &[eps, 0.0]]);
            let r = holder_ratio(&a0, &a).unwrap();
            assert!((r.matched_dist - eps.sqrt()).abs() <= 1e-12 * eps.sqrt());
            assert!((r.ratio_1n - 1.0).abs() < 1e-12);
            assert_eq!(r.ratio_1, None);
        }
    }

    #[test]
    fn shifted_diagonal() {
        let d = 1e-4;
        let a0 = M::from_diag(&[cplx(1.0, 0.0), cplx(2.0, 0.0)]);
        let a = &a0 + &M::identity(2).scale_real(d);
        let r = holder_ratio(&a0, &a).unwrap();
        assert!((r.matched_dist - d).abs() < 1e-15);
        assert!((r.ratio_1.unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn unitary_similarity_keeps_spectrum() {
        let a0 = M::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let q = M::from_real_rows(&[&[s, -s], &[s, s]]);
        let a = q.matmul(&a0).matmul(&q.adjoint());
        let r = holder_ratio(&a0, &a).unwrap();
        assert!(r.matched_dist < 1e-7);
    }

    #[test]
    fn equal_matrices_rejected() {
        assert!(holder_ratio(&M::identity(2), &M::identity(2)).is_err());
    }
}
