//! Forward instability: perturbations that bridge two Jordan chains, and a
//! lower bound on how far every Schur factorization of `A` stays from a given
//! factorization of `A₀`.

use num_complex::Complex;
use serde::Serialize;

use crate::eigen::{default_tol, eigenspaces, residual, DEFAULT_CLUSTER_TOL};
use crate::error::{LabError, Result};
use crate::linalg::basis::orthonormality_defect;
use crate::linalg::{inverse, operator_norm, vec_norm, vec_sub, ComplexMatrix};
use crate::scalar::{cplx, Real};

/// Slack subtracted from the computed distance to certify the bound.
pub const BOUND_SLACK: f64 = 1e-8;
const FACTOR_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct ForwardDemo<T: Real> {
    pub a0: ComplexMatrix<T>,
    pub a: ComplexMatrix<T>,
    /// `P₀e_{j+1}`, normalised: an eigenvector of `A₀` but not of `A`
    pub u1: Vec<Complex<T>>,
    /// `‖A u₁ − λ u₁‖`
    pub residual: T,
}

/// `A = P₀(J₀ + J_ε)P₀⁻¹` where `J_ε` holds `ε/(‖P₀‖‖P₀⁻¹‖)` at the 1-based
/// position `(j, j+1)`, joining the chain ending at `j` to the one starting at `j+1`.
pub fn forward_demo_perturb<T: Real>(
    p0: &ComplexMatrix<T>,
    j0: &ComplexMatrix<T>,
    j_index: usize,
    epsilon: T,
) -> Result<ForwardDemo<T>> {
    let n = j0.rows();
    if !j0.is_square() || p0.rows() != n || p0.cols() != n {
        return Err(LabError::dims(format!("{n}x{n} P₀"), format!("{}x{}", p0.rows(), p0.cols())));
    }
    if !(epsilon >= T::zero()) || !epsilon.is_finite() {
        return Err(LabError::invalid("ε must be finite and non-negative"));
    }
    if j_index == 0 || j_index >= n {
        return Err(LabError::invalid(format!("bridge position {j_index} outside 1..{}", n - 1)));
    }
    let (r, c) = (j_index - 1, j_index);
    let tol = T::lit(1e-12) * j0.max_abs().max(T::one());
    if j0[(r, c)].norm() > tol || (j0[(r, r)] - j0[(c, c)]).norm() > tol {
        return Err(LabError::invalid(format!(
            "J₀ has no second Jordan block of the same eigenvalue starting at position {}",
            j_index + 1
        )));
    }
    let p0_inv = inverse(p0)?;
    let kappa = operator_norm(p0)? * operator_norm(&p0_inv)?;
    let mut je = ComplexMatrix::zeros(n, n);
    je[(r, c)] = cplx(epsilon / kappa, T::zero());
    let a0 = p0.matmul(j0).matmul(&p0_inv);
    let a = p0.matmul(&(j0 + &je)).matmul(&p0_inv);
    let x = p0.column(c);
    let nx = vec_norm(&x);
    let u1: Vec<Complex<T>> = x.iter().map(|z| z.unscale(nx)).collect();
    let res = residual(&a, j0[(c, c)], &u1);
    if epsilon > T::zero() && res == T::zero() {
        return Err(LabError::numeric("bridged vector is still an eigenvector", 0.0));
    }
    Ok(ForwardDemo { a0, a, u1, residual: res })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ForwardBound {
    /// `min ‖u₀e₁ − v‖` over unit eigenvectors `v` of `A`
    pub distance: f64,
    /// `max(0, distance − 1e-8)`
    pub bound: f64,
    /// the same minimum over sampled phases of the computed basis vectors, if requested
    pub sampled: Option<f64>,
    /// some eigenvalue cluster of `A` is defective
    pub uncertain: bool,
}

/// Lower bound on `‖U − U₀‖` over all Schur factorizations `A = UTU*`: the first
/// column of `U` is a unit eigenvector of `A`, so `‖U − U₀‖ ≥ ‖u₀e₁ − v‖` for some
/// eigenvector `v`. Within an eigenspace `Q` the minimum over unit vectors and
/// phases is attained at `v = P_Q u/‖P_Q u‖`.
pub fn forward_gap_lower_bound<T: Real>(
    a0: &ComplexMatrix<T>,
    u0: &ComplexMatrix<T>,
    t0: &ComplexMatrix<T>,
    a: &ComplexMatrix<T>,
    phase_samples: usize,
) -> Result<ForwardBound> {
    let n = a0.rows();
    for (name, m) in [("U₀", u0), ("T₀", t0), ("A", a)] {
        if m.rows() != n || m.cols() != n {
            return Err(LabError::dims(format!("{name} of order {n}"), format!("{}x{}", m.rows(), m.cols())));
        }
    }
    if n == 0 {
        return Err(LabError::invalid("empty matrices"));
    }
    let scale = operator_norm(a0)?.max(T::one());
    let tol = T::tol(FACTOR_TOL) * scale;
    if orthonormality_defect(u0) > T::tol(FACTOR_TOL) || t0.max_below_diagonal() > tol {
        return Err(LabError::invalid("(U₀, T₀) is not a unitary/upper-triangular pair"));
    }
    if operator_norm(&(&u0.matmul(t0).matmul(&u0.adjoint()) - a0))? > tol {
        return Err(LabError::invalid("U₀T₀U₀* does not reproduce A₀"));
    }
    let u = u0.column(0);
    let a_scale = operator_norm(a)?.max(T::one());
    let spaces = eigenspaces(a, default_tol(a)?, T::tol(DEFAULT_CLUSTER_TOL) * a_scale)?;
    let mut best = T::infinity();
    let mut sampled: Option<T> = None;
    let mut uncertain = false;
    for s in &spaces {
        if s.basis.len() < s.multiplicity {
            uncertain = true;
        }
        let mut pu = vec![Complex::new(T::zero(), T::zero()); n];
        for q in &s.basis {
            let c = crate::linalg::dot(q, &u);
            for (x, y) in pu.iter_mut().zip(q) {
                *x = *x + c * *y;
            }
        }
        let p = vec_norm(&pu);
        let off = vec_norm(&vec_sub(&u, &pu));
        let d = (off * off + (T::one() - p) * (T::one() - p)).sqrt();
        best = best.min(d);
        if phase_samples > 0 {
            for q in &s.basis {
                for k in 0..phase_samples {
                    let th = T::lit(std::f64::consts::TAU * k as f64 / phase_samples as f64);
                    let phi = Complex::from_polar(T::one(), th);
                    let v: Vec<Complex<T>> = q.iter().map(|z| *z * phi).collect();
                    let d = vec_norm(&vec_sub(&u, &v));
                    sampled = Some(sampled.map_or(d, |m| m.min(d)));
                }
            }
        }
    }
    let distance = best.as_f64();
    Ok(ForwardBound {
        distance,
        bound: (distance - BOUND_SLACK).max(0.0),
        sampled: sampled.map(|s| s.as_f64()),
        uncertain,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jordan::jordan_matrix;
    use crate::lab::sampler::{rng_from_seed, well_conditioned};
    use crate::scalar::czero;

    type M = ComplexMatrix<f64>;

    fn j21() -> M {
        jordan_matrix(&[(czero(), 2), (czero(), 1)])
    }

    #[test]
    fn bridge_on_identity() {
        let d = forward_demo_perturb(&M::identity(3), &j21(), 2, 1e-3).unwrap();
        let want = M::from_real_rows(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1e-3], &[0.0, 0.0, 0.0]]);
        assert!((&d.a - &want).max_abs() < 1e-18);
        assert!(d.residual > 0.0);
        assert_eq!(d.u1, crate::linalg::unit_vector(3, 2));
    }

    #[test]
    fn zero_epsilon_is_identity_map() {
        let d = forward_demo_perturb(&M::identity(3), &j21(), 2, 0.0).unwrap();
        assert_eq!(d.a, d.a0);
    }

    #[test]
    fn single_block_rejected() {
        let j = jordan_matrix(&[(czero(), 3)]);
        assert!(forward_demo_perturb(&M::identity(3), &j, 1, 1e-3).is_err());
        assert!(forward_demo_perturb(&M::identity(3), &j, 3, 1e-3).is_err());
    }

    #[test]
    fn conditioned_similarity_stays_within_epsilon() {
        let p0: M = well_conditioned(3, 10.0, &mut rng_from_seed(11));
        let one = cplx(1.0, 0.0);
        let j0 = jordan_matrix(&[(one, 1), (one, 1), (cplx(3.0, 0.0), 1)]);
        let eps = 1e-3;
        let d = forward_demo_perturb(&p0, &j0, 1, eps).unwrap();
        assert!(operator_norm(&(&d.a - &d.a0)).unwrap() <= eps * (1.0 + 1e-12));
    }

    #[test]
    fn bound_for_sheared_identity() {
        let a0 = M::identity(2).scale_real(2.0);
        for eps in [1e-2, 1e-5, 1e-8] {
            let a = M::from_real_rows(&[&[2.0, 0.0], &[eps, 2.0]]);
            let b = forward_gap_lower_bound(&a0, &M::identity(2), &a0, &a, 16).unwrap();
            assert!((b.distance - 2f64.sqrt()).abs() < 1e-12);
            assert!(b.bound >= 1.0);
            assert!(b.sampled.unwrap() >= b.distance - 1e-12);
            assert!(b.uncertain);
        }
    }

    #[test]
    fn bound_vanishes_without_perturbation() {
        let a0 = M::from_real_rows(&[&[1.0, 2.0], &[0.0, 3.0]]);
        let b = forward_gap_lower_bound(&a0, &M::identity(2), &a0, &a0, 0).unwrap();
        assert!(b.distance < 1e-12);
        assert_eq!(b.bound, 0.0);
    }

    #[test]
    fn bound_for_bridged_chain() {
        let d = forward_demo_perturb(&M::identity(3), &j21(), 2, 1e-3).unwrap();
        let e = |k| crate::linalg::unit_vector::<f64>(3, k);
        let u0 = M::from_columns(3, &[e(2), e(0), e(1)]);
        let t0 = u0.adjoint().matmul(&d.a0).matmul(&u0);
        let b = forward_gap_lower_bound(&d.a0, &u0, &t0, &d.a, 0).unwrap();
        assert!((b.distance - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_factorization() {
        let a0 = M::identity(2);
        let t0 = M::from_real_rows(&[&[1.0, 0.0], &[1.0, 1.0]]);
        assert!(forward_gap_lower_bound(&a0, &M::identity(2), &t0, &a0, 0).is_err());
    }
}
