//! Schur decomposition by repeated Hessenberg deflation.
//!
//! At step `k` an eigenvector `x` of the active trailing block is turned into
//! the lower unitary Hessenberg matrix `Hₖ` with first column `x`; conjugating
//! by `I_k ⊕ Hₖ` leaves the eigenvalue in position `(k, k)` and zeros beneath
//! it. The unitary factor is the product of the chain of `Hₖ`.

use num_complex::Complex;

use crate::eigen::{eigenvalues, inverse_iteration, normalize_phase, residual, DEFAULT_CLUSTER_TOL, DEFAULT_EIGEN_TOL};
use crate::error::{LabError, Result};
use crate::hessenberg::{hessenberg_for_direction, HessenbergChain};
use crate::lab::matching::match_eigenvalues;
use crate::linalg::{operator_norm, svd, vec_norm, ComplexMatrix};
use crate::scalar::{czero, Real};

/// Residual bound for a successful decomposition: `1e-8·max(1, ‖A‖)`.
pub const SCHUR_RESIDUAL_TOL: f64 = 1e-8;

/// Which eigenvalue to deflate first at every step.
#[derive(Clone, Debug, PartialEq, Default)]
pub enum EigenOrder<T> {
    /// Largest modulus first (ties: larger real part, then larger imaginary part).
    #[default]
    DescendingModulus,
    /// Keep the leading diagonal entry whenever `e₁` is already an eigenvector.
    FirstDiagonal,
    /// Produce a diagonal matched to these values (length `n`).
    MatchTarget(Vec<Complex<T>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchurForm<T: Real> {
    pub u: ComplexMatrix<T>,
    pub t: ComplexMatrix<T>,
    pub chain: HessenbergChain<T>,
    pub residual: T,
}

impl<T: Real> SchurForm<T> {
    pub fn dim(&self) -> usize {
        self.u.rows()
    }

    pub fn diagonal(&self) -> Vec<Complex<T>> {
        self.t.diagonal()
    }
}

struct Deflator<T: Real> {
    tol: T,
    cluster_tol: T,
    order: EigenOrder<T>,
    desired: Vec<Complex<T>>,
}

impl<T: Real> Deflator<T> {
    fn new(a: &ComplexMatrix<T>, order: &EigenOrder<T>) -> Result<Self> {
        let scale = operator_norm(a)?.max(T::one());
        let mut desired = Vec::new();
        if let EigenOrder::MatchTarget(target) = order {
            if target.len() != a.rows() {
                return Err(LabError::dims(
                    format!("{} target eigenvalues", a.rows()),
                    format!("{}", target.len()),
                ));
            }
            let ev = eigenvalues(a)?;
            let m = match_eigenvalues(target, &ev)?;
            desired = m.permutation.iter().map(|&j| ev[j]).collect();
        }
        Ok(Deflator {
            tol: T::tol(DEFAULT_EIGEN_TOL) * scale,
            cluster_tol: T::tol(DEFAULT_CLUSTER_TOL) * scale,
            order: order.clone(),
            desired,
        })
    }

    /// Eigenvalue to deflate from the active block at step `k`.
    fn choose(&self, active: &ComplexMatrix<T>, k: usize) -> Result<Complex<T>> {
        let ev = eigenvalues(active)?;
        Ok(match &self.order {
            EigenOrder::DescendingModulus => ev[0],
            EigenOrder::FirstDiagonal => nearest(&ev, active[(0, 0)]),
            EigenOrder::MatchTarget(_) => nearest(&ev, self.desired[k]),
        })
    }

    /// Unit eigenvector of `active` for `lambda`; `e₁` when it already qualifies.
    fn vector(&self, active: &ComplexMatrix<T>, lambda: Complex<T>) -> Result<Vec<Complex<T>>> {
        let m = active.rows();
        let head = active[(0, 0)];
        let below = vec_norm(&active.column(0)[1..]);
        if below <= self.tol && (head - lambda).norm() <= self.cluster_tol {
            return Ok(crate::linalg::unit_vector(m, 0));
        }
        // inverse iteration loses accuracy on defective eigenvalues, where the
        // smallest right singular vector is exact; keep the better of the two
        let (v, r) = inverse_iteration(active, lambda, &[], self.tol)?;
        let w = svd(&active.shifted(lambda))?.right.column(m - 1);
        let mut out = if residual(active, lambda, &w) <= r { w } else { v };
        normalize_phase(&mut out);
        Ok(out)
    }
}

fn nearest<T: Real>(values: &[Complex<T>], target: Complex<T>) -> Complex<T> {
    let mut best = values[0];
    for v in &values[1..] {
        if (*v - target).norm() < (best - target).norm() {
            best = *v;
        }
    }
    best
}

fn deflate<T: Real>(
    a: &ComplexMatrix<T>,
    order: &EigenOrder<T>,
    first: Option<&[Complex<T>]>,
) -> Result<SchurForm<T>> {
    if !a.is_square() || a.is_empty() {
        return Err(LabError::invalid(format!(
            "Schur decomposition needs a non-empty square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(LabError::invalid("Schur decomposition: non-finite entries"));
    }
    let n = a.rows();
    let d = Deflator::new(a, order)?;
    let mut w = a.clone();
    let mut u = ComplexMatrix::identity(n);
    let mut chain = HessenbergChain::new(n);
    for k in 0..n.saturating_sub(1) {
        let m = n - k;
        let active = w.block(k, k, m, m);
        let x = match (k, first) {
            (0, Some(x)) => x.to_vec(),
            _ => {
                let lambda = d.choose(&active, k)?;
                d.vector(&active, lambda)?
            }
        };
        let h = hessenberg_for_direction(&x);
        // W[:, k:] ← W[:, k:]·H ; W[k:, :] ← H*·W[k:, :]
        let right = w.block(0, k, n, m).matmul(&h);
        w.set_block(0, k, &right);
        let left = h.adjoint().matmul(&w.block(k, 0, m, n));
        w.set_block(k, 0, &left);
        for i in (k + 1)..n {
            w[(i, k)] = czero();
        }
        let uk = u.block(0, k, n, m).matmul(&h);
        u.set_block(0, k, &uk);
        chain.push(h)?;
    }
    let residual = operator_norm(&(&u.matmul(&w).matmul(&u.adjoint()) - a))?;
    let scale = operator_norm(a)?.max(T::one());
    if residual > T::tol(SCHUR_RESIDUAL_TOL) * scale {
        return Err(LabError::numeric("Schur deflation residual", residual.as_f64()));
    }
    Ok(SchurForm { u, t: w, chain, residual })
}

/// Schur form `A = U T U*` by Hessenberg deflation.
pub fn schur_decompose<T: Real>(a: &ComplexMatrix<T>, order: &EigenOrder<T>) -> Result<SchurForm<T>> {
    deflate(a, order, None)
}

/// Schur form whose unitary factor has first column `x` (a unit eigenvector of `a`).
/// Later steps follow `order`.
pub fn schur_with_first_vector<T: Real>(
    a: &ComplexMatrix<T>,
    x: &[Complex<T>],
    order: &EigenOrder<T>,
) -> Result<SchurForm<T>> {
    if x.len() != a.rows() {
        return Err(LabError::dims(format!("vector of length {}", a.rows()), format!("length {}", x.len())));
    }
    let nx = vec_norm(x);
    if (nx - T::one()).abs() > T::lit(1e-10) {
        return Err(LabError::invalid(format!("first Schur vector has norm {nx}")));
    }
    let scale = operator_norm(a)?.max(T::one());
    let lambda = crate::linalg::dot(x, &a.mul_vec(x));
    let r = residual(a, lambda, x);
    if r > T::tol(DEFAULT_EIGEN_TOL) * scale {
        return Err(LabError::invalid(format!("first Schur vector is not an eigenvector (residual {r})")));
    }
    deflate(a, order, Some(x))
}

/// `max(‖UTU* − A‖, ‖U*U − I‖, largest below-diagonal |T|)`.
pub fn verify_schur<T: Real>(a: &ComplexMatrix<T>, s: &SchurForm<T>) -> T {
    let n = a.rows();
    if !a.is_square() || s.u.rows() != n || s.u.cols() != n || s.t.rows() != n || s.t.cols() != n || n == 0 {
        return T::infinity();
    }
    let rec = &s.u.matmul(&s.t).matmul(&s.u.adjoint()) - a;
    let uni = &s.u.adjoint().matmul(&s.u) - &ComplexMatrix::identity(n);
    let r1 = operator_norm(&rec).unwrap_or_else(|_| T::infinity());
    let r2 = operator_norm(&uni).unwrap_or_else(|_| T::infinity());
    r1.max(r2).max(s.t.max_below_diagonal())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    type M = ComplexMatrix<f64>;

    fn sample(n: usize) -> M {
        M::from_fn(n, n, |i, j| cplx(((3 * i + 5 * j) as f64 * 0.61).sin(), ((i * j + 1) as f64 * 0.23).cos()))
    }

    #[test]
    fn triangular_input_is_fixed() {
        let a = M::from_fn(4, 4, |i, j| if j >= i { cplx((1 + i + j) as f64, (j as f64) * 0.5) } else { czero() });
        let s = schur_decompose(&a, &EigenOrder::FirstDiagonal).unwrap();
        assert_eq!(s.u, M::identity(4));
        assert_eq!(s.t, a);
        assert_eq!(s.chain.len(), 3);
        assert!(verify_schur(&a, &s) <= 1e-12);
    }

    #[test]
    fn defective_two_by_two() {
        let eps = 1e-3;
        let a = M::from_real_rows(&[&[2.0, 0.0], &[eps, 2.0]]);
        let s = schur_decompose(&a, &EigenOrder::default()).unwrap();
        for (i, j) in [(0, 1), (1, 0)] {
            assert!((s.u[(i, j)].norm() - 1.0).abs() < 1e-12);
        }
        assert!((s.t[(0, 1)].norm() - eps).abs() < 1e-15);
        assert!((s.t[(0, 0)] - cplx(2.0, 0.0)).norm() < 1e-12);
        assert!((s.t[(1, 1)] - cplx(2.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn random_eight_by_eight() {
        let a = sample(8);
        let s = schur_decompose(&a, &EigenOrder::default()).unwrap();
        assert!(s.residual <= 1e-8);
        assert!(verify_schur(&a, &s) <= 1e-8);
        assert!((&s.chain.product() - &s.u).max_abs() <= 1e-9);
        assert_eq!(s.t.max_below_diagonal(), 0.0);
        let d = s.diagonal();
        assert!(d.windows(2).all(|w| w[0].norm() >= w[1].norm() - 1e-9));
    }

    #[test]
    fn one_by_one_has_empty_chain() {
        let a = M::from_real_rows(&[&[5.0]]);
        let s = schur_decompose(&a, &EigenOrder::default()).unwrap();
        assert!(s.chain.is_empty());
        assert_eq!(s.u, M::identity(1));
    }

    #[test]
    fn match_target_orders_diagonal() {
        let a = M::from_diag(&[cplx(3.0, 0.0), cplx(1.0, 0.0), cplx(2.0, 0.0)]);
        let target = vec![cplx(1.0, 0.0), cplx(2.0, 0.0), cplx(3.0, 0.0)];
        let s = schur_decompose(&a, &EigenOrder::MatchTarget(target.clone())).unwrap();
        for (d, t) in s.diagonal().iter().zip(&target) {
            assert!((*d - *t).norm() < 1e-12);
        }
    }

    #[test]
    fn first_vector_is_respected() {
        let a = M::from_diag(&[cplx(2.0, 0.0), cplx(2.0, 0.0)]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let x = vec![cplx(s, 0.0), cplx(0.0, s)];
        let f = schur_with_first_vector(&a, &x, &EigenOrder::default()).unwrap();
        assert!((vec_norm(&crate::linalg::vec_sub(&f.u.column(0), &x))) < 1e-15);
        assert!(schur_with_first_vector(&a, &[cplx(1.0, 0.0)], &EigenOrder::default()).is_err());
    }

    #[test]
    fn verify_detects_defects() {
        let a = sample(3);
        let mut s = schur_decompose(&a, &EigenOrder::default()).unwrap();
        s.u[(0, 0)] = s.u[(0, 0)] + cplx(1e-3, 0.0);
        assert!(verify_schur(&a, &s) >= 0.5e-3);
        let mut s = schur_decompose(&a, &EigenOrder::default()).unwrap();
        s.t[(2, 0)] = cplx(1e-4, 0.0);
        assert!(verify_schur(&a, &s) >= 1e-4);
    }

    #[test]
    fn determinism() {
        let a = sample(6);
        let s1 = schur_decompose(&a, &EigenOrder::default()).unwrap();
        let s2 = schur_decompose(&a, &EigenOrder::default()).unwrap();
        assert_eq!(s1, s2);
    }
}
