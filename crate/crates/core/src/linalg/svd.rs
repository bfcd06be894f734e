//! One-sided (Hestenes) Jacobi SVD for dense complex matrices.
//!
//! Columns are rotated pairwise until they are mutually orthogonal; the column
//! norms are then the singular values and the accumulated rotations form the
//! right singular vectors. Accurate for the small matrices this crate targets
//! (n ≤ 64), including tiny singular values that decide numerical rank.

use num_complex::Complex;

use super::basis::complete_basis;
use super::matrix::{dot, vec_norm, ComplexMatrix};
use crate::error::{LabError, Result};
use crate::scalar::{cone, czero, Real};

/// Sweep cap for the Jacobi iteration.
pub const MAX_SWEEPS: usize = 60;

/// Relative rank tolerance used when callers do not supply one.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

#[derive(Clone)]
pub struct SvdResult<T: Real> {
    /// `rows × rows` unitary.
    pub left: ComplexMatrix<T>,
    /// `min(rows, cols)` values, non-increasing.
    pub singular_values: Vec<T>,
    /// `cols × cols` unitary.
    pub right: ComplexMatrix<T>,
}

impl<T: Real> std::fmt::Debug for SvdResult<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SvdResult")
            .field("singular_values", &self.singular_values)
            .finish_non_exhaustive()
    }
}

impl<T: Real> SvdResult<T> {
    /// `left · diag(σ) · right*`.
    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        let m = self.left.rows();
        let n = self.right.rows();
        let mut us = ComplexMatrix::zeros(m, n);
        for (k, s) in self.singular_values.iter().enumerate() {
            for i in 0..m {
                us[(i, k)] = self.left[(i, k)].scale(*s);
            }
        }
        us.matmul(&self.right.adjoint())
    }

    pub fn largest(&self) -> T {
        self.singular_values.first().copied().unwrap_or_else(T::zero)
    }

    /// Threshold `tol · max(1, σ₁)` shared by rank, kernel and range routines.
    pub fn threshold(&self, tol: T) -> T {
        tol * self.largest().max(T::one())
    }

    pub fn rank(&self, tol: T) -> usize {
        let thr = self.threshold(tol);
        self.singular_values.iter().filter(|s| **s > thr).count()
    }

    /// True when some singular value sits within a factor 10 of the rank threshold.
    pub fn rank_is_ambiguous(&self, tol: T) -> bool {
        let thr = self.threshold(tol);
        let ten = T::lit(10.0);
        self.singular_values
            .iter()
            .any(|s| *s > thr / ten && *s <= thr * ten)
    }

    /// Orthonormal basis of the kernel (columns of `right` beyond the numerical rank).
    pub fn kernel(&self, tol: T) -> ComplexMatrix<T> {
        let r = self.rank(tol);
        let n = self.right.cols();
        self.right.columns(r..n)
    }

    /// Orthonormal basis of the range (leading columns of `left`).
    pub fn range(&self, tol: T) -> ComplexMatrix<T> {
        let r = self.rank(tol);
        self.left.columns(0..r)
    }
}

struct Jacobi<T> {
    cols: Vec<Vec<Complex<T>>>,
    v: Option<Vec<Vec<Complex<T>>>>,
}

fn jacobi<T: Real>(a: &ComplexMatrix<T>, want_vectors: bool) -> Result<Jacobi<T>> {
    let n = a.cols();
    let mut cols: Vec<Vec<Complex<T>>> = (0..n).map(|j| a.column(j)).collect();
    let mut v: Option<Vec<Vec<Complex<T>>>> = want_vectors.then(|| {
        (0..n)
            .map(|j| {
                let mut e = vec![czero(); n];
                e[j] = cone();
                e
            })
            .collect()
    });
    let eps = T::epsilon();
    let two = T::lit(2.0);
    // columns at roundoff level relative to ‖A‖_F are left alone; rotating
    // them only reshuffles noise and never settles
    let negligible = a.frobenius_norm() * a.frobenius_norm() * eps * eps;

    let mut off = T::zero();
    for _sweep in 0..MAX_SWEEPS {
        let mut rotated = false;
        off = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha = cols[p].iter().fold(T::zero(), |s, z| s + z.norm_sqr());
                let beta = cols[q].iter().fold(T::zero(), |s, z| s + z.norm_sqr());
                if alpha <= negligible || beta <= negligible {
                    continue;
                }
                let gamma = dot(&cols[p], &cols[q]);
                let g = gamma.norm();
                let scale = (alpha * beta).sqrt();
                if g == T::zero() {
                    continue;
                }
                off = off.max(g / scale);
                if g <= eps * scale {
                    continue;
                }
                rotated = true;
                let e = gamma.unscale(g);
                let zeta = (beta - alpha) / (two * g);
                let sign = if zeta >= T::zero() { T::one() } else { -T::one() };
                let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let se_conj = e.conj().scale(s);
                let se = e.scale(s);
                rotate(&mut cols, p, q, c, se, se_conj);
                if let Some(v) = v.as_mut() {
                    rotate(v, p, q, c, se, se_conj);
                }
            }
        }
        if !rotated {
            return Ok(Jacobi { cols, v });
        }
    }
    Err(LabError::numeric("one-sided Jacobi SVD", off.as_f64()))
}

#[inline]
fn rotate<T: Real>(
    cols: &mut [Vec<Complex<T>>],
    p: usize,
    q: usize,
    c: T,
    se: Complex<T>,
    se_conj: Complex<T>,
) {
    let (lo, hi) = cols.split_at_mut(q);
    let cp = &mut lo[p];
    let cq = &mut hi[0];
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let xp = *x;
        let xq = *y;
        *x = xp.scale(c) - se_conj * xq;
        *y = se * xp + xq.scale(c);
    }
}

fn sorted_order<T: Real>(norms: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..norms.len()).collect();
    idx.sort_by(|&a, &b| {
        norms[b]
            .partial_cmp(&norms[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    idx
}

fn svd_tall<T: Real>(a: &ComplexMatrix<T>) -> Result<SvdResult<T>> {
    let (m, n) = (a.rows(), a.cols());
    let jac = jacobi(a, true)?;
    let norms: Vec<T> = jac.cols.iter().map(|c| vec_norm(c)).collect();
    let order = sorted_order(&norms);
    let sigma: Vec<T> = order.iter().map(|&j| norms[j]).collect();
    let v = jac.v.expect("vectors requested");

    let smax = sigma.first().copied().unwrap_or_else(T::zero);
    let thr = smax * T::epsilon() * T::lit(m.max(n).max(1) as f64);
    let mut left_cols: Vec<Vec<Complex<T>>> = Vec::with_capacity(m);
    for (&j, &s) in order.iter().zip(&sigma) {
        if s > thr && s > T::zero() {
            left_cols.push(jac.cols[j].iter().map(|z| z.unscale(s)).collect());
        } else {
            break;
        }
    }
    let left = complete_basis(left_cols, m);
    let right_cols: Vec<Vec<Complex<T>>> = order.iter().map(|&j| v[j].clone()).collect();
    let right = ComplexMatrix::from_columns(n, &right_cols);
    Ok(SvdResult {
        left,
        singular_values: sigma,
        right,
    })
}

/// Full singular value decomposition `M = left · diag(σ) · right*`.
pub fn svd<T: Real>(m: &ComplexMatrix<T>) -> Result<SvdResult<T>> {
    if !m.is_finite() {
        return Err(LabError::invalid("svd: matrix has non-finite entries"));
    }
    if m.rows() >= m.cols() {
        svd_tall(m)
    } else {
        let s = svd_tall(&m.adjoint())?;
        Ok(SvdResult {
            left: s.right,
            singular_values: s.singular_values,
            right: s.left,
        })
    }
}

/// Singular values only, non-increasing.
pub fn singular_values<T: Real>(m: &ComplexMatrix<T>) -> Result<Vec<T>> {
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let work = if m.rows() >= m.cols() {
        m.clone()
    } else {
        m.adjoint()
    };
    let jac = jacobi(&work, false)?;
    let mut norms: Vec<T> = jac.cols.iter().map(|c| vec_norm(c)).collect();
    norms.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    Ok(norms)
}

/// Spectral (operator 2-) norm: the largest singular value.
pub fn operator_norm<T: Real>(m: &ComplexMatrix<T>) -> Result<T> {
    if m.is_empty() {
        return Err(LabError::invalid("operator norm of a dimension-0 matrix"));
    }
    if !m.is_finite() {
        return Err(LabError::invalid("operator norm: non-finite entries"));
    }
    Ok(singular_values(m)?[0])
}

/// Number of singular values above `tol · max(1, σ₁)`.
pub fn rank_with_tol<T: Real>(m: &ComplexMatrix<T>, tol: T) -> Result<usize> {
    if tol < T::zero() {
        return Err(LabError::invalid("rank tolerance must be non-negative"));
    }
    let sv = singular_values(m)?;
    let thr = tol * sv.first().copied().unwrap_or_else(T::zero).max(T::one());
    Ok(sv.iter().filter(|s| **s > thr).count())
}

/// Orthonormal kernel basis at relative tolerance `tol`.
pub fn null_space<T: Real>(m: &ComplexMatrix<T>, tol: T) -> Result<ComplexMatrix<T>> {
    Ok(svd(m)?.kernel(tol))
}

/// Orthonormal range basis at relative tolerance `tol`.
pub fn range_space<T: Real>(m: &ComplexMatrix<T>, tol: T) -> Result<ComplexMatrix<T>> {
    Ok(svd(m)?.range(tol))
}
