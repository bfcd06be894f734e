//! Subspaces of `ℂⁿ`, orthogonal projectors, gap and semigap.
//!
//! `gap(M, N) = ‖P_M − P_N‖` and `semigap(M, N) = ‖(I − P_N)|_M‖`, the largest
//! singular value of `(I − P_N)·B_M` for an orthonormal basis `B_M`.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::linalg::basis::{complete_basis, gram_schmidt, orthonormality_defect};
use crate::linalg::{operator_norm, svd, ComplexMatrix};
use crate::scalar::Real;

/// Orthonormality tolerance for subspace bases.
pub const BASIS_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Subspace<T: Real> {
    ambient: usize,
    basis: ComplexMatrix<T>,
}

impl<T: Real> Subspace<T> {
    /// Wraps an `ambient × k` matrix with orthonormal columns.
    pub fn new(ambient: usize, basis: ComplexMatrix<T>) -> Result<Self> {
        if ambient == 0 {
            return Err(LabError::invalid("ambient dimension must be positive"));
        }
        if basis.rows() != ambient {
            return Err(LabError::dims(format!("{ambient} rows"), format!("{} rows", basis.rows())));
        }
        if basis.cols() > ambient {
            return Err(LabError::invalid("more basis vectors than the ambient dimension"));
        }
        if !basis.is_finite() {
            return Err(LabError::invalid("subspace basis has non-finite entries"));
        }
        let d = orthonormality_defect(&basis);
        if d > T::tol(BASIS_TOL) {
            return Err(LabError::invalid(format!("subspace basis not orthonormal (defect {d})")));
        }
        Ok(Subspace { ambient, basis })
    }

    /// Span of arbitrary vectors; dependent ones are dropped.
    pub fn span(ambient: usize, vectors: &[Vec<Complex<T>>]) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != ambient) {
            return Err(LabError::dims(format!("vectors of length {ambient}"), format!("length {}", v.len())));
        }
        let q = gram_schmidt(vectors);
        Subspace::new(ambient, ComplexMatrix::from_columns(ambient, &q))
    }

    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: ComplexMatrix::zeros(ambient, 0) }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: ComplexMatrix::identity(ambient) }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &ComplexMatrix<T> {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<Vec<Complex<T>>> {
        (0..self.dim()).map(|j| self.basis.column(j)).collect()
    }

    /// `P_M x`.
    pub fn project(&self, x: &[Complex<T>]) -> Vec<Complex<T>> {
        let c = self.basis.adjoint().mul_vec(x);
        self.basis.mul_vec(&c)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Projector<T: Real> {
    pub matrix: ComplexMatrix<T>,
}

pub fn projector<T: Real>(s: &Subspace<T>) -> Projector<T> {
    Projector { matrix: s.basis.matmul(&s.basis.adjoint()) }
}

fn same_ambient<T: Real>(m: &Subspace<T>, n: &Subspace<T>) -> Result<()> {
    if m.ambient != n.ambient {
        return Err(LabError::invalid(format!(
            "subspaces live in different spaces (ℂ^{} vs ℂ^{})",
            m.ambient, n.ambient
        )));
    }
    Ok(())
}

/// `(I − P_N)·B_M`.
fn residual_block<T: Real>(m: &Subspace<T>, n: &Subspace<T>) -> ComplexMatrix<T> {
    let coeff = n.basis.adjoint().matmul(&m.basis);
    &m.basis - &n.basis.matmul(&coeff)
}

/// `‖P_M − P_N‖`, clamped to `[0, 1]`.
pub fn gap<T: Real>(m: &Subspace<T>, n: &Subspace<T>) -> Result<T> {
    same_ambient(m, n)?;
    let d = &projector(m).matrix - &projector(n).matrix;
    Ok(operator_norm(&d)?.min(T::one()))
}

/// One-sided gap: largest distance from a unit vector of `M` to `N`; 0 for `M = {0}`.
pub fn semigap<T: Real>(m: &Subspace<T>, n: &Subspace<T>) -> Result<T> {
    same_ambient(m, n)?;
    if m.dim() == 0 {
        return Ok(T::zero());
    }
    Ok(operator_norm(&residual_block(m, n))?.min(T::one()))
}

pub fn orthocomplement<T: Real>(s: &Subspace<T>) -> Subspace<T> {
    let n = s.ambient;
    let full = complete_basis(s.vectors(), n);
    Subspace { ambient: n, basis: full.columns(s.dim()..n) }
}

/// Vectors of `M` within sine-distance `tol` of `N`: the numerical `M ∩ N`.
pub fn intersect<T: Real>(m: &Subspace<T>, n: &Subspace<T>, tol: T) -> Result<Subspace<T>> {
    same_ambient(m, n)?;
    if m.dim() == 0 || n.dim() == 0 {
        return Ok(Subspace::zero(m.ambient));
    }
    let s = svd(&residual_block(m, n))?;
    let k = m.dim();
    let mut cols = Vec::new();
    for j in (0..k).rev() {
        let sigma = if j < s.singular_values.len() { s.singular_values[j] } else { T::zero() };
        if sigma > tol {
            break;
        }
        cols.push(m.basis.mul_vec(&s.right.column(j)));
    }
    Subspace::span(m.ambient, &cols)
}

/// Kernel of `a` at relative tolerance `rank_tol`.
pub fn kernel<T: Real>(a: &ComplexMatrix<T>, rank_tol: T) -> Result<(Subspace<T>, bool)> {
    let s = svd(a)?;
    let k = s.kernel(rank_tol);
    let ambiguous = s.rank_is_ambiguous(rank_tol);
    Ok((Subspace::new(a.cols(), k)?, ambiguous))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelRatio {
    pub semigap: f64,
    pub norm_diff: f64,
    pub ratio: f64,
    /// a singular value sat within a factor 10 of the rank threshold
    pub uncertain: bool,
}

/// `θ₀(ker A, ker A₀)`, `‖A − A₀‖` and their ratio (0 when `ker A` is trivial or `A = A₀`).
pub fn kernel_semigap_ratio<T: Real>(a0: &ComplexMatrix<T>, a: &ComplexMatrix<T>, rank_tol: T) -> Result<KernelRatio> {
    if a0.rows() != a.rows() || a0.cols() != a.cols() {
        return Err(LabError::dims(
            format!("{}x{}", a0.rows(), a0.cols()),
            format!("{}x{}", a.rows(), a.cols()),
        ));
    }
    let (ka, amb_a) = kernel(a, rank_tol)?;
    let (k0, amb_0) = kernel(a0, rank_tol)?;
    let sg = semigap(&ka, &k0)?;
    let nd = operator_norm(&(a - a0))?;
    let ratio = if ka.dim() == 0 || nd == T::zero() { T::zero() } else { sg / nd };
    Ok(KernelRatio {
        semigap: sg.as_f64(),
        norm_diff: nd.as_f64(),
        ratio: ratio.as_f64(),
        uncertain: amb_a || amb_0,
    })
}
