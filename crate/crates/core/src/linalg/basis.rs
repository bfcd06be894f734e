use num_complex::Complex;

use super::matrix::{dot, unit_vector, vec_norm, ComplexMatrix};
use crate::error::{LabError, Result};
use crate::scalar::Real;

/// Candidates whose residual after orthogonalisation falls below this are skipped.
pub const DEPENDENCE_THRESHOLD: f64 = 1e-6;

/// Input orthonormality tolerance for [`orthonormal_extend`].
pub const ORTHONORMAL_TOL: f64 = 1e-10;

fn project_out<T: Real>(v: &mut [Complex<T>], basis: &[Vec<Complex<T>>]) {
    // two passes of modified Gram-Schmidt
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, v);
            for (x, y) in v.iter_mut().zip(q) {
                *x = *x - c * *y;
            }
        }
    }
}

/// Appends canonical vectors (orthogonalised against everything so far) until
/// the set has `dim` columns. No validation of the leading columns.
pub(crate) fn complete_basis<T: Real>(mut cols: Vec<Vec<Complex<T>>>, dim: usize) -> ComplexMatrix<T> {
    let thr = T::lit(DEPENDENCE_THRESHOLD);
    let mut k = 0;
    while cols.len() < dim && k < dim {
        let mut e = unit_vector::<T>(dim, k);
        project_out(&mut e, &cols);
        let n = vec_norm(&e);
        if n > thr {
            cols.push(e.iter().map(|z| z.unscale(n)).collect());
        }
        k += 1;
    }
    debug_assert_eq!(cols.len(), dim, "canonical vectors span the space");
    ComplexMatrix::from_columns(dim, &cols)
}

/// Orthonormalises `vectors` in order, dropping those that are numerically
/// dependent on their predecessors.
pub fn gram_schmidt<T: Real>(vectors: &[Vec<Complex<T>>]) -> Vec<Vec<Complex<T>>> {
    let thr = T::lit(DEPENDENCE_THRESHOLD);
    let mut out: Vec<Vec<Complex<T>>> = Vec::new();
    for v in vectors {
        let scale = vec_norm(v);
        if scale == T::zero() {
            continue;
        }
        let mut w = v.clone();
        project_out(&mut w, &out);
        let n = vec_norm(&w);
        if n > thr * scale {
            out.push(w.iter().map(|z| z.unscale(n)).collect());
        }
    }
    out
}

/// Completes an orthonormal set to a `dim × dim` unitary whose leading columns
/// are exactly the given vectors.
pub fn orthonormal_extend<T: Real>(vectors: &[Vec<Complex<T>>], dim: usize) -> Result<ComplexMatrix<T>> {
    if dim == 0 {
        return Err(LabError::invalid("orthonormal_extend: dimension must be positive"));
    }
    if vectors.len() > dim {
        return Err(LabError::invalid(format!(
            "orthonormal_extend: {} vectors exceed dimension {dim}",
            vectors.len()
        )));
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != dim) {
        return Err(LabError::dims(format!("vectors of length {dim}"), format!("length {}", v.len())));
    }
    let tol = T::tol(ORTHONORMAL_TOL);
    for (i, a) in vectors.iter().enumerate() {
        for (j, b) in vectors.iter().enumerate().skip(i) {
            let g = dot(a, b);
            let target = if i == j { T::one() } else { T::zero() };
            if (g - Complex::new(target, T::zero())).norm() > tol {
                return Err(LabError::invalid(format!(
                    "orthonormal_extend: vectors {i} and {j} not orthonormal (gram entry {g})"
                )));
            }
        }
    }
    Ok(complete_basis(vectors.to_vec(), dim))
}

/// `‖Q*Q − I‖` in the max-entry sense; cheap orthonormality check.
pub fn orthonormality_defect<T: Real>(q: &ComplexMatrix<T>) -> T {
    let g = q.adjoint().matmul(q);
    let mut worst = T::zero();
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            let target = if i == j { T::one() } else { T::zero() };
            worst = worst.max((g[(i, j)] - Complex::new(target, T::zero())).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{cplx, czero};

    type M = ComplexMatrix<f64>;

    #[test]
    fn e1_in_c2_extends_to_identity() {
        let q = orthonormal_extend(&[unit_vector::<f64>(2, 0)], 2).unwrap();
        assert_eq!(q, M::identity(2));
    }

    #[test]
    fn diagonal_vector_extends_with_antidiagonal_partner() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let q = orthonormal_extend(&[vec![cplx(s, 0.0), cplx(s, 0.0)]], 2).unwrap();
        assert!((q[(0, 1)] - cplx(s, 0.0)).norm() < 1e-15);
        assert!((q[(1, 1)] - cplx(-s, 0.0)).norm() < 1e-15);
        assert!(orthonormality_defect(&q) < 1e-15);
    }

    #[test]
    fn full_basis_returned_unchanged() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let cols = vec![
            vec![cplx(s, 0.0), cplx(0.0, s)],
            vec![cplx(0.0, s), cplx(s, 0.0)],
        ];
        let q = orthonormal_extend(&cols, 2).unwrap();
        assert_eq!(q, M::from_columns(2, &cols));
    }

    #[test]
    fn rejects_non_orthonormal_input() {
        let v = vec![cplx(1.0, 0.0), cplx(1.0, 0.0)];
        assert!(orthonormal_extend(&[v], 2).is_err());
        let a = unit_vector::<f64>(2, 0);
        assert!(orthonormal_extend(&[a.clone(), a.clone(), a], 2).is_err());
    }

    #[test]
    fn gram_schmidt_drops_dependent_vectors() {
        let a = vec![cplx(1.0, 0.0), cplx(1.0, 0.0), czero()];
        let b = vec![cplx(2.0, 0.0), cplx(2.0, 0.0), czero()];
        let c = vec![czero(), czero(), cplx(0.0, 3.0)];
        let out = gram_schmidt(&[a, b, c]);
        assert_eq!(out.len(), 2);
    }
}
