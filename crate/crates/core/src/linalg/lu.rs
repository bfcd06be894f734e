//! Partial-pivot LU for square complex matrices.

use num_complex::Complex;

use super::matrix::ComplexMatrix;
use crate::error::{LabError, Result};
use crate::scalar::{czero, Real};

#[derive(Clone)]
pub struct Lu<T: Real> {
    lu: ComplexMatrix<T>,
    perm: Vec<usize>,
    /// smallest pivot modulus seen during factorisation (before any regularisation)
    pub min_pivot: T,
}

impl<T: Real> std::fmt::Debug for Lu<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Lu").field("lu", &self.lu).field("perm", &self.perm).finish()
    }
}

impl<T: Real> Lu<T> {
    /// Factors `m`; errors when a pivot is exactly zero.
    pub fn factor(m: &ComplexMatrix<T>) -> Result<Self> {
        let lu = Self::factor_inner(m, None)?;
        if lu.min_pivot == T::zero() {
            return Err(LabError::numeric("LU: singular matrix", 0.0));
        }
        Ok(lu)
    }

    /// Factors `m`, replacing pivots smaller than `floor` by `floor` (keeping
    /// phase). Used by inverse iteration where the shifted matrix is
    /// singular on purpose.
    pub fn factor_regularized(m: &ComplexMatrix<T>, floor: T) -> Result<Self> {
        Self::factor_inner(m, Some(floor))
    }

    fn factor_inner(m: &ComplexMatrix<T>, floor: Option<T>) -> Result<Self> {
        if !m.is_square() {
            return Err(LabError::dims("square matrix", format!("{}x{}", m.rows(), m.cols())));
        }
        let n = m.rows();
        let mut a = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut min_pivot = T::infinity();
        for k in 0..n {
            let mut p = k;
            let mut best = a[(k, k)].norm();
            for i in (k + 1)..n {
                let v = a[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    let tmp = a[(k, j)];
                    a[(k, j)] = a[(p, j)];
                    a[(p, j)] = tmp;
                }
                perm.swap(k, p);
            }
            min_pivot = min_pivot.min(best);
            if let Some(f) = floor {
                if best < f {
                    let ph = if best == T::zero() {
                        Complex::new(T::one(), T::zero())
                    } else {
                        a[(k, k)].unscale(best)
                    };
                    a[(k, k)] = ph.scale(f);
                }
            }
            let piv = a[(k, k)];
            if piv == czero() {
                continue;
            }
            for i in (k + 1)..n {
                let l = a[(i, k)] / piv;
                a[(i, k)] = l;
                if l == czero() {
                    continue;
                }
                for j in (k + 1)..n {
                    let u = a[(k, j)];
                    a[(i, j)] = a[(i, j)] - l * u;
                }
            }
        }
        if n == 0 {
            min_pivot = T::zero();
        }
        Ok(Lu { lu: a, perm, min_pivot })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn solve(&self, b: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        let n = self.dim();
        if b.len() != n {
            return Err(LabError::dims(format!("rhs of length {n}"), format!("length {}", b.len())));
        }
        let mut y: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = y[i];
            for j in 0..i {
                s = s - self.lu[(i, j)] * y[j];
            }
            y[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in (i + 1)..n {
                s = s - self.lu[(i, j)] * y[j];
            }
            let d = self.lu[(i, i)];
            if d == czero() {
                return Err(LabError::numeric("LU solve: zero pivot", 0.0));
            }
            y[i] = s / d;
        }
        Ok(y)
    }

    pub fn solve_matrix(&self, b: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        let cols: Result<Vec<_>> = (0..b.cols()).map(|j| self.solve(&b.column(j))).collect();
        Ok(ComplexMatrix::from_columns(b.rows(), &cols?))
    }
}

/// Inverse via LU; errors on exactly singular input.
pub fn inverse<T: Real>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let lu = Lu::factor(m)?;
    lu.solve_matrix(&ComplexMatrix::identity(m.rows()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    type M = ComplexMatrix<f64>;

    #[test]
    fn inverse_of_small_matrix() {
        let a = M::from_rows(&[
            vec![cplx(0.0, 1.0), cplx(2.0, 0.0)],
            vec![cplx(1.0, 0.0), cplx(1.0, -1.0)],
        ]);
        let inv = inverse(&a).unwrap();
        let e = &(&a * &inv) - &M::identity(2);
        assert!(e.max_abs() < 1e-14);
    }

    #[test]
    fn singular_rejected_but_regularized_ok() {
        let a = M::from_real_rows(&[&[1.0, 2.0], &[2.0, 4.0]]);
        assert!(Lu::factor(&a).is_err());
        let lu = Lu::factor_regularized(&a, 1e-14).unwrap();
        let x = lu.solve(&[cplx(1.0, 0.0), cplx(0.0, 0.0)]).unwrap();
        assert!(x.iter().all(|z| z.re.is_finite()));
    }
}
