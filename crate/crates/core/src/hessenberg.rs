//! Lower unitary Hessenberg matrices: Schur-parameter form, construction from a
//! prescribed first column, and factorisation of a unitary matrix into a chain
//! of embedded Hessenberg factors.
//!
//! For parameters `ρ₁..ρₙ` (with `|ρₙ| = 1`) and `μⱼ = √(1 − |ρⱼ|²)` the matrix
//! has `μⱼ` on the superdiagonal and, for `i ≥ j`,
//!
//! ```text
//! H[i][j] = −ρᵢ · μᵢ₋₁ ⋯ μⱼ · conj(ρⱼ₋₁)      (conj(ρ₀) := 1)
//! ```
//!
//! Its first column is `x` with `xⱼ = −ρⱼ μⱼ₋₁ ⋯ μ₁`, so the parameters can be
//! read back from any unit vector.

use num_complex::Complex;

use crate::error::{LabError, Result};
use crate::linalg::basis::orthonormality_defect;
use crate::linalg::{operator_norm, vec_norm, ComplexMatrix};
use crate::scalar::{cone, Real};

/// Accepted deviation of `|ρₙ|` from 1.
pub const PARAM_UNIT_TOL: f64 = 1e-10;
/// Accepted deviation of `‖x‖` from 1 in [`hessenberg_from_first_column`].
pub const UNIT_VECTOR_TOL: f64 = 1e-10;
/// Accepted `‖U*U − I‖` for inputs to [`factor_unitary`].
pub const INPUT_UNITARY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct SchurParams<T: Real> {
    rho: Vec<Complex<T>>,
    mu: Vec<T>,
}

impl<T: Real> SchurParams<T> {
    /// Validates `|ρⱼ| ≤ 1` and `|ρₙ| = 1`; `μ` is derived from `ρ`.
    pub fn new(rho: Vec<Complex<T>>) -> Result<Self> {
        let n = rho.len();
        if n == 0 {
            return Err(LabError::InvalidParams("empty parameter vector".into()));
        }
        let tol = T::tol(PARAM_UNIT_TOL);
        for (j, r) in rho.iter().enumerate() {
            if !(r.re.is_finite() && r.im.is_finite()) {
                return Err(LabError::InvalidParams(format!("rho[{j}] is not finite")));
            }
            if r.norm() > T::one() + tol {
                return Err(LabError::InvalidParams(format!("|rho[{j}]| = {} exceeds 1", r.norm())));
            }
        }
        let last = rho[n - 1].norm();
        if (last - T::one()).abs() > tol {
            return Err(LabError::InvalidParams(format!(
                "|rho_n| = {last} but must be 1 for a unitary matrix"
            )));
        }
        let mu = rho[..n - 1]
            .iter()
            .map(|r| (T::one() - r.norm_sqr()).max(T::zero()).sqrt())
            .collect();
        Ok(SchurParams { rho, mu })
    }

    /// Recovers the parameters of the Hessenberg matrix whose first column is `x`.
    ///
    /// Uses tail norms `rⱼ = ‖x[j+1..]‖` so that `μⱼ = rⱼ/rⱼ₋₁` stays accurate
    /// when `|ρⱼ|` is close to 1. Once a tail vanishes the remaining
    /// parameters follow the identity convention `ρⱼ₊₁ = −ρⱼ`.
    pub fn from_first_column(x: &[Complex<T>]) -> Result<Self> {
        let n = x.len();
        if n == 0 {
            return Err(LabError::invalid("first column must be non-empty"));
        }
        let nrm = vec_norm(x);
        if (nrm - T::one()).abs() > T::tol(UNIT_VECTOR_TOL) {
            return Err(LabError::invalid(format!("first column has norm {nrm}, expected 1")));
        }
        Ok(Self::from_unit_column(x))
    }

    /// Same as [`from_first_column`](Self::from_first_column) after normalising;
    /// no validation.
    pub(crate) fn from_unit_column(x: &[Complex<T>]) -> Self {
        let n = x.len();
        let mut tail = vec![T::zero(); n + 1];
        // tail[j] = ‖x[j..]‖ (0-based), computed with scaling
        for j in (0..n).rev() {
            tail[j] = tail[j + 1].hypot(x[j].norm());
        }
        let total = tail[0];
        let tiny = T::epsilon() * T::epsilon();
        let mut rho: Vec<Complex<T>> = Vec::with_capacity(n);
        let mut mu = Vec::with_capacity(n.saturating_sub(1));
        let mut degenerate = false;
        for j in 0..n {
            let prev = tail[j] / total;
            if degenerate || prev <= tiny {
                degenerate = true;
                let r = if j == 0 { -cone::<T>() } else { -rho[j - 1] };
                rho.push(r);
                if j + 1 < n {
                    mu.push(T::zero());
                }
                continue;
            }
            let r = -(x[j] / total).unscale(prev);
            if j + 1 < n {
                let m = (tail[j + 1] / total) / prev;
                mu.push(m);
                rho.push(r);
            } else {
                // final parameter is unimodular
                let a = r.norm();
                rho.push(if a == T::zero() { -cone::<T>() } else { r.unscale(a) });
            }
        }
        SchurParams { rho, mu }
    }

    pub fn dim(&self) -> usize {
        self.rho.len()
    }

    pub fn rho(&self) -> &[Complex<T>] {
        &self.rho
    }

    pub fn mu(&self) -> &[T] {
        &self.mu
    }
}

/// Builds the lower unitary Hessenberg matrix of the given parameters.
pub fn hessenberg_from_params<T: Real>(p: &SchurParams<T>) -> ComplexMatrix<T> {
    let n = p.dim();
    let mut h = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        if j + 1 < n {
            h[(j, j + 1)] = Complex::new(p.mu[j], T::zero());
        }
        let head = if j == 0 { cone() } else { p.rho[j - 1].conj() };
        let mut prod = T::one();
        for i in j..n {
            if i > j {
                prod = prod * p.mu[i - 1];
                if prod == T::zero() {
                    break;
                }
            }
            h[(i, j)] = -(p.rho[i] * head).scale(prod);
        }
    }
    h
}

/// Lower unitary Hessenberg matrix whose first column is the unit vector `x`.
pub fn hessenberg_from_first_column<T: Real>(x: &[Complex<T>]) -> Result<ComplexMatrix<T>> {
    Ok(hessenberg_from_params(&SchurParams::from_first_column(x)?))
}

/// Normalises `x` and builds its Hessenberg matrix; `x` must be non-zero.
pub(crate) fn hessenberg_for_direction<T: Real>(x: &[Complex<T>]) -> ComplexMatrix<T> {
    let n = vec_norm(x);
    let unit: Vec<Complex<T>> = x.iter().map(|z| z.unscale(n)).collect();
    hessenberg_from_params(&SchurParams::from_unit_column(&unit))
}

/// Factors `H̃₁ ⋯ H̃ₘ` with `H̃ₖ = I_{k−1} ⊕ Hₖ`. Only the compact blocks `Hₖ`
/// (of size `dim − k + 1`) are stored.
#[derive(Clone, PartialEq)]
pub struct HessenbergChain<T: Real> {
    dim: usize,
    factors: Vec<ComplexMatrix<T>>,
}

impl<T: Real> std::fmt::Debug for HessenbergChain<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HessenbergChain")
            .field("dim", &self.dim)
            .field("factors", &self.factors)
            .finish()
    }
}

impl<T: Real> HessenbergChain<T> {
    pub fn new(dim: usize) -> Self {
        HessenbergChain { dim, factors: Vec::new() }
    }

    /// Appends the next compact factor; it must have size `dim − len()`.
    pub fn push(&mut self, h: ComplexMatrix<T>) -> Result<()> {
        let expected = self.dim.saturating_sub(self.factors.len());
        if !h.is_square() || h.rows() != expected || expected == 0 {
            return Err(LabError::dims(
                format!("{expected}x{expected} factor"),
                format!("{}x{}", h.rows(), h.cols()),
            ));
        }
        self.factors.push(h);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Compact block `Hₖ` (0-based `k`).
    pub fn factor(&self, k: usize) -> &ComplexMatrix<T> {
        &self.factors[k]
    }

    pub fn factors(&self) -> &[ComplexMatrix<T>] {
        &self.factors
    }

    /// Full-size factor `I_k ⊕ Hₖ`.
    pub fn embedded(&self, k: usize) -> ComplexMatrix<T> {
        self.factors[k].embed(k)
    }

    /// `H̃₁ ⋯ H̃ₘ`, exploiting the identity blocks.
    pub fn product(&self) -> ComplexMatrix<T> {
        let n = self.dim;
        let mut p = ComplexMatrix::identity(n);
        for (k, h) in self.factors.iter().enumerate() {
            let cols = p.block(0, k, n, n - k).matmul(h);
            p.set_block(0, k, &cols);
        }
        p
    }
}

/// Writes `u` as a product of embedded lower unitary Hessenberg factors.
///
/// Step `k` builds `Hₖ` from the first column of the current deflated unitary
/// `Uₖ`, then deflates `Hₖ* Uₖ = 1 ⊕ Uₖ₊₁`. The unimodular scalar left at the end
/// is absorbed into the last factor's second column.
pub fn factor_unitary<T: Real>(u: &ComplexMatrix<T>) -> Result<HessenbergChain<T>> {
    if !u.is_square() || u.is_empty() {
        return Err(LabError::invalid(format!(
            "factor_unitary needs a non-empty square matrix, got {}x{}",
            u.rows(),
            u.cols()
        )));
    }
    if !u.is_finite() {
        return Err(LabError::invalid("factor_unitary: non-finite entries"));
    }
    let n = u.rows();
    let defect = operator_norm(&(&u.adjoint().matmul(u) - &ComplexMatrix::identity(n)))?;
    if defect > T::tol(INPUT_UNITARY_TOL) {
        return Err(LabError::invalid(format!("factor_unitary: ‖U*U − I‖ = {defect}")));
    }
    let mut chain = HessenbergChain::new(n);
    if n == 1 {
        chain.push(u.clone())?;
        return Ok(chain);
    }
    let mut w = u.clone();
    for k in 0..n - 1 {
        let m = n - k;
        let active = w.block(k, k, m, m);
        let h = hessenberg_for_direction(&active.column(0));
        let reduced = h.adjoint().matmul(&active);
        w.set_block(k, k, &reduced);
        chain.push(h)?;
    }
    let phase = w[(n - 1, n - 1)];
    let phase = phase.unscale(phase.norm());
    let last = chain.factors.last_mut().expect("n >= 2");
    for i in 0..2 {
        last[(i, 1)] = last[(i, 1)] * phase;
    }
    Ok(chain)
}

/// Largest `‖Hₖ*Hₖ − I‖` entry over the chain.
pub fn chain_unitarity_defect<T: Real>(chain: &HessenbergChain<T>) -> T {
    chain
        .factors()
        .iter()
        .map(orthonormality_defect)
        .fold(T::zero(), T::max)
}

/// Largest modulus above the first superdiagonal.
pub fn above_superdiagonal<T: Real>(h: &ComplexMatrix<T>) -> T {
    let mut worst = T::zero();
    for i in 0..h.rows() {
        for j in (i + 2)..h.cols() {
            worst = worst.max(h[(i, j)].norm());
        }
    }
    worst
}
