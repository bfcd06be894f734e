//! Seeded random matrices: Ginibre perturbations and Haar unitaries.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{LabError, Result};
use crate::linalg::{operator_norm, vec_norm, ComplexMatrix};
use crate::scalar::Real;

/// Seed for trial `trial` of decade `decade`, derived by SplitMix64 from the run seed.
pub fn trial_seed(seed: u64, decade: usize, trial: usize) -> u64 {
    let mut z = seed
        .wrapping_add((decade as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add((trial as u64).wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex Ginibre matrix: independent entries `(x + iy)/√2` with standard normal `x, y`.
pub fn ginibre<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix<T> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        Complex::new(T::lit(x * s), T::lit(y * s))
    })
}

/// Ginibre matrix rescaled to operator norm `epsilon`.
pub fn ginibre_with_norm<T: Real, R: Rng + ?Sized>(n: usize, epsilon: T, rng: &mut R) -> Result<ComplexMatrix<T>> {
    if !(epsilon >= T::zero()) || !epsilon.is_finite() {
        return Err(LabError::invalid(format!("perturbation size {epsilon} must be finite and non-negative")));
    }
    let g = ginibre::<T, R>(n, n, rng);
    let nrm = operator_norm(&g)?;
    Ok(g.scale_real(epsilon / nrm))
}

/// Haar-distributed unitary: Gram-Schmidt QR of a Ginibre matrix with the
/// diagonal phases of `R` absorbed.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix<T> {
    let g = ginibre::<T, R>(n, n, rng);
    let mut q: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for _ in 0..2 {
            for u in &q {
                let c = crate::linalg::dot(u, &v);
                for (x, y) in v.iter_mut().zip(u) {
                    *x = *x - c * *y;
                }
            }
        }
        let nv = vec_norm(&v);
        q.push(v.iter().map(|z| z.unscale(nv)).collect());
    }
    ComplexMatrix::from_columns(n, &q)
}

/// `U·diag(s)·V` with Haar `U, V` and singular values spread geometrically over `[1, cond]`.
pub fn well_conditioned<T: Real, R: Rng + ?Sized>(n: usize, cond: T, rng: &mut R) -> ComplexMatrix<T> {
    let u = haar_unitary::<T, R>(n, rng);
    let v = haar_unitary::<T, R>(n, rng);
    let d: Vec<Complex<T>> = (0..n)
        .map(|i| {
            let t = if n > 1 { T::lit(i as f64 / (n - 1) as f64) } else { T::zero() };
            Complex::new(cond.powf(t), T::zero())
        })
        .collect();
    u.matmul(&ComplexMatrix::from_diag(&d)).matmul(&v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::orthonormality_defect;

    #[test]
    fn seeds_are_reproducible_and_distinct() {
        assert_eq!(trial_seed(7, 1, 2), trial_seed(7, 1, 2));
        assert_ne!(trial_seed(7, 1, 2), trial_seed(7, 2, 1));
        let a: ComplexMatrix<f64> = ginibre(3, 3, &mut rng_from_seed(5));
        let b: ComplexMatrix<f64> = ginibre(3, 3, &mut rng_from_seed(5));
        assert_eq!(a, b);
    }

    #[test]
    fn normalised_perturbation() {
        let e: ComplexMatrix<f64> = ginibre_with_norm(4, 1e-6, &mut rng_from_seed(1)).unwrap();
        assert!((operator_norm(&e).unwrap() - 1e-6).abs() <= 1e-6 * 1e-12);
    }

    #[test]
    fn haar_is_unitary() {
        let q: ComplexMatrix<f64> = haar_unitary(6, &mut rng_from_seed(3));
        assert!(orthonormality_defect(&q) < 1e-13);
    }

    #[test]
    fn condition_number_respected() {
        let p: ComplexMatrix<f64> = well_conditioned(5, 100.0, &mut rng_from_seed(9));
        let s = crate::linalg::singular_values(&p).unwrap();
        assert!((s[0] / s[4] - 100.0).abs() < 1e-8);
    }
}
