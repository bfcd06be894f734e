//! Backward pairing: given a Schur form of a perturbed `A`, build a Schur form
//! of `A₀` step by step from the same Hessenberg chain, then measure how far
//! apart the two factorizations are.

use num_complex::Complex;
use serde::Serialize;

use super::matching::match_eigenvalues;
use super::report::{DecadeSummary, ExperimentReport, TrialFailure};
use super::sampler::{ginibre_with_norm, rng_from_seed, trial_seed};
use crate::eigen::{centroid, cluster_values, eigenvalues, DEFAULT_CLUSTER_TOL};
use crate::error::{LabError, Result};
use crate::gaps::{intersect, Subspace};
use crate::linalg::basis::{complete_basis, gram_schmidt};
use crate::linalg::{operator_norm, svd, vec_norm, ComplexMatrix, DEFAULT_RANK_TOL};
use crate::schur::{schur_decompose, EigenOrder, SchurForm, SCHUR_RESIDUAL_TOL};
use crate::scalar::{czero, Real};

/// Projections of `v₁` onto the kernel shorter than this abort the pairing.
pub const MIN_PROJECTION: f64 = 1e-6;
/// Sine tolerance when intersecting the kernel with ranges of powers.
pub const INTERSECTION_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BackwardOptions<T> {
    pub rank_tol: T,
    pub cluster_tol: T,
}

impl<T: Real> Default for BackwardOptions<T> {
    fn default() -> Self {
        BackwardOptions {
            rank_tol: T::lit(DEFAULT_RANK_TOL),
            cluster_tol: T::tol(DEFAULT_CLUSTER_TOL),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairingStep {
    pub projection_norm: f64,
    /// filtration level used: 1 is the plain kernel
    pub depth: usize,
}

#[derive(Clone, Debug)]
pub struct Reconstruction<T: Real> {
    pub u0: ComplexMatrix<T>,
    pub t0: ComplexMatrix<T>,
    /// `‖U₀T₀U₀* − A₀‖`
    pub residual: T,
    pub steps: Vec<PairingStep>,
}

/// Eigenvalues of `a0` with each cluster replaced by its centroid.
fn centroided_spectrum<T: Real>(a0: &ComplexMatrix<T>, cluster_tol: T) -> Result<Vec<Complex<T>>> {
    let ev = eigenvalues(a0)?;
    let mut out = ev.clone();
    for c in cluster_values(&ev, cluster_tol) {
        let m = centroid(&ev, &c);
        for i in c {
            out[i] = m;
        }
    }
    Ok(out)
}

/// Picks the direction `u₁` in `ker N` closest to `v₁`, preferring the deepest
/// level of the filtration `ker N ∩ Im N^{j−1}` that `v₁` is still close to.
fn pair_direction<T: Real>(
    n_mat: &ComplexMatrix<T>,
    v1: &[Complex<T>],
    rank_tol: T,
    step: usize,
) -> Result<(Vec<Complex<T>>, PairingStep)> {
    let m = n_mat.rows();
    let s = svd(n_mat)?;
    let kernel = Subspace::new(m, s.kernel(rank_tol))?;
    if kernel.dim() == 0 {
        return Err(LabError::PairingFailure { step, projection_norm: 0.0 });
    }
    let p = kernel.project(v1);
    let proj = vec_norm(&p);
    if proj < T::lit(MIN_PROJECTION) {
        return Err(LabError::PairingFailure { step, projection_norm: proj.as_f64() });
    }
    let dist = |sub: &Subspace<T>| vec_norm(&crate::linalg::vec_sub(v1, &sub.project(v1)));
    let d1 = dist(&kernel);
    let reach = d1.sqrt();
    let mut chosen = kernel.clone();
    let mut depth = 1;
    let mut power = n_mat.clone();
    for j in 2..=m {
        let range = Subspace::new(m, svd(&power)?.range(rank_tol))?;
        let level = intersect(&kernel, &range, T::lit(INTERSECTION_TOL))?;
        if level.dim() == 0 || dist(&level) > reach {
            break;
        }
        chosen = level;
        depth = j;
        power = power.matmul(n_mat);
    }
    let u = chosen.project(v1);
    let nu = vec_norm(&u);
    let u1: Vec<Complex<T>> = u.iter().map(|z| z.unscale(nu)).collect();
    Ok((u1, PairingStep { projection_norm: proj.as_f64(), depth }))
}

/// `[u₁, orthonormalised (I − u₁u₁*)·V[:, 1:]]`, completed if columns drop out.
fn complete_from<T: Real>(u1: Vec<Complex<T>>, v: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let m = v.rows();
    let mut cols = vec![u1.clone()];
    for j in 1..m {
        let mut w = v.column(j);
        let c = crate::linalg::dot(&u1, &w);
        for (x, y) in w.iter_mut().zip(&u1) {
            *x = *x - c * *y;
        }
        cols.push(w);
    }
    let q = gram_schmidt(&cols);
    complete_basis(q, m)
}

/// Schur factorization of `a0` paired with the Schur form `s` of a nearby matrix.
///
/// Step `k` takes the first column `v₁` of the `k`-th Hessenberg factor of `s`,
/// moves it into `ker(A₀,ₖ − λI)` for the eigenvalue `λ` matched to `s.t[k][k]`,
/// completes it to a unitary close to that factor and deflates `A₀`.
pub fn backward_reconstruct<T: Real>(
    a0: &ComplexMatrix<T>,
    s: &SchurForm<T>,
    opts: &BackwardOptions<T>,
) -> Result<Reconstruction<T>> {
    let n = a0.rows();
    if !a0.is_square() || n == 0 {
        return Err(LabError::invalid("A₀ must be a non-empty square matrix"));
    }
    if s.dim() != n || s.chain.len() != n - 1 {
        return Err(LabError::dims(format!("Schur form of order {n}"), format!("order {}", s.dim())));
    }
    let targets = centroided_spectrum(a0, opts.cluster_tol)?;
    let pairing = match_eigenvalues(&s.t.diagonal(), &targets)?;
    let lambdas: Vec<Complex<T>> = pairing.permutation.iter().map(|&j| targets[j]).collect();

    let mut w = a0.clone();
    let mut u0 = ComplexMatrix::identity(n);
    let mut steps = Vec::with_capacity(n.saturating_sub(1));
    for k in 0..n.saturating_sub(1) {
        let m = n - k;
        let active = w.block(k, k, m, m);
        let vk = s.chain.factor(k);
        let (u1, info) = pair_direction(&active.shifted(lambdas[k]), &vk.column(0), opts.rank_tol, k)?;
        let uk = complete_from(u1, vk);
        let right = w.block(0, k, n, m).matmul(&uk);
        w.set_block(0, k, &right);
        let left = uk.adjoint().matmul(&w.block(k, 0, m, n));
        w.set_block(k, 0, &left);
        for i in (k + 1)..n {
            w[(i, k)] = czero();
        }
        let cols = u0.block(0, k, n, m).matmul(&uk);
        u0.set_block(0, k, &cols);
        steps.push(info);
    }
    let residual = operator_norm(&(&u0.matmul(&w).matmul(&u0.adjoint()) - a0))?;
    Ok(Reconstruction { u0, t0: w, residual, steps })
}

/// `(gap/2)ⁿ` for the smallest distance between eigenvalue clusters of `a0`;
/// `None` when there is a single cluster.
pub fn safety_threshold<T: Real>(a0: &ComplexMatrix<T>, cluster_tol: T) -> Result<Option<T>> {
    let ev = eigenvalues(a0)?;
    let reps: Vec<Complex<T>> = cluster_values(&ev, cluster_tol).iter().map(|c| centroid(&ev, c)).collect();
    let mut gap: Option<T> = None;
    for i in 0..reps.len() {
        for j in (i + 1)..reps.len() {
            let d = (reps[i] - reps[j]).norm();
            gap = Some(gap.map_or(d, |g| g.min(d)));
        }
    }
    Ok(gap.map(|g| (g / T::lit(2.0)).powi(a0.rows() as i32)))
}

pub fn validate_decades(decades: &[f64]) -> Result<()> {
    if decades.iter().any(|e| !(*e > 0.0) || !e.is_finite()) {
        return Err(LabError::invalid("perturbation sizes must be positive and finite"));
    }
    if decades.windows(2).any(|w| w[1] >= w[0]) {
        return Err(LabError::invalid("perturbation sizes must be strictly decreasing"));
    }
    Ok(())
}

/// A perturbation `A = A₀ + E` of prescribed size.
#[derive(Clone, Debug, Serialize)]
pub struct PerturbationTrial {
    pub epsilon: f64,
    pub seed: u64,
    pub a: ComplexMatrix<f64>,
    pub actual_norm_diff: f64,
}

/// One measured trial.
#[derive(Clone, Debug, Serialize)]
pub struct BackwardRecord {
    pub trial: PerturbationTrial,
    pub u: ComplexMatrix<f64>,
    pub t: ComplexMatrix<f64>,
    pub u0: ComplexMatrix<f64>,
    pub t0: ComplexMatrix<f64>,
    pub u_dist: f64,
    pub t_dist: f64,
    /// `(u_dist + t_dist) / ‖A − A₀‖^{1/n}`
    pub holder_ratio: f64,
    /// `‖U₀T₀U₀* − A₀‖`
    pub residual0: f64,
}

/// Runs `trials_per_decade` Ginibre perturbations of each size in `decades`.
pub fn measure_backward<T: Real>(
    matrix_id: &str,
    a0: &ComplexMatrix<T>,
    decades: &[f64],
    trials_per_decade: usize,
    seed: u64,
    opts: &BackwardOptions<T>,
) -> Result<ExperimentReport> {
    validate_decades(decades)?;
    let n = a0.rows();
    if !a0.is_square() || n == 0 {
        return Err(LabError::invalid("A₀ must be a non-empty square matrix"));
    }
    let threshold = safety_threshold(a0, opts.cluster_tol)?;
    if let (Some(thr), Some(&top)) = (threshold, decades.first()) {
        if top >= thr.as_f64() {
            return Err(LabError::invalid(format!(
                "perturbation size {top:e} is not below the safety threshold {:e}",
                thr.as_f64()
            )));
        }
    }
    let scale = operator_norm(a0)?.max(T::one());
    let limit = T::tol(SCHUR_RESIDUAL_TOL) * scale;
    let mut report = ExperimentReport::new(matrix_id, seed, n, opts.rank_tol.as_f64(), opts.cluster_tol.as_f64());
    report.safety_threshold = threshold.map(|t| t.as_f64());
    report.decades = decades.to_vec();

    for (d, &eps) in decades.iter().enumerate() {
        let mut summary = DecadeSummary::new(eps);
        for t in 0..trials_per_decade {
            let ts = trial_seed(seed, d, t);
            let mut rng = rng_from_seed(ts);
            let e = ginibre_with_norm(n, T::lit(eps), &mut rng)?;
            let a = a0 + &e;
            let actual = operator_norm(&(&a - a0))?;
            let s = schur_decompose(&a, &EigenOrder::default())?;
            summary.trials += 1;
            let rec = match backward_reconstruct(a0, &s, opts) {
                Ok(r) => r,
                Err(LabError::PairingFailure { step, projection_norm }) => {
                    summary.failures += 1;
                    report.failures.push(TrialFailure { epsilon: eps, seed: ts, step, projection_norm });
                    continue;
                }
                Err(other) => return Err(other),
            };
            let u_dist = operator_norm(&(&s.u - &rec.u0))?;
            let t_dist = operator_norm(&(&s.t - &rec.t0))?;
            let ratio = (u_dist + t_dist) / actual.powf(T::one() / T::lit(n as f64));
            if rec.residual > limit || rec.t0.max_below_diagonal() > T::zero() {
                report.invariant_violations += 1;
            }
            summary.record(ratio.as_f64());
            report.records.push(BackwardRecord {
                trial: PerturbationTrial {
                    epsilon: eps,
                    seed: ts,
                    a: a.cast(),
                    actual_norm_diff: actual.as_f64(),
                },
                u: s.u.cast(),
                t: s.t.cast(),
                u0: rec.u0.cast(),
                t0: rec.t0.cast(),
                u_dist: u_dist.as_f64(),
                t_dist: t_dist.as_f64(),
                holder_ratio: ratio.as_f64(),
                residual0: rec.residual.as_f64(),
            });
        }
        report.decade_maxima.push(summary);
    }
    log::info!(
        "{matrix_id}: {} records, {} pairing failures, {} invariant violations",
        report.records.len(),
        report.failures.len(),
        report.invariant_violations
    );
    Ok(report)
}
