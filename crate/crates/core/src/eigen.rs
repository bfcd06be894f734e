//! Eigenvalues by Householder reduction and single-shift QR; eigenvectors by
//! inverse iteration, with SVD null vectors for clusters.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::linalg::basis::gram_schmidt;
use crate::linalg::{dot, operator_norm, svd, vec_norm, ComplexMatrix, Lu};
use crate::scalar::{cplx, csqrt, czero, descending_modulus_order, Real};

/// Residual tolerance factor: pairs must satisfy `‖Av − λv‖ ≤ 1e-9·max(1, ‖A‖)`.
pub const DEFAULT_EIGEN_TOL: f64 = 1e-9;
/// Eigenvalues closer than this (relative to `max(1, ‖A‖)`) are treated as one cluster.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-6;

const QR_ITERS_PER_VALUE: usize = 60;
const INVERSE_ITERATION_STEPS: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real + Serialize + serde::de::DeserializeOwned")]
pub struct EigenPair<T> {
    pub value: Complex<T>,
    pub vector: Vec<Complex<T>>,
    pub residual: T,
}

/// Reduces `a` to upper Hessenberg form by a Householder similarity.
/// Columns whose entries below the subdiagonal are already zero are left alone,
/// so triangular input is returned unchanged.
pub fn hessenberg_reduce<T: Real>(a: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let n = a.rows();
    let mut h = a.clone();
    if n < 3 {
        return h;
    }
    for k in 0..n - 2 {
        let below: T = ((k + 2)..n).fold(T::zero(), |s, i| s.hypot(h[(i, k)].norm()));
        if below == T::zero() {
            continue;
        }
        let x: Vec<Complex<T>> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        let alpha_mod = vec_norm(&x);
        let ph = if x[0].norm() == T::zero() {
            cplx(T::one(), T::zero())
        } else {
            x[0].unscale(x[0].norm())
        };
        let alpha = -ph.scale(alpha_mod);
        let mut v = x.clone();
        v[0] = v[0] - alpha;
        let vn = vec_norm(&v);
        if vn == T::zero() {
            continue;
        }
        for z in v.iter_mut() {
            *z = z.unscale(vn);
        }
        // rows k+1.. : H ← (I − 2vv*) H
        for j in 0..n {
            let mut s = czero();
            for (t, vi) in v.iter().enumerate() {
                s = s + vi.conj() * h[(k + 1 + t, j)];
            }
            let s2 = s.scale(T::lit(2.0));
            for (t, vi) in v.iter().enumerate() {
                h[(k + 1 + t, j)] = h[(k + 1 + t, j)] - *vi * s2;
            }
        }
        // columns k+1.. : H ← H (I − 2vv*)
        for i in 0..n {
            let mut s = czero();
            for (t, vi) in v.iter().enumerate() {
                s = s + h[(i, k + 1 + t)] * *vi;
            }
            let s2 = s.scale(T::lit(2.0));
            for (t, vi) in v.iter().enumerate() {
                h[(i, k + 1 + t)] = h[(i, k + 1 + t)] - s2 * vi.conj();
            }
        }
        h[(k + 1, k)] = alpha;
        for i in (k + 2)..n {
            h[(i, k)] = czero();
        }
    }
    h
}

/// Eigenvalues of `[[a, b], [c, d]]`, larger modulus first.
fn eig2<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> (Complex<T>, Complex<T>) {
    let half = T::lit(0.5);
    let m = (a + d).scale(half);
    let q = (a - d).scale(half);
    let disc = csqrt(q * q + b * c);
    let (p1, p2) = (m + disc, m - disc);
    let (l1, l2) = if p1.norm() >= p2.norm() { (p1, p2) } else { (p2, p1) };
    if l1.norm() == T::zero() {
        return (czero(), czero());
    }
    if l2.norm() >= T::lit(0.1) * l1.norm() {
        return (l1, l2);
    }
    // l2 suffers cancellation; recover it from the determinant
    let det = a * d - b * c;
    (l1, det / l1)
}

/// Complex Givens rotation `[[c, s], [−s̄, c]]` sending `(a, b)` to `(r, 0)`.
fn givens<T: Real>(a: Complex<T>, b: Complex<T>) -> (T, Complex<T>) {
    let na = a.norm();
    let r = na.hypot(b.norm());
    if r == T::zero() {
        return (T::one(), czero());
    }
    if na == T::zero() {
        return (T::zero(), cplx(T::one(), T::zero()));
    }
    let c = na / r;
    let s = a.unscale(na) * b.conj().unscale(r);
    (c, s)
}

/// Eigenvalues of an upper Hessenberg matrix, in deflation order.
fn hessenberg_qr<T: Real>(mut h: ComplexMatrix<T>) -> Result<Vec<Complex<T>>> {
    let n = h.rows();
    let mut eig = vec![czero(); n];
    if n == 0 {
        return Ok(eig);
    }
    let hnorm = h.frobenius_norm();
    let eps = T::epsilon();
    let mut hi = n - 1;
    let mut its = 0usize;
    loop {
        if hi == 0 {
            eig[0] = h[(0, 0)];
            break;
        }
        // locate the start of the active unreduced block
        let mut l = hi;
        while l > 0 {
            let mut s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            if s == T::zero() {
                s = hnorm;
            }
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = czero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            eig[hi] = h[(hi, hi)];
            hi -= 1;
            its = 0;
            continue;
        }
        if l + 1 == hi {
            let (a, b) = eig2(h[(l, l)], h[(l, hi)], h[(hi, l)], h[(hi, hi)]);
            eig[l] = a;
            eig[hi] = b;
            if l == 0 {
                break;
            }
            hi = l - 1;
            its = 0;
            continue;
        }
        its += 1;
        if its > QR_ITERS_PER_VALUE {
            let partial = h[(hi, hi - 1)].norm();
            return Err(LabError::numeric(
                format!("shifted QR did not converge ({} of {n} eigenvalues found)", n - 1 - hi),
                partial.as_f64(),
            ));
        }
        let mu = if its % 10 == 0 {
            // exceptional shift
            h[(hi, hi)] + cplx(T::lit(0.75) * h[(hi, hi - 1)].norm(), T::zero())
        } else {
            let (a, b) = eig2(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)]);
            let d = h[(hi, hi)];
            if (a - d).norm() <= (b - d).norm() {
                a
            } else {
                b
            }
        };
        for i in l..=hi {
            h[(i, i)] = h[(i, i)] - mu;
        }
        let mut rots = Vec::with_capacity(hi - l);
        for k in l..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..=hi {
                let x = h[(k, j)];
                let y = h[(k + 1, j)];
                h[(k, j)] = x.scale(c) + s * y;
                h[(k + 1, j)] = -s.conj() * x + y.scale(c);
            }
            h[(k + 1, k)] = czero();
            rots.push((c, s));
        }
        for (t, (c, s)) in rots.into_iter().enumerate() {
            let k = l + t;
            let top = (k + 2).min(hi);
            for i in l..=top {
                let x = h[(i, k)];
                let y = h[(i, k + 1)];
                h[(i, k)] = x.scale(c) + y * s.conj();
                h[(i, k + 1)] = -x * s + y.scale(c);
            }
        }
        for i in l..=hi {
            h[(i, i)] = h[(i, i)] + mu;
        }
    }
    Ok(eig)
}

/// All eigenvalues with multiplicity, sorted by descending modulus (ties by re, then im).
pub fn eigenvalues<T: Real>(a: &ComplexMatrix<T>) -> Result<Vec<Complex<T>>> {
    check_square(a)?;
    let mut ev = hessenberg_qr(hessenberg_reduce(a))?;
    ev.sort_by(descending_modulus_order);
    Ok(ev)
}

fn check_square<T: Real>(a: &ComplexMatrix<T>) -> Result<()> {
    if !a.is_square() || a.is_empty() {
        return Err(LabError::invalid(format!(
            "expected a non-empty square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_finite() {
        return Err(LabError::invalid("matrix has non-finite entries"));
    }
    Ok(())
}

/// `‖Av − λv‖`.
pub fn residual<T: Real>(a: &ComplexMatrix<T>, lambda: Complex<T>, v: &[Complex<T>]) -> T {
    let av = a.mul_vec(v);
    let r: Vec<Complex<T>> = av.iter().zip(v).map(|(x, y)| *x - lambda * *y).collect();
    vec_norm(&r)
}

/// Rotates `v` so that its largest entry (first one on ties) is real positive.
pub fn normalize_phase<T: Real>(v: &mut [Complex<T>]) {
    let big = v.iter().fold(T::zero(), |m, z| m.max(z.norm()));
    if big == T::zero() {
        return;
    }
    let cut = big * (T::one() - T::lit(1e-10));
    if let Some(p) = v.iter().find(|z| z.norm() >= cut).copied() {
        let ph = p.unscale(p.norm()).conj();
        for z in v.iter_mut() {
            *z = *z * ph;
        }
    }
}

fn start_vector<T: Real>(n: usize) -> Vec<Complex<T>> {
    (0..n)
        .map(|i| {
            let t = i as f64;
            cplx(T::lit(1.0 + 0.5 * (0.7 * t + 0.3).cos()), T::lit(0.5 * (1.3 * t + 0.1).sin()))
        })
        .collect()
}

/// Inverse iteration for the eigenvalue `lambda`, keeping iterates orthogonal
/// to `against`. Returns the unit vector with its residual.
pub fn inverse_iteration<T: Real>(
    a: &ComplexMatrix<T>,
    lambda: Complex<T>,
    against: &[Vec<Complex<T>>],
    tol: T,
) -> Result<(Vec<Complex<T>>, T)> {
    let n = a.rows();
    let scale = a.frobenius_norm().max(T::one());
    let lu = Lu::factor_regularized(&a.shifted(lambda), T::epsilon() * scale)?;
    let mut x = start_vector::<T>(n);
    orthogonalize(&mut x, against);
    let mut best: Option<(Vec<Complex<T>>, T)> = None;
    for _ in 0..INVERSE_ITERATION_STEPS {
        let nx = vec_norm(&x);
        if nx == T::zero() || !nx.is_finite() {
            break;
        }
        for z in x.iter_mut() {
            *z = z.unscale(nx);
        }
        let mut y = lu.solve(&x)?;
        orthogonalize(&mut y, against);
        let ny = vec_norm(&y);
        if ny == T::zero() || !ny.is_finite() {
            break;
        }
        for z in y.iter_mut() {
            *z = z.unscale(ny);
        }
        let r = residual(a, lambda, &y);
        let better = best.as_ref().map_or(true, |(_, rb)| r < *rb);
        if better {
            best = Some((y.clone(), r));
        }
        if r <= tol {
            break;
        }
        x = y;
    }
    best.ok_or_else(|| LabError::numeric("inverse iteration produced no usable iterate", f64::NAN))
}

fn orthogonalize<T: Real>(x: &mut [Complex<T>], against: &[Vec<Complex<T>>]) {
    for _ in 0..2 {
        for q in against {
            let c = dot(q, x);
            for (xi, qi) in x.iter_mut().zip(q) {
                *xi = *xi - c * *qi;
            }
        }
    }
}

/// Groups values by single linkage at distance `tol`. Clusters are returned in
/// order of their first member.
pub fn cluster_values<T: Real>(values: &[Complex<T>], tol: T) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if (values[i] - values[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut root_slot: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        match root_slot[r] {
            Some(s) => clusters[s].push(i),
            None => {
                root_slot[r] = Some(clusters.len());
                clusters.push(vec![i]);
            }
        }
    }
    clusters
}

/// Mean of the listed values.
pub fn centroid<T: Real>(values: &[Complex<T>], idx: &[usize]) -> Complex<T> {
    let s = idx.iter().fold(czero(), |s, &i| s + values[i]);
    s.unscale(T::lit(idx.len() as f64))
}

/// A cluster of eigenvalues together with an orthonormal basis of the
/// (numerical) eigenspace at its centroid.
#[derive(Clone, Debug)]
pub struct Eigenspace<T: Real> {
    pub value: Complex<T>,
    pub multiplicity: usize,
    pub basis: Vec<Vec<Complex<T>>>,
}

/// Eigenspaces per eigenvalue cluster. The basis is the SVD null space of
/// `A − λI` at the centroid (singular values ≤ `tol`); when that is empty,
/// inverse iteration on each member supplies the vectors.
pub fn eigenspaces<T: Real>(a: &ComplexMatrix<T>, tol: T, cluster_tol: T) -> Result<Vec<Eigenspace<T>>> {
    let values = eigenvalues(a)?;
    let clusters = cluster_values(&values, cluster_tol);
    let mut out = Vec::with_capacity(clusters.len());
    for idx in clusters {
        let lambda = centroid(&values, &idx);
        let m = idx.len();
        let s = svd(&a.shifted(lambda))?;
        let n = a.rows();
        let mut basis: Vec<Vec<Complex<T>>> = Vec::new();
        for j in (0..n).rev() {
            if basis.len() == m || s.singular_values[j] > tol {
                break;
            }
            basis.push(s.right.column(j));
        }
        if basis.is_empty() {
            for &i in &idx {
                let (v, r) = inverse_iteration(a, values[i], &basis, tol)?;
                if r <= tol || basis.is_empty() {
                    basis.push(v);
                }
            }
            basis = gram_schmidt(&basis);
        }
        for v in basis.iter_mut() {
            normalize_phase(v);
        }
        out.push(Eigenspace { value: lambda, multiplicity: m, basis });
    }
    Ok(out)
}

/// Default residual tolerance `1e-9·max(1, ‖A‖)`.
pub fn default_tol<T: Real>(a: &ComplexMatrix<T>) -> Result<T> {
    Ok(T::tol(DEFAULT_EIGEN_TOL) * operator_norm(a)?.max(T::one()))
}

/// `n` eigenpairs (with multiplicity) in descending-modulus order. Within a
/// cluster the eigenspace basis is handed out in turn; a defective cluster
/// repeats its directions.
pub fn eigenpairs<T: Real>(a: &ComplexMatrix<T>, tol: T) -> Result<Vec<EigenPair<T>>> {
    check_square(a)?;
    let scale = operator_norm(a)?.max(T::one());
    let values = eigenvalues(a)?;
    let clusters = cluster_values(&values, T::tol(DEFAULT_CLUSTER_TOL) * scale);
    let mut pairs: Vec<Option<EigenPair<T>>> = vec![None; values.len()];
    for idx in clusters {
        let lambda_c = centroid(&values, &idx);
        let s = svd(&a.shifted(lambda_c))?;
        let n = a.rows();
        let mut basis: Vec<Vec<Complex<T>>> = Vec::new();
        for j in (0..n).rev() {
            if basis.len() == idx.len() || s.singular_values[j] > tol {
                break;
            }
            basis.push(s.right.column(j));
        }
        let mut found: Vec<Vec<Complex<T>>> = Vec::new();
        for (slot, &i) in idx.iter().enumerate() {
            let lambda = values[i];
            let mut v = if !basis.is_empty() {
                basis[slot % basis.len()].clone()
            } else {
                let (v, r) = inverse_iteration(a, lambda, &found, tol)?;
                if r <= tol {
                    found.push(v.clone());
                    v
                } else if let Some(first) = found.first() {
                    first.clone()
                } else {
                    v
                }
            };
            normalize_phase(&mut v);
            let mut r = residual(a, lambda, &v);
            if r > tol {
                // refine against the member value itself
                let (w, rw) = inverse_iteration(a, lambda, &[], tol)?;
                if rw < r {
                    v = w;
                    normalize_phase(&mut v);
                    r = rw;
                }
            }
            if r > tol {
                return Err(LabError::numeric(
                    format!("eigenvector for {lambda} misses residual tolerance"),
                    r.as_f64(),
                ));
            }
            pairs[i] = Some(EigenPair { value: lambda, vector: v, residual: r });
        }
    }
    Ok(pairs.into_iter().map(|p| p.expect("every index clustered")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = ComplexMatrix<f64>;

    fn c(re: f64, im: f64) -> Complex<f64> {
        cplx(re, im)
    }

    #[test]
    fn diagonal_eigenpairs() {
        let a = M::from_diag(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let p = eigenpairs(&a, 1e-9 * 3.0).unwrap();
        let vals: Vec<_> = p.iter().map(|e| e.value).collect();
        assert_eq!(vals, vec![c(3.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]);
        for (k, e) in p.iter().enumerate() {
            let idx = 2 - k;
            assert!((e.vector[idx].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn example_square_root_pair() {
        let eps = 1e-4;
        let a = M::from_real_rows(&[&[0.0, eps], &[1.0, 0.0]]);
        let ev = eigenvalues(&a).unwrap();
        assert!((ev[0] - c(1e-2, 0.0)).norm() < 1e-16);
        assert!((ev[1] - c(-1e-2, 0.0)).norm() < 1e-16);
        let p = eigenpairs(&a, 1e-9).unwrap();
        assert!(p.iter().all(|e| e.residual <= 1e-9));
    }

    #[test]
    fn defective_pair_has_unique_direction() {
        let eps = 1e-3;
        let a = M::from_real_rows(&[&[2.0, 0.0], &[eps, 2.0]]);
        let p = eigenpairs(&a, 2e-9).unwrap();
        for e in &p {
            assert_eq!(e.value, c(2.0, 0.0));
            assert!(e.vector[0].norm() < 1e-12);
            assert!((e.vector[1] - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn derogatory_cluster_gets_independent_vectors() {
        let a = M::from_diag(&[c(2.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]);
        let p = eigenpairs(&a, 1e-8).unwrap();
        let v1 = &p[1].vector;
        let v2 = &p[2].vector;
        assert!(dot(v1, v2).norm() < 1e-12);
    }

    #[test]
    fn triangular_hessenberg_reduction_is_identity() {
        let a = M::from_fn(4, 4, |i, j| if j >= i { c((i + 2 * j) as f64, 1.0) } else { czero() });
        assert_eq!(hessenberg_reduce(&a), a);
    }

    #[test]
    fn random_matrix_eigenvalues_trace_and_residuals() {
        let a = M::from_fn(7, 7, |i, j| c(((i * 7 + j) as f64 * 0.37).sin(), ((i + 3 * j) as f64).cos()));
        let ev = eigenvalues(&a).unwrap();
        let tr: Complex<f64> = (0..7).fold(czero(), |s, i| s + a[(i, i)]);
        let sum = ev.iter().fold(czero(), |s, z| s + *z);
        assert!((tr - sum).norm() < 1e-12);
        let tol = default_tol(&a).unwrap();
        for p in eigenpairs(&a, tol).unwrap() {
            assert!(p.residual <= tol);
            assert!((vec_norm(&p.vector) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hessenberg_reduction_preserves_spectrum_shape() {
        let a = M::from_fn(5, 5, |i, j| c((i as f64 - j as f64).powi(2), (i * j) as f64 * 0.1));
        let h = hessenberg_reduce(&a);
        for i in 0..5 {
            for j in 0..5 {
                if i > j + 1 {
                    assert_eq!(h[(i, j)], czero());
                }
            }
        }
        assert!((h.frobenius_norm() - a.frobenius_norm()).abs() < 1e-12);
    }

    #[test]
    fn nilpotent_and_jordan_blocks() {
        let j3 = M::from_fn(3, 3, |i, j| if j == i + 1 { c(1.0, 0.0) } else { czero() });
        let ev = eigenvalues(&j3).unwrap();
        assert!(ev.iter().all(|z| z.norm() == 0.0));
        let sp = eigenspaces(&j3, 1e-9, 1e-6).unwrap();
        assert_eq!(sp.len(), 1);
        assert_eq!(sp[0].basis.len(), 1);
    }

    #[test]
    fn clustering_is_single_linkage() {
        let v = [c(0.0, 0.0), c(0.5, 0.0), c(1.0, 0.0), c(5.0, 0.0)];
        let cl = cluster_values(&v, 0.6);
        assert_eq!(cl, vec![vec![0, 1, 2], vec![3]]);
    }
}
