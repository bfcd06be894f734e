//! Jordan structure from rank sequences, Gohberg-Kaashoek numbers and their
//! duals, the block-size change under one deflation step, and re-basing a
//! Jordan basis on a prescribed eigenvector.
//!
//! All block-size sequences are stored non-increasing.

use num_complex::Complex;

use crate::eigen::{centroid, cluster_values, eigenvalues};
use crate::error::{LabError, Result};
use crate::linalg::{svd, vec_norm, ComplexMatrix, Lu, DEFAULT_RANK_TOL};
use crate::scalar::{descending_modulus_order, Real};

pub use crate::eigen::DEFAULT_CLUSTER_TOL;

/// Nullities `dₖ = n − rank((A − λI)ᵏ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nullities {
    pub values: Vec<usize>,
    /// some rank decision was within a factor 10 of the threshold
    pub uncertain: bool,
}

/// `dₖ` for `k = 1, 2, …` until the sequence stops growing.
pub fn weyr_nullities<T: Real>(a: &ComplexMatrix<T>, lambda: Complex<T>, rank_tol: T) -> Result<Nullities> {
    weyr_nullities_capped(a, lambda, rank_tol, a.rows())
}

/// As [`weyr_nullities`], also stopping once `dₖ` reaches `cap`
/// (the algebraic multiplicity when known).
pub fn weyr_nullities_capped<T: Real>(
    a: &ComplexMatrix<T>,
    lambda: Complex<T>,
    rank_tol: T,
    cap: usize,
) -> Result<Nullities> {
    if !a.is_square() || a.is_empty() {
        return Err(LabError::invalid("weyr_nullities needs a non-empty square matrix"));
    }
    if rank_tol < T::zero() {
        return Err(LabError::invalid("rank tolerance must be non-negative"));
    }
    let n = a.rows();
    let shifted = a.shifted(lambda);
    let mut power = shifted.clone();
    let mut values: Vec<usize> = Vec::new();
    let mut uncertain = false;
    for k in 1..=n {
        if k > 1 {
            power = power.matmul(&shifted);
        }
        let s = svd(&power)?;
        uncertain |= s.rank_is_ambiguous(rank_tol);
        let d = n - s.rank(rank_tol);
        if let Some(&prev) = values.last() {
            if d <= prev {
                break;
            }
        }
        values.push(d);
        if d == 0 || d >= cap.min(n) {
            break;
        }
    }
    Ok(Nullities { values, uncertain })
}

/// Block sizes (non-increasing) from nullities: the number of blocks of size
/// at least `k` is `dₖ − dₖ₋₁`.
pub fn block_sizes_from_nullities(d: &[usize]) -> Result<Vec<usize>> {
    let mut inc = Vec::with_capacity(d.len());
    let mut prev = 0usize;
    for (k, &x) in d.iter().enumerate() {
        if x < prev {
            return Err(LabError::invalid(format!("nullities decrease at position {}", k + 1)));
        }
        inc.push(x - prev);
        prev = x;
    }
    if inc.windows(2).any(|w| w[1] > w[0]) {
        return Err(LabError::invalid(format!(
            "nullity increments {inc:?} are not non-increasing; rank tolerance is probably wrong"
        )));
    }
    let mut sizes = Vec::new();
    for k in (0..inc.len()).rev() {
        let next = inc.get(k + 1).copied().unwrap_or(0);
        for _ in 0..(inc[k] - next) {
            sizes.push(k + 1);
        }
    }
    Ok(sizes)
}

/// Dual sequence `kᵢ = max{l : m_l ≥ i}` (0 when no such `l`), padded to `m.len()`.
pub fn dual_sequence(m: &[usize]) -> Result<Vec<usize>> {
    let n = m.len();
    if m.windows(2).any(|w| w[1] > w[0]) {
        return Err(LabError::invalid(format!("sequence {m:?} is not non-increasing")));
    }
    if let Some(x) = m.iter().find(|x| **x > n) {
        return Err(LabError::invalid(format!("entry {x} exceeds the sequence length {n}")));
    }
    Ok((1..=n).map(|i| m.iter().filter(|&&x| x >= i).count()).collect())
}

#[derive(Clone, Debug, PartialEq)]
pub struct GkProfile<T> {
    /// cluster representatives (centroids), sorted by descending modulus
    pub eigenvalues: Vec<Complex<T>>,
    /// per-eigenvalue block sizes, non-increasing
    pub blocks: Vec<Vec<usize>>,
    /// `mᵢ(A) = Σ_λ mᵢ(A, λ)`, padded to length `n`
    pub aggregate_m: Vec<usize>,
    pub dual_k: Vec<usize>,
    /// rank or clustering decisions were borderline
    pub uncertain: bool,
}

impl<T> GkProfile<T> {
    /// Integer part of the profile: block sizes per eigenvalue plus the aggregates.
    pub fn same_structure(&self, other: &GkProfile<T>) -> bool {
        self.blocks == other.blocks && self.aggregate_m == other.aggregate_m && self.dual_k == other.dual_k
    }
}

/// Sums per-eigenvalue block lists into the aggregate GK sequence of length `n`.
pub fn aggregate(blocks: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut m = vec![0usize; n];
    for b in blocks {
        for (i, s) in b.iter().enumerate() {
            if i < n {
                m[i] += s;
            }
        }
    }
    m
}

/// Jordan structure of `a`: eigenvalues clustered by single linkage at
/// `cluster_tol`, block sizes from the nullities at each centroid.
pub fn gk_profile<T: Real>(a: &ComplexMatrix<T>, cluster_tol: T, rank_tol: T) -> Result<GkProfile<T>> {
    if cluster_tol < T::zero() || rank_tol < T::zero() {
        return Err(LabError::invalid("tolerances must be non-negative"));
    }
    let n = a.rows();
    let values = eigenvalues(a)?;
    let clusters = cluster_values(&values, cluster_tol);
    let mut reps: Vec<(Complex<T>, usize)> = clusters.iter().map(|c| (centroid(&values, c), c.len())).collect();
    reps.sort_by(|x, y| descending_modulus_order(&x.0, &y.0));

    let mut uncertain = false;
    for i in 0..reps.len() {
        for j in (i + 1)..reps.len() {
            if (reps[i].0 - reps[j].0).norm() <= T::lit(2.0) * cluster_tol {
                uncertain = true;
            }
        }
    }
    let mut blocks = Vec::with_capacity(reps.len());
    for (lambda, mult) in &reps {
        let d = weyr_nullities_capped(a, *lambda, rank_tol, *mult)?;
        uncertain |= d.uncertain;
        let sizes = match block_sizes_from_nullities(&d.values) {
            Ok(s) => s,
            Err(_) => {
                uncertain = true;
                vec![]
            }
        };
        if sizes.iter().sum::<usize>() != *mult {
            uncertain = true;
        }
        blocks.push(sizes);
    }
    let aggregate_m = aggregate(&blocks, n);
    let dual_k = dual_sequence(&aggregate_m).unwrap_or_else(|_| {
        uncertain = true;
        vec![0; n]
    });
    Ok(GkProfile {
        eigenvalues: reps.into_iter().map(|r| r.0).collect(),
        blocks,
        aggregate_m,
        dual_k,
        uncertain,
    })
}

/// Default-tolerance variant of [`gk_profile`].
pub fn gk_profile_default<T: Real>(a: &ComplexMatrix<T>) -> Result<GkProfile<T>> {
    gk_profile(a, T::tol(DEFAULT_CLUSTER_TOL), T::lit(DEFAULT_RANK_TOL))
}

/// Block sizes after deflating the head of chain `l` of eigenvalue `t`
/// (both 0-based). The chain loses one vector; when it sits in a run of equal
/// sizes the shortening lands on the last member of the run. Zero sizes are
/// dropped; an eigenvalue whose list empties keeps an empty entry.
pub fn predict_deflation(blocks: &[Vec<usize>], t: usize, l: usize) -> Result<Vec<Vec<usize>>> {
    let sizes = blocks
        .get(t)
        .ok_or_else(|| LabError::invalid(format!("eigenvalue index {t} out of range ({} eigenvalues)", blocks.len())))?;
    if l >= sizes.len() {
        return Err(LabError::invalid(format!(
            "chain index {l} out of range ({} chains for eigenvalue {t})",
            sizes.len()
        )));
    }
    if sizes.windows(2).any(|w| w[1] > w[0]) || sizes.contains(&0) {
        return Err(LabError::invalid(format!("block sizes {sizes:?} must be positive and non-increasing")));
    }
    let mut out = blocks.to_vec();
    let ml = sizes[l];
    let next = sizes.get(l + 1).copied().unwrap_or(0);
    let new_t: Vec<usize> = if ml > next {
        // strict gap: m_l drops by one, everything else stays
        let mut s = sizes.clone();
        s[l] -= 1;
        s
    } else {
        // tie run m_l = … = m_{j*}: shift the run and shorten its last member
        let j_star = (l..sizes.len()).take_while(|&j| sizes[j] == ml).last().unwrap_or(l);
        let mut s = sizes.clone();
        for j in l..j_star {
            s[j] = sizes[j + 1];
        }
        s[j_star] = ml - 1;
        s
    };
    out[t] = new_t.into_iter().filter(|&s| s > 0).collect();
    Ok(out)
}

/// One Jordan chain `f₀, …, f_{len−1}` stored in consecutive columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Chain<T> {
    pub eigenvalue: Complex<T>,
    pub start: usize,
    pub len: usize,
}

/// Invertible matrix whose columns are Jordan chains of some `A`.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanBasis<T: Real> {
    matrix: ComplexMatrix<T>,
    chains: Vec<Chain<T>>,
}

/// Tolerance on `(A − λI)f₀ = 0`, `(A − λI)fᵢ = fᵢ₋₁`.
pub const CHAIN_TOL: f64 = 1e-8;

impl<T: Real> JordanBasis<T> {
    /// Checks the chain relations against `a` and invertibility.
    pub fn new(a: &ComplexMatrix<T>, matrix: ComplexMatrix<T>, chains: Vec<Chain<T>>) -> Result<Self> {
        let n = a.rows();
        if !a.is_square() || matrix.rows() != n || matrix.cols() != n {
            return Err(LabError::dims(format!("{n}x{n} basis"), format!("{}x{}", matrix.rows(), matrix.cols())));
        }
        let mut covered = vec![false; n];
        for c in &chains {
            if c.len == 0 || c.start + c.len > n {
                return Err(LabError::invalid("chain exceeds the basis"));
            }
            for i in c.start..c.start + c.len {
                if covered[i] {
                    return Err(LabError::invalid("chains overlap"));
                }
                covered[i] = true;
            }
        }
        if covered.iter().any(|c| !c) {
            return Err(LabError::invalid("chains do not cover every column"));
        }
        let tol = T::tol(CHAIN_TOL);
        for c in &chains {
            let shifted = a.shifted(c.eigenvalue);
            for i in 0..c.len {
                let img = shifted.mul_vec(&matrix.column(c.start + i));
                let err = if i == 0 {
                    vec_norm(&img)
                } else {
                    vec_norm(&crate::linalg::vec_sub(&img, &matrix.column(c.start + i - 1)))
                };
                if err > tol {
                    return Err(LabError::invalid(format!(
                        "column {} breaks the chain relation (error {err})",
                        c.start + i
                    )));
                }
            }
        }
        let s = crate::linalg::singular_values(&matrix)?;
        if s[n - 1] <= tol * s[0] {
            return Err(LabError::invalid("Jordan basis is not invertible"));
        }
        Ok(JordanBasis { matrix, chains })
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.matrix
    }

    pub fn chains(&self) -> &[Chain<T>] {
        &self.chains
    }

    pub fn chain_vectors(&self, idx: usize) -> Vec<Vec<Complex<T>>> {
        let c = &self.chains[idx];
        (c.start..c.start + c.len).map(|j| self.matrix.column(j)).collect()
    }
}

/// A Jordan basis of `a` that contains the eigenvector `x` as a chain head.
///
/// `x` is expanded in `basis`; among the chains of its eigenvalue (ordered by
/// non-increasing length) the last one with a non-zero head coefficient is
/// replaced by the chain generated from `x`, which has the same length.
pub fn jordan_basis_including<T: Real>(
    a: &ComplexMatrix<T>,
    basis: &JordanBasis<T>,
    x: &[Complex<T>],
) -> Result<JordanBasis<T>> {
    let n = a.rows();
    if x.len() != n {
        return Err(LabError::dims(format!("vector of length {n}"), format!("length {}", x.len())));
    }
    let nx = vec_norm(x);
    if nx == T::zero() {
        return Err(LabError::invalid("zero vector is not an eigenvector"));
    }
    let tol = T::tol(CHAIN_TOL);
    let lambda = crate::linalg::dot(x, &a.mul_vec(x)).unscale(nx * nx);
    let res = crate::eigen::residual(a, lambda, x);
    if res > tol * nx {
        return Err(LabError::invalid(format!("x is not an eigenvector (residual {res})")));
    }
    let cluster = T::tol(DEFAULT_CLUSTER_TOL) * T::one().max(lambda.norm());
    let mut own: Vec<usize> = (0..basis.chains.len())
        .filter(|&i| (basis.chains[i].eigenvalue - lambda).norm() <= cluster.max(T::lit(1e-6)))
        .collect();
    if own.is_empty() {
        return Err(LabError::invalid(format!("eigenvalue {lambda} of x is not represented in the basis")));
    }
    own.sort_by(|&i, &j| basis.chains[j].len.cmp(&basis.chains[i].len).then(i.cmp(&j)));

    let coeff = Lu::factor(&basis.matrix)?.solve(x)?;
    let scale = own.iter().fold(T::zero(), |m, &i| m.max(coeff[basis.chains[i].start].norm()));
    if scale == T::zero() {
        return Err(LabError::invalid("x has no component on the eigenvectors of its eigenvalue"));
    }
    let cut = T::lit(1e-8) * scale;
    let active: Vec<usize> = own
        .iter()
        .copied()
        .filter(|&i| coeff[basis.chains[i].start].norm() > cut)
        .collect();
    let target = *active.last().expect("scale > 0");
    let tc = &basis.chains[target];
    let mut matrix = basis.matrix.clone();
    for i in 0..tc.len {
        let mut g = vec![Complex::new(T::zero(), T::zero()); n];
        for &j in &active {
            let cj = &basis.chains[j];
            let alpha = coeff[cj.start];
            let f = basis.matrix.column(cj.start + i);
            for (gi, fi) in g.iter_mut().zip(&f) {
                *gi = *gi + alpha * *fi;
            }
        }
        if i == 0 {
            g = x.to_vec();
        }
        matrix.set_column(tc.start + i, &g);
    }
    JordanBasis::new(a, matrix, basis.chains.clone())
}

/// Jordan matrix `⊕ J_{sizes}(λ)` with blocks in the given order.
pub fn jordan_matrix<T: Real>(blocks: &[(Complex<T>, usize)]) -> ComplexMatrix<T> {
    let n: usize = blocks.iter().map(|b| b.1).sum();
    let mut j = ComplexMatrix::zeros(n, n);
    let mut off = 0;
    for (lambda, size) in blocks {
        for i in 0..*size {
            j[(off + i, off + i)] = *lambda;
            if i + 1 < *size {
                j[(off + i, off + i + 1)] = Complex::new(T::one(), T::zero());
            }
        }
        off += size;
    }
    j
}
