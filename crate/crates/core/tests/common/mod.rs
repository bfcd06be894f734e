#![allow(dead_code)]

use num_complex::Complex;
use proptest::test_runner::{Config, TestCaseError, TestRng, TestRunner};
use rand::Rng;
use schurlab::gaps::{gap, intersect, orthocomplement, semigap, Subspace};
use schurlab::jordan::{gk_profile, jordan_matrix, predict_deflation};
use schurlab::lab::{ginibre, haar_unitary, rng_from_seed};
use schurlab::{hessenberg_from_first_column, CMatrix, C64};

pub const LABELS: [(f64, f64); 4] = [(0.0, 0.0), (4.0, 0.0), (-4.0, 0.0), (0.0, 4.0)];

pub fn c(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// Partitions of `n` into non-increasing parts.
pub fn partitions(n: usize) -> Vec<Vec<usize>> {
    fn go(n: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for p in (1..=n.min(max)).rev() {
            cur.push(p);
            go(n - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Every Jordan structure of order ≤ `n_max` over up to four eigenvalues,
/// as block-size lists per eigenvalue of [`LABELS`].
pub fn jordan_patterns(n_max: usize) -> Vec<Vec<Vec<usize>>> {
    fn compositions(n: usize, parts: usize) -> Vec<Vec<usize>> {
        if parts == 1 {
            return vec![vec![n]];
        }
        let mut out = Vec::new();
        for first in 1..=(n - parts + 1) {
            for mut rest in compositions(n - first, parts - 1) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
    let mut out = Vec::new();
    for n in 1..=n_max {
        for r in 1..=n.min(LABELS.len()) {
            for comp in compositions(n, r) {
                let mut acc: Vec<Vec<Vec<usize>>> = vec![vec![]];
                for &m in &comp {
                    let mut next = Vec::new();
                    for prefix in &acc {
                        for p in partitions(m) {
                            let mut v = prefix.clone();
                            v.push(p);
                            next.push(v);
                        }
                    }
                    acc = next;
                }
                out.extend(acc);
            }
        }
    }
    out
}

/// Deflates the head of chain `l` of eigenvalue `t` from a unitarily
/// disguised Jordan matrix and returns (predicted, observed) block lists,
/// observed ones reordered to the labels of `blocks`.
pub fn deflation_case(blocks: &[Vec<usize>], t: usize, l: usize, seed: u64) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut order: Vec<(C64, usize)> = vec![(c(LABELS[t].0, LABELS[t].1), blocks[t][l])];
    for (e, sizes) in blocks.iter().enumerate() {
        for (j, &s) in sizes.iter().enumerate() {
            if (e, j) != (t, l) {
                order.push((c(LABELS[e].0, LABELS[e].1), s));
            }
        }
    }
    let j = jordan_matrix(&order);
    let n = j.rows();
    let q: CMatrix = haar_unitary(n, &mut rng_from_seed(seed));
    let b = q.matmul(&j).matmul(&q.adjoint());
    let x = q.column(0);
    let h = hessenberg_from_first_column(&x).unwrap();
    let cm = h.adjoint().matmul(&b).matmul(&h);
    let predicted = predict_deflation(blocks, t, l).unwrap();
    if n == 1 {
        return (predicted, vec![vec![]]);
    }
    let trailing = cm.block(1, 1, n - 1, n - 1);
    let prof = gk_profile(&trailing, 0.1, 1e-8).unwrap();
    let mut observed = vec![Vec::new(); blocks.len()];
    for (value, sizes) in prof.eigenvalues.iter().zip(&prof.blocks) {
        let label = LABELS
            .iter()
            .position(|&(re, im)| (c(re, im) - value).norm() < 0.5)
            .expect("eigenvalue near a label");
        observed[label] = sizes.clone();
    }
    (predicted, observed)
}

pub fn random_subspace(n: usize, k: usize, rng: &mut impl Rng) -> Subspace<f64> {
    let g: CMatrix = ginibre(n, k, rng);
    let cols: Vec<Vec<C64>> = (0..k).map(|j| g.column(j)).collect();
    Subspace::span(n, &cols).unwrap()
}

/// Small rotation of `m`: each basis vector moved by `size` in a random direction.
pub fn nearby_subspace(m: &Subspace<f64>, size: f64, rng: &mut impl Rng) -> Subspace<f64> {
    let n = m.ambient();
    let g: CMatrix = ginibre(n, m.dim(), rng);
    let cols: Vec<Vec<C64>> = (0..m.dim())
        .map(|j| {
            let b = m.basis().column(j);
            let e = g.column(j);
            b.iter().zip(&e).map(|(x, y)| x + y * size).collect()
        })
        .collect();
    Subspace::span(n, &cols).unwrap()
}

/// Random pair in ℂⁿ: `mode` 0 independent, 1 nearby, 2 nested (`N ⊂ M` or `M ⊂ N`),
/// 3 with `M` meeting `N⊥`.
pub fn subspace_pair(n: usize, seed: u64) -> (Subspace<f64>, Subspace<f64>, u64) {
    let mut rng = rng_from_seed(seed);
    let mode = rng.random_range(0..4u64);
    let dm = rng.random_range(0..=n);
    match mode {
        0 => {
            let dn = rng.random_range(0..=n);
            (random_subspace(n, dm, &mut rng), random_subspace(n, dn, &mut rng), mode)
        }
        1 => {
            let m = random_subspace(n, dm, &mut rng);
            let nn = nearby_subspace(&m, 1e-3, &mut rng);
            (m, nn, mode)
        }
        2 => {
            let big = random_subspace(n, dm.max(1), &mut rng);
            let k = rng.random_range(0..=big.dim());
            let small = Subspace::span(n, &big.vectors()[..k]).unwrap();
            if rng.random_bool(0.5) {
                (big, small, mode)
            } else {
                (small, big, mode)
            }
        }
        _ => {
            let nn = random_subspace(n, rng.random_range(1..n), &mut rng);
            let perp = orthocomplement(&nn);
            let mut vecs = vec![perp.vectors()[0].clone()];
            let extra: CMatrix = ginibre(n, rng.random_range(0..n), &mut rng);
            vecs.extend((0..extra.cols()).map(|j| extra.column(j)));
            (Subspace::span(n, &vecs).unwrap(), nn, mode)
        }
    }
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// The gap/semigap identities on one pair, tolerance 1e-10.
pub fn gap_identities(m: &Subspace<f64>, nn: &Subspace<f64>, rng: &mut impl Rng) -> Result<(), String> {
    const TOL: f64 = 1e-10;
    let g = gap(m, nn).unwrap();
    let s_mn = semigap(m, nn).unwrap();
    let s_nm = semigap(nn, m).unwrap();
    let (mp, np) = (orthocomplement(m), orthocomplement(nn));

    // gap is the larger semigap
    check((g - s_mn.max(s_nm)).abs() <= TOL, || format!("gap {g} vs semigaps {s_mn}, {s_nm}"))?;
    // both at most one
    check(g <= 1.0 + TOL && s_mn <= 1.0 + TOL, || format!("gap {g} or semigap {s_mn} above 1"))?;
    // larger into smaller is exactly one
    if m.dim() > nn.dim() {
        check((s_mn - 1.0).abs() <= TOL, || format!("dim {} > {} but semigap {s_mn}", m.dim(), nn.dim()))?;
    }
    // semigap < 1 iff M meets N⊥ only in 0
    let meet = intersect(m, &np, 1e-6).unwrap().dim();
    check((s_mn < 1.0 - 1e-6) == (meet == 0), || format!("semigap {s_mn} with M ∩ N⊥ of dim {meet}"))?;
    // orthocomplements swap roles
    let g_perp = gap(&np, &mp).unwrap();
    check((g - g_perp).abs() <= TOL, || format!("gap {g} vs complement gap {g_perp}"))?;
    let s_perp = semigap(&np, &mp).unwrap();
    check((s_mn - s_perp).abs() <= TOL, || format!("semigap {s_mn} vs complement semigap {s_perp}"))?;
    // equal dimensions: every x has a partner within gap·‖x‖; else gap is one
    if m.dim() == nn.dim() {
        if m.dim() > 0 {
            let coeff: CMatrix = ginibre(m.dim(), 1, rng);
            let x = m.basis().mul_vec(&coeff.column(0));
            let y = nn.project(&x);
            let d = schurlab::vec_norm(&schurlab::vec_sub(&x, &y));
            check(d <= g * schurlab::vec_norm(&x) + TOL, || format!("distance {d} exceeds gap {g}"))?;
        }
    } else {
        check((g - 1.0).abs() <= TOL, || format!("dims {} ≠ {} but gap {g}", m.dim(), nn.dim()))?;
    }
    // monotone in the second argument, antitone in the first
    if nn.dim() > 0 {
        let k = nn.dim() / 2;
        let n1 = Subspace::span(nn.ambient(), &nn.vectors()[..k]).unwrap();
        let a = semigap(m, nn).unwrap();
        let b = semigap(m, &n1).unwrap();
        check(a <= b + TOL, || format!("θ₀(M, N₂) = {a} > θ₀(M, N₁) = {b}"))?;
        let a = semigap(&n1, m).unwrap();
        let b = semigap(nn, m).unwrap();
        check(a <= b + TOL, || format!("θ₀(N₁, M) = {a} > θ₀(N₂, M) = {b}"))?;
    }
    Ok(())
}

/// Runs `f` over `cases` seeds drawn by a deterministic proptest runner.
pub fn for_seeds(cases: u32, f: impl Fn(u64) -> Result<(), String>) -> Result<(), String> {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let rng = TestRng::deterministic_rng(config.rng_algorithm);
    let mut runner = TestRunner::new_with_rng(config, rng);
    runner
        .run(&proptest::num::u64::ANY, |seed| f(seed).map_err(TestCaseError::fail))
        .map_err(|e| e.to_string())
}
