//! Independent reference implementations used by the integration tests.
//! Nothing here calls into the library's algorithms; only plain data
//! (edge lists, vectors) crosses over.
#![allow(dead_code)]

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        let scale: f64 = (0..n).map(|i| a[i][i] * a[i][i]).sum::<f64>().max(1e-300);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// P MᵀM P with P = I - J/n, as a dense matrix.
pub fn projected_gram(n: usize, edges: &[Vec<u32>]) -> Vec<Vec<f64>> {
    let mut g = vec![vec![0.0; n]; n];
    for e in edges {
        for &u in e {
            for &v in e {
                g[u as usize][v as usize] += 1.0;
            }
        }
    }
    let nf = n as f64;
    let row_mean: Vec<f64> = g.iter().map(|r| r.iter().sum::<f64>() / nf).collect();
    let total_mean = row_mean.iter().sum::<f64>() / nf;
    for i in 0..n {
        for j in 0..n {
            // G symmetric, so column means equal row means
            g[i][j] += total_mean - row_mean[i] - row_mean[j];
        }
    }
    g
}

/// √(λ_max(P MᵀM P)).
pub fn dense_restricted_norm(n: usize, edges: &[Vec<u32>]) -> f64 {
    jacobi_eigenvalues(projected_gram(n, edges))
        .into_iter()
        .fold(0.0, f64::max)
        .sqrt()
}

pub fn edge_sum(e: &[u32], chi: &[i8]) -> i64 {
    e.iter().map(|&v| chi[v as usize] as i64).sum()
}

pub fn disc(edges: &[Vec<u32>], chi: &[i8]) -> u64 {
    edges.iter().map(|e| edge_sum(e, chi).unsigned_abs()).max().unwrap_or(0)
}

/// min over all 2^n colorings.
pub fn brute_disc(n: usize, edges: &[Vec<u32>]) -> u64 {
    assert!(n <= 24);
    (0u64..1 << n)
        .map(|mask| {
            let chi: Vec<i8> = (0..n).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            disc(edges, &chi)
        })
        .min()
        .unwrap_or(0)
}

/// Bit masks of the C(n, n/2) balanced colorings (bit i set means χ_i = +1).
pub fn balanced_masks(n: usize) -> Vec<u64> {
    (0u64..1 << n).filter(|m| m.count_ones() as usize == n / 2).collect()
}

/// Even-weight 0/1 rows of length n as masks.
pub fn even_rows(n: usize) -> Vec<u64> {
    (0u64..1 << n).filter(|r| r.count_ones() % 2 == 0).collect()
}

fn good(row: u64, plus: u64) -> bool {
    // χ·r = |r ∩ plus| - |r \ plus|
    2 * (row & plus).count_ones() == row.count_ones()
}

/// Exact E[X] and E[X²] over every m-row even matrix, X = number of
/// balanced colorings orthogonal to every row.
pub fn moment_oracle(n: usize, m: usize) -> (BigRational, BigRational) {
    let cols = balanced_masks(n);
    let rows = even_rows(n);
    let words = cols.len().div_ceil(64);
    let good_sets: Vec<Vec<u64>> = rows
        .iter()
        .map(|&r| {
            let mut bits = vec![0u64; words];
            for (k, &c) in cols.iter().enumerate() {
                if good(r, c) {
                    bits[k / 64] |= 1 << (k % 64);
                }
            }
            bits
        })
        .collect();
    let mut full = vec![0u64; words];
    for k in 0..cols.len() {
        full[k / 64] |= 1 << (k % 64);
    }
    let mut sum = BigUint::from(0u32);
    let mut sum_sq = BigUint::from(0u32);
    let mut count = BigUint::from(0u32);
    let mut idx = vec![0usize; m];
    loop {
        let mut acc = full.clone();
        for &i in &idx {
            for (a, b) in acc.iter_mut().zip(&good_sets[i]) {
                *a &= b;
            }
        }
        let x: u64 = acc.iter().map(|w| w.count_ones() as u64).sum();
        sum += x;
        sum_sq += x * x;
        count += 1u32;
        // odometer over row choices
        let mut k = 0;
        while k < m {
            idx[k] += 1;
            if idx[k] < rows.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == m {
            break;
        }
    }
    let c = BigInt::from(count);
    (
        BigRational::new(BigInt::from(sum), c.clone()),
        BigRational::new(BigInt::from(sum_sq), c),
    )
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    let mut r = BigUint::from(1u32);
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Checks a walk's output against its stated guarantees: box, frozen
/// coordinates untouched, half of the free ones frozen, every set within
/// c_i √|M_i| + eps of its start value.
pub fn check_walk_output(
    sets: &[Vec<u32>],
    coeffs: &[f64],
    x0: &[f64],
    frozen0: &[bool],
    x: &[f64],
    delta: f64,
    eps: f64,
) -> Result<(), String> {
    let n = x0.len();
    if let Some(v) = x.iter().find(|v| !(-1.0..=1.0).contains(*v)) {
        return Err(format!("entry {v} outside the box"));
    }
    let free: Vec<usize> = (0..n)
        .filter(|&j| !frozen0[j] && x0[j].abs() < 1.0 - delta)
        .collect();
    for j in 0..n {
        if !free.contains(&j) && (x[j] - x0[j]).abs() > eps {
            return Err(format!("frozen coordinate {j} moved"));
        }
    }
    let newly = free.iter().filter(|&&j| x[j].abs() >= 1.0 - delta).count();
    if 2 * newly < free.len() {
        return Err(format!("froze {newly} of {} free", free.len()));
    }
    for (s, &c) in sets.iter().zip(coeffs) {
        let inner: f64 = s.iter().map(|&v| x[v as usize] - x0[v as usize]).sum();
        let bound = c * (s.len() as f64).sqrt() + eps;
        if inner.abs() > bound {
            return Err(format!("set of size {} moved {inner:.6} > {bound:.6}", s.len()));
        }
    }
    Ok(())
}

pub fn median_f64(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let k = s.len();
    if k % 2 == 1 {
        s[k / 2]
    } else {
        0.5 * (s[k / 2 - 1] + s[k / 2])
    }
}
