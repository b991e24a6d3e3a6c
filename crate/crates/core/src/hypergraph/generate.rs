use std::collections::HashMap;

use rand::Rng;
use rayon::prelude::*;

use super::{Hypergraph, ModelTag};
use crate::error::{Error, Result};
use crate::rng::{domain, RandomSource};

/// Random t-regular model: each vertex independently joins `t` distinct
/// edges chosen uniformly from the `m` available.
pub fn generate_h1(n: usize, m: usize, t: usize, rng: &RandomSource) -> Result<Hypergraph> {
    if n == 0 || m == 0 {
        return Err(Error::param("n and m must be positive"));
    }
    if t > m {
        return Err(Error::param(format!("t = {t} exceeds m = {m}")));
    }
    if m > u32::MAX as usize || n > u32::MAX as usize {
        return Err(Error::param("n, m must fit in u32"));
    }
    let choices: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut r = rng.stream(domain::H1_VERTEX, v as u64);
            sample_distinct(&mut r, m as u32, t)
        })
        .collect();

    let mut edges = vec![Vec::new(); m];
    for (v, chosen) in choices.iter().enumerate() {
        for &e in chosen {
            edges[e as usize].push(v as u32);
        }
    }
    Ok(Hypergraph::from_parts_unchecked(n, edges, ModelTag::H1))
}

/// Partial Fisher-Yates over `0..m` with lazily materialized swaps.
fn sample_distinct<R: Rng>(r: &mut R, m: u32, t: usize) -> Vec<u32> {
    let mut swapped: HashMap<u32, u32> = HashMap::with_capacity(2 * t);
    let mut out = Vec::with_capacity(t);
    for i in 0..t as u32 {
        let j = r.random_range(i..m);
        let at_j = *swapped.get(&j).unwrap_or(&j);
        let at_i = *swapped.get(&i).unwrap_or(&i);
        swapped.insert(j, at_i);
        out.push(at_j);
    }
    out
}

/// Bernoulli model: every vertex-edge incidence is present independently
/// with probability `p`.
pub fn generate_h2(n: usize, m: usize, p: f64, rng: &RandomSource) -> Result<Hypergraph> {
    if n == 0 || m == 0 {
        return Err(Error::param("n and m must be positive"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("p = {p} outside [0, 1]")));
    }
    let edges: Vec<Vec<u32>> = (0..m)
        .into_par_iter()
        .map(|e| {
            let mut r = rng.stream(domain::H2_EDGE, e as u64);
            (0..n as u32).filter(|_| r.random_bool(p)).collect()
        })
        .collect();
    Ok(Hypergraph::from_parts_unchecked(n, edges, ModelTag::H2))
}

/// Bernoulli(1/2) model conditioned on every edge having even size.
///
/// Rows are drawn by rejection, so each row is exactly uniform over the
/// 2^(n-1) even-weight rows.
pub fn generate_h2_even(n: usize, m: usize, rng: &RandomSource) -> Result<Hypergraph> {
    if n == 0 || m == 0 {
        return Err(Error::param("n and m must be positive"));
    }
    if n % 2 != 0 {
        return Err(Error::param(format!("n = {n} must be even")));
    }
    let words = n.div_ceil(64);
    let edges: Vec<Vec<u32>> = (0..m)
        .into_par_iter()
        .map(|e| {
            let mut r = rng.stream(domain::H2_EVEN_EDGE, e as u64);
            let mut bits = vec![0u64; words];
            loop {
                for (w, slot) in bits.iter_mut().enumerate() {
                    let mut x: u64 = r.random();
                    let valid = n - 64 * w;
                    if valid < 64 {
                        x &= (1u64 << valid) - 1;
                    }
                    *slot = x;
                }
                let weight: u32 = bits.iter().map(|w| w.count_ones()).sum();
                if weight % 2 == 0 {
                    break;
                }
            }
            (0..n as u32)
                .filter(|&v| bits[v as usize / 64] >> (v % 64) & 1 == 1)
                .collect()
        })
        .collect();
    Ok(Hypergraph::from_parts_unchecked(n, edges, ModelTag::H2Even))
}

/// Redraws vertex 0's membership in every edge as a fair coin.
///
/// Applied to an even-row instance this yields an unconditioned
/// Bernoulli(1/2) instance, and moves each edge sum by at most one.
pub fn resample_first_column(h: &Hypergraph, rng: &RandomSource) -> Result<Hypergraph> {
    if h.n() == 0 {
        return Err(Error::param("hypergraph has no vertices"));
    }
    let edges = h
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let mut r = rng.stream(domain::RESAMPLE_EDGE, i as u64);
            let include = r.random_bool(0.5);
            let rest = e.iter().copied().filter(|&v| v != 0);
            if include {
                std::iter::once(0).chain(rest).collect()
            } else {
                rest.collect()
            }
        })
        .collect();
    Ok(Hypergraph::from_parts_unchecked(h.n(), edges, ModelTag::H2))
}
