//! Restricted operator norm of the incidence matrix,
//! σ = max_{v ⊥ 1, ‖v‖ = 1} ‖Mv‖, and the edge-balance audit it controls.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::rng::{domain, RandomSource};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub sigma: f64,
    pub iterations: usize,
    /// Relative change of the last Rayleigh quotient update.
    pub residual: f64,
    /// σ / √t.
    pub c_norm: f64,
    pub converged: bool,
}

/// Mv, one entry per edge.
pub fn incidence_apply(h: &Hypergraph, v: &[f64]) -> Vec<f64> {
    h.edges()
        .iter()
        .map(|e| e.iter().map(|&u| v[u as usize]).sum())
        .collect()
}

/// Mᵀy, one entry per vertex.
pub fn incidence_apply_transpose(h: &Hypergraph, y: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; h.n()];
    for (e, &ye) in h.edges().iter().zip(y) {
        for &u in e {
            out[u as usize] += ye;
        }
    }
    out
}

fn center(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Power iteration on P MᵀM P with P = I - J/n, started from a projected
/// Gaussian vector.  Stops when successive Rayleigh quotients agree to
/// relative tolerance `tol`; otherwise returns the last estimate with
/// `converged = false`.
///
/// `t` only scales `c_norm`; when `None` the maximum vertex degree is used.
pub fn restricted_norm(
    h: &Hypergraph,
    t: Option<usize>,
    tol: f64,
    max_iters: usize,
    rng: &RandomSource,
) -> Result<NormEstimate> {
    let n = h.n();
    if n < 2 {
        return Err(Error::param("restricted norm needs n >= 2"));
    }
    let t = match t {
        Some(0) => return Err(Error::param("t must be at least 1")),
        Some(t) => t,
        None => h.max_degree().max(1),
    };
    let mut r = rng.stream(domain::NORM_START, 0);
    let mut v: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut r)).collect();
    center(&mut v);
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);

    let mut lambda_prev = f64::NAN;
    let mut lambda = 0.0;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iters {
        iterations += 1;
        let mut w = incidence_apply_transpose(h, &incidence_apply(h, &v));
        center(&mut w);
        lambda = v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>().max(0.0);
        let nw = norm(&w);
        if nw == 0.0 {
            residual = 0.0;
            converged = true;
            break;
        }
        if lambda_prev.is_finite() {
            residual = (lambda - lambda_prev).abs() / lambda.max(1e-300);
            if (lambda - lambda_prev).abs() <= tol * lambda.max(1e-12) {
                converged = true;
                break;
            }
        }
        lambda_prev = lambda;
        v = w.into_iter().map(|x| x / nw).collect();
    }
    let sigma = lambda.sqrt();
    Ok(NormEstimate {
        sigma,
        iterations,
        residual,
        c_norm: sigma / (t as f64).sqrt(),
        converged,
    })
}

pub fn default_max_iters(n: usize) -> usize {
    10 * n
}

fn membership(n: usize, s: &[u32]) -> Result<Vec<bool>> {
    let mut mask = vec![false; n];
    for &v in s {
        let slot = mask
            .get_mut(v as usize)
            .ok_or_else(|| Error::param(format!("vertex {v} out of range")))?;
        if *slot {
            return Err(Error::param(format!("vertex {v} listed twice")));
        }
        *slot = true;
    }
    Ok(mask)
}

/// The vector that is 1 - α on S and -α off S.
pub fn centered_indicator(n: usize, s: &[u32]) -> Result<Vec<f64>> {
    let mask = membership(n, s)?;
    let alpha = s.len() as f64 / n as f64;
    Ok(mask.iter().map(|&m| if m { 1.0 - alpha } else { -alpha }).collect())
}

/// Σ_e (|S ∩ e| - α|e|)² with α = |S|/n.
pub fn sum_squared_deviation(h: &Hypergraph, s: &[u32]) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::param("S must be nonempty"));
    }
    let mask = membership(h.n(), s)?;
    let alpha = s.len() as f64 / h.n() as f64;
    Ok(h.edges()
        .iter()
        .map(|e| {
            let inside = e.iter().filter(|&&v| mask[v as usize]).count() as f64;
            (inside - alpha * e.len() as f64).powi(2)
        })
        .sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PseudorandomCheck {
    pub violations: usize,
    pub bound: f64,
    pub ok: bool,
}

/// Counts edges with |S ∩ e| > α|e| + Kαt and compares against the bound
/// σ²α(1-α)n / (Kαt)², which follows from ‖Mv_S‖² ≤ σ²‖v_S‖² and Markov.
pub fn pseudorandom_check(
    h: &Hypergraph,
    s: &[u32],
    k: f64,
    sigma: f64,
    t: usize,
) -> Result<PseudorandomCheck> {
    let n = h.n();
    if s.is_empty() || s.len() >= n {
        return Err(Error::param("need 0 < |S| < n"));
    }
    let mask = membership(n, s)?;
    let alpha = s.len() as f64 / n as f64;
    let slack = k * alpha * t as f64;
    let violations = h
        .edges()
        .iter()
        .filter(|e| {
            let inside = e.iter().filter(|&&v| mask[v as usize]).count() as f64;
            inside > alpha * e.len() as f64 + slack
        })
        .count();
    let bound = if slack > 0.0 {
        sigma * sigma * alpha * (1.0 - alpha) * n as f64 / (slack * slack)
    } else {
        f64::INFINITY
    };
    Ok(PseudorandomCheck {
        violations,
        bound,
        ok: violations as f64 <= bound,
    })
}
