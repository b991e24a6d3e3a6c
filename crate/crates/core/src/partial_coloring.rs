//! Constructive partial coloring by a constrained Gaussian random walk.
//!
//! Given sets M_1..M_m with coefficients c_i and a starting point x0, the
//! walk moves x inside the polytope
//!
//! ```text
//!   |x_j| <= 1  for every coordinate,
//!   |<x - x0, 1_{M_i}>| <= c_i sqrt(|M_i|)  for every set,
//! ```
//!
//! taking Gaussian steps restricted to the subspace orthogonal to the frozen
//! coordinates and to the tight sets.  Each step is clipped at the first
//! face it would cross, and its sign is randomized so that the clipped
//! increment still has mean zero.  A clipped step lands exactly on a face:
//! that coordinate freezes or that set becomes tight, and from then on the
//! walk never leaves the face.  Both output guarantees are therefore hard
//! invariants of every attempt; what can fail is only the amount of
//! freezing, which is retried with fresh seeds.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::projector::Projector;
use crate::rng::{domain, RandomSource};

/// Absolute slack allowed on set inner products: 1e-6 * sqrt(n).
pub fn numeric_slack(n: usize) -> f64 {
    1e-6 * (n as f64).sqrt()
}

/// The sets and coefficients handed to the walk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSet {
    n: usize,
    sets: Vec<Vec<u32>>,
    coeffs: Vec<f64>,
}

impl ConstraintSet {
    pub fn new(n: usize, mut sets: Vec<Vec<u32>>, coeffs: Vec<f64>) -> Result<Self> {
        if sets.len() != coeffs.len() {
            return Err(Error::param(format!(
                "{} sets but {} coefficients",
                sets.len(),
                coeffs.len()
            )));
        }
        if let Some(c) = coeffs.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::param(format!("coefficient {c} is not a nonnegative real")));
        }
        for s in &mut sets {
            s.sort_unstable();
            s.dedup();
            if let Some(&v) = s.last() {
                if v as usize >= n {
                    return Err(Error::param(format!("set member {v} out of range for n = {n}")));
                }
            }
        }
        Ok(ConstraintSet { n, sets, coeffs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[Vec<u32>] {
        &self.sets
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// c_i * sqrt(|M_i|).
    pub fn bound(&self, i: usize) -> f64 {
        self.coeffs[i] * (self.sets[i].len() as f64).sqrt()
    }

    /// Σ exp(-c_i² / 16) over the nonempty sets.
    pub fn feasibility_sum(&self) -> f64 {
        self.sets
            .iter()
            .zip(&self.coeffs)
            .filter(|(s, _)| !s.is_empty())
            .map(|(_, c)| (-c * c / 16.0).exp())
            .sum()
    }
}

/// Whether Σ exp(-c_i² / 16) ≤ n / 16, the condition under which the walk
/// is guaranteed to freeze half the coordinates with constant probability.
pub fn check_feasible(cs: &ConstraintSet) -> bool {
    cs.feasibility_sum() <= cs.n as f64 / 16.0
}

/// A fractional coloring in [-1, 1]^n with its frozen coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartialVector {
    pub x: Vec<f64>,
    pub frozen: Vec<bool>,
    pub delta: f64,
}

impl PartialVector {
    pub fn zeros(n: usize, delta: f64) -> Self {
        PartialVector {
            x: vec![0.0; n],
            frozen: vec![false; n],
            delta,
        }
    }

    /// Marks every coordinate with |x_i| ≥ 1 - delta as frozen.
    pub fn from_values(x: Vec<f64>, delta: f64) -> Result<Self> {
        check_delta(delta)?;
        if let Some(v) = x.iter().find(|v| !(-1.0..=1.0).contains(*v)) {
            return Err(Error::param(format!("entry {v} outside [-1, 1]")));
        }
        let frozen = x.iter().map(|v| v.abs() >= 1.0 - delta).collect();
        Ok(PartialVector { x, frozen, delta })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn frozen_count(&self) -> usize {
        self.frozen.iter().filter(|&&f| f).count()
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta <= 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!("delta = {delta} outside (0, 1]")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    /// Per-coordinate scale γ of an unclipped Gaussian step.
    pub step: f64,
    /// Step budget per attempt; `None` uses ⌈16/(3γ²)⌉ + 4·n + 2·m.
    pub max_steps: Option<usize>,
    /// Extra attempts after the first one fails to freeze enough.
    pub retries: usize,
    /// Refuse constraint sets that fail [`check_feasible`].
    pub require_feasible: bool,
    /// Stop as soon as half of the free coordinates are frozen instead of
    /// walking until no free direction is left.
    pub stop_at_target: bool,
    pub record_trajectory: bool,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            step: 0.1,
            max_steps: None,
            retries: 10,
            require_feasible: true,
            stop_at_target: false,
            record_trajectory: false,
        }
    }
}

impl WalkConfig {
    fn step_budget(&self, n: usize, m: usize) -> usize {
        self.max_steps.unwrap_or_else(|| {
            (16.0 / (3.0 * self.step * self.step)).ceil() as usize + 4 * n + 2 * m
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub step: usize,
    pub frozen_count: usize,
    /// max_i (|<x - x0, 1_{M_i}>| - c_i sqrt|M_i|); nonpositive while feasible.
    pub max_constraint_slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkOutcome {
    pub vector: PartialVector,
    pub attempts: usize,
    pub steps: usize,
    /// Coordinates free in the start vector that ended frozen.
    pub newly_frozen: usize,
    /// ⌈free / 2⌉.
    pub target: usize,
    /// Largest |<step, 1_{M_i}>| over tight sets and accepted steps.
    pub max_step_leak: f64,
    pub trajectory: Vec<TrajectoryRow>,
}

/// Runs the walk from `start` until at least half of its free coordinates
/// reach |x_i| ≥ 1 - delta, retrying with derived seeds.
pub fn lovett_meka(
    cs: &ConstraintSet,
    start: &PartialVector,
    delta: f64,
    rng: &RandomSource,
    cfg: &WalkConfig,
) -> Result<WalkOutcome> {
    check_delta(delta)?;
    if start.len() != cs.n {
        return Err(Error::param(format!(
            "start vector has length {} but the constraint set has n = {}",
            start.len(),
            cs.n
        )));
    }
    if start.frozen.len() != start.x.len() {
        return Err(Error::param("frozen mask length differs from x"));
    }
    if let Some(v) = start.x.iter().find(|v| !(-1.0..=1.0).contains(*v)) {
        return Err(Error::param(format!("start entry {v} outside [-1, 1]")));
    }
    if !(cfg.step > 0.0 && cfg.step.is_finite()) {
        return Err(Error::param("walk step must be positive"));
    }
    if cfg.require_feasible && !check_feasible(cs) {
        return Err(Error::param(format!(
            "infeasible constraint set: Σ exp(-c²/16) = {:.4} > n/16 = {:.4}",
            cs.feasibility_sum(),
            cs.n as f64 / 16.0
        )));
    }

    let mut best: Option<WalkOutcome> = None;
    for attempt in 0..=cfg.retries {
        let mut r = rng.stream(domain::WALK_ATTEMPT, attempt as u64);
        let mut out = Walk::new(cs, start, delta, cfg).run(&mut r);
        out.attempts = attempt + 1;
        if out.newly_frozen >= out.target {
            return Ok(out);
        }
        if best.as_ref().is_none_or(|b| out.newly_frozen > b.newly_frozen) {
            best = Some(out);
        }
    }
    let best = best.expect("at least one attempt");
    Err(Error::WalkExhausted {
        attempts: cfg.retries + 1,
        frozen: best.newly_frozen,
        target: best.target,
        best: Box::new(best.vector),
    })
}

struct Constraint {
    members: Vec<u32>,
    bound: f64,
    value: f64,
    tight: bool,
}

struct Walk<'a> {
    cfg: &'a WalkConfig,
    delta: f64,
    x: Vec<f64>,
    frozen: Vec<bool>,
    was_free: Vec<bool>,
    free_count: usize,
    newly_frozen: usize,
    target: usize,
    cons: Vec<Constraint>,
    proj: Projector,
    m_total: usize,
}

const HIT_TOL: f64 = 1e-12;
const LEAK_TOL: f64 = 1e-10;

impl<'a> Walk<'a> {
    fn new(cs: &ConstraintSet, start: &'a PartialVector, delta: f64, cfg: &'a WalkConfig) -> Self {
        let n = cs.n;
        let x0 = &start.x[..];
        let frozen: Vec<bool> = (0..n)
            .map(|j| start.frozen[j] || x0[j].abs() >= 1.0 - delta)
            .collect();
        let was_free: Vec<bool> = frozen.iter().map(|f| !f).collect();
        let free_count = was_free.iter().filter(|&&f| f).count();

        let mut cons = Vec::new();
        for (i, set) in cs.sets.iter().enumerate() {
            let members: Vec<u32> = set.iter().copied().filter(|&v| !frozen[v as usize]).collect();
            if members.is_empty() {
                continue;
            }
            let bound = cs.bound(i);
            // the largest change the free members can produce
            let reach: f64 = members
                .iter()
                .map(|&v| 1.0 + x0[v as usize].abs())
                .sum();
            if bound >= reach {
                continue;
            }
            cons.push(Constraint {
                members,
                bound,
                value: 0.0,
                tight: bound <= HIT_TOL,
            });
        }
        let mut proj = Projector::new(n);
        for c in cons.iter().filter(|c| c.tight) {
            proj.add_row(c.members.clone());
        }
        Walk {
            cfg,
            delta,
            x: x0.to_vec(),
            frozen,
            was_free,
            free_count,
            newly_frozen: 0,
            target: free_count.div_ceil(2),
            cons,
            proj,
            m_total: cs.m(),
        }
    }

    fn run<R: Rng>(mut self, rng: &mut R) -> WalkOutcome {
        let n = self.x.len();
        let budget = self.cfg.step_budget(self.free_count, self.m_total);
        let mut trajectory = Vec::new();
        let mut steps = 0;
        let mut max_leak = 0.0f64;
        let mut g = vec![0.0; n];
        let mut scratch = vec![0.0; n];

        while steps < budget && self.free_count > 0 {
            if self.cfg.stop_at_target && self.newly_frozen >= self.target {
                break;
            }
            let mut g_norm2 = 0.0;
            for j in 0..n {
                g[j] = if self.frozen[j] {
                    0.0
                } else {
                    let z: f64 = rng.sample(StandardNormal);
                    g_norm2 += z * z;
                    z
                };
            }
            self.proj.project(&mut g);
            let mut leak = self.tight_leak(&g);
            if leak > LEAK_TOL * g_norm2.sqrt() {
                self.proj.project(&mut g);
                leak = self.tight_leak(&g);
            }
            if leak > LEAK_TOL * g_norm2.sqrt() {
                // the factor lost accuracy; fall back to an iterative solve
                let rows = self.tight_rows();
                project_out(&rows, &mut g, &mut scratch);
                leak = self.tight_leak(&g);
            }
            let u_norm2: f64 = g.iter().map(|v| v * v).sum();
            if u_norm2 <= 1e-16 * g_norm2 {
                break;
            }

            for v in g.iter_mut() {
                *v *= self.cfg.step;
            }
            let signed_step = self.choose_step(&g, rng);
            steps += 1;
            let Some((lambda, forced)) = signed_step else {
                break;
            };
            max_leak = max_leak.max(leak * self.cfg.step * lambda.abs());
            self.apply(&g, lambda, forced);

            if self.cfg.record_trajectory {
                trajectory.push(TrajectoryRow {
                    step: steps,
                    frozen_count: self.frozen.iter().filter(|&&f| f).count(),
                    max_constraint_slack: self
                        .cons
                        .iter()
                        .map(|c| c.value.abs() - c.bound)
                        .fold(f64::NEG_INFINITY, f64::max),
                });
            }
        }

        let x: Vec<f64> = self.x.iter().map(|v| v.clamp(-1.0, 1.0)).collect();
        let frozen = x
            .iter()
            .zip(&self.was_free)
            .map(|(v, &free)| !free || v.abs() >= 1.0 - self.delta)
            .collect();
        WalkOutcome {
            vector: PartialVector {
                x,
                frozen,
                delta: self.delta,
            },
            attempts: 1,
            steps,
            newly_frozen: self.newly_frozen,
            target: self.target,
            max_step_leak: max_leak,
            trajectory,
        }
    }

    fn free_members(&self, c: &Constraint) -> Vec<u32> {
        c.members
            .iter()
            .copied()
            .filter(|&v| !self.frozen[v as usize])
            .collect()
    }

    fn tight_rows(&self) -> Vec<Vec<u32>> {
        self.cons
            .iter()
            .filter(|c| c.tight)
            .map(|c| self.free_members(c))
            .filter(|r| !r.is_empty())
            .collect()
    }

    /// Largest |<g, 1_{M_i}>| over tight sets.
    fn tight_leak(&self, g: &[f64]) -> f64 {
        self.cons
            .iter()
            .filter(|c| c.tight)
            .map(|c| c.members.iter().map(|&v| g[v as usize]).sum::<f64>().abs())
            .fold(0.0, f64::max)
    }

    /// Picks +λ⁺ with probability λ⁻/(λ⁺+λ⁻) and -λ⁻ otherwise, so the
    /// clipped increment has mean zero.  Returns the signed multiplier and
    /// the face it lands on, if any.
    fn choose_step<R: Rng>(&self, d: &[f64], rng: &mut R) -> Option<(f64, Option<Face>)> {
        let mut plus = (1.0f64, None);
        let mut minus = (1.0f64, None);
        let tighten = |slot: &mut (f64, Option<Face>), room: f64, rate: f64, face: Face| {
            let lim = (room / rate).max(0.0);
            if lim < slot.0 {
                *slot = (lim, Some(face));
            }
        };
        for (j, &dj) in d.iter().enumerate() {
            if dj == 0.0 || self.frozen[j] {
                continue;
            }
            let (up, down) = (1.0 - self.x[j], self.x[j] + 1.0);
            if dj > 0.0 {
                tighten(&mut plus, up, dj, Face::Coord(j));
                tighten(&mut minus, down, dj, Face::Coord(j));
            } else {
                tighten(&mut plus, down, -dj, Face::Coord(j));
                tighten(&mut minus, up, -dj, Face::Coord(j));
            }
        }
        for (i, c) in self.cons.iter().enumerate() {
            if c.tight {
                continue;
            }
            let a: f64 = c.members.iter().map(|&v| d[v as usize]).sum();
            if a == 0.0 {
                continue;
            }
            let (up, down) = (c.bound - c.value, c.value + c.bound);
            if a > 0.0 {
                tighten(&mut plus, up, a, Face::Set(i));
                tighten(&mut minus, down, a, Face::Set(i));
            } else {
                tighten(&mut plus, down, -a, Face::Set(i));
                tighten(&mut minus, up, -a, Face::Set(i));
            }
        }
        let total = plus.0 + minus.0;
        if total <= 0.0 {
            // sitting on a face that was not registered; register it
            return Some((0.0, plus.1.or(minus.1)));
        }
        if rng.random::<f64>() * total < minus.0 {
            Some((plus.0, plus.1))
        } else {
            Some((-minus.0, minus.1))
        }
    }

    fn apply(&mut self, d: &[f64], lambda: f64, forced: Option<Face>) {
        if lambda != 0.0 {
            for (j, &dj) in d.iter().enumerate() {
                if dj != 0.0 && !self.frozen[j] {
                    self.x[j] += lambda * dj;
                }
            }
            for c in self.cons.iter_mut() {
                // tight sets are orthogonal to d up to rounding
                let a: f64 = c.members.iter().map(|&v| d[v as usize]).sum();
                c.value += lambda * a;
            }
        }
        match forced {
            Some(Face::Coord(j)) if lambda != 0.0 || self.x[j].abs() >= 1.0 - HIT_TOL => {
                self.x[j] = if self.x[j] >= 0.0 { 1.0 } else { -1.0 };
            }
            Some(Face::Set(i)) => {
                let c = &mut self.cons[i];
                c.value = c.bound.copysign(c.value);
            }
            _ => {}
        }
        for j in 0..self.x.len() {
            if self.frozen[j] {
                continue;
            }
            let a = self.x[j].abs();
            if a >= 1.0 - HIT_TOL {
                self.x[j] = self.x[j].signum();
            }
            if a >= 1.0 - self.delta.max(HIT_TOL) {
                self.x[j] = self.x[j].clamp(-1.0, 1.0);
                self.frozen[j] = true;
                self.free_count -= 1;
                self.newly_frozen += 1;
                self.proj.freeze(j);
            }
        }
        for i in 0..self.cons.len() {
            let c = &self.cons[i];
            if !c.tight && c.value.abs() >= c.bound - HIT_TOL * c.bound.max(1.0) {
                let row = self.free_members(c);
                self.cons[i].tight = true;
                self.proj.add_row(row);
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Face {
    Coord(usize),
    Set(usize),
}

/// g ← g - Aᵀ(AAᵀ)⁺Ag for the 0/1 rows of A, by Jacobi-preconditioned
/// conjugate gradients with one refinement pass.
fn project_out(rows: &[Vec<u32>], g: &mut [f64], scratch: &mut [f64]) {
    if rows.is_empty() {
        return;
    }
    for _ in 0..2 {
        let b: Vec<f64> = rows
            .iter()
            .map(|r| r.iter().map(|&v| g[v as usize]).sum())
            .collect();
        let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        let g_norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if b_norm <= 1e-14 * g_norm.max(1e-300) {
            return;
        }
        let y = normal_solve(rows, &b, scratch);
        for (r, &yi) in rows.iter().zip(&y) {
            for &v in r {
                g[v as usize] -= yi;
            }
        }
    }
}

/// Solves (AAᵀ) y = b with Jacobi-preconditioned CG.
fn normal_solve(rows: &[Vec<u32>], b: &[f64], scratch: &mut [f64]) -> Vec<f64> {
    let k = rows.len();
    let diag: Vec<f64> = rows.iter().map(|r| r.len() as f64).collect();
    let apply = |p: &[f64], out: &mut [f64], scratch: &mut [f64]| {
        for &v in rows.iter().flatten() {
            scratch[v as usize] = 0.0;
        }
        for (r, &pi) in rows.iter().zip(p) {
            for &v in r {
                scratch[v as usize] += pi;
            }
        }
        for (o, r) in out.iter_mut().zip(rows) {
            *o = r.iter().map(|&v| scratch[v as usize]).sum();
        }
    };
    let mut y = vec![0.0; k];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut q = vec![0.0; k];
    for _ in 0..(4 * k + 50) {
        apply(&p, &mut q, scratch);
        let pq: f64 = p.iter().zip(&q).map(|(a, b)| a * b).sum();
        if pq <= 0.0 {
            break;
        }
        let alpha = rz / pq;
        for i in 0..k {
            y[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r_norm <= 1e-13 * b_norm {
            break;
        }
        for i in 0..k {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..k {
            p[i] = z[i] + beta * p[i];
        }
    }
    y
}

/// Independent check of a walk's output against its guarantees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkAudit {
    pub newly_frozen: usize,
    pub target: usize,
    /// max_i (|<x - x0, 1_{M_i}>| - c_i sqrt|M_i|).
    pub max_excess: f64,
    pub slack: f64,
    pub in_box: bool,
    pub frozen_unchanged: bool,
}

impl WalkAudit {
    pub fn ok(&self) -> bool {
        self.newly_frozen >= self.target
            && self.max_excess <= self.slack
            && self.in_box
            && self.frozen_unchanged
    }
}

pub fn audit_walk(cs: &ConstraintSet, start: &PartialVector, out: &PartialVector) -> WalkAudit {
    let n = cs.n;
    let delta = out.delta;
    let slack = numeric_slack(n);
    let free: Vec<bool> = (0..n)
        .map(|j| !(start.frozen[j] || start.x[j].abs() >= 1.0 - delta))
        .collect();
    let free_count = free.iter().filter(|&&f| f).count();
    let newly_frozen = (0..n)
        .filter(|&j| free[j] && out.x[j].abs() >= 1.0 - delta)
        .count();
    let max_excess = cs
        .sets
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.is_empty())
        .map(|(i, s)| {
            let inner: f64 = s.iter().map(|&v| out.x[v as usize] - start.x[v as usize]).sum();
            inner.abs() - cs.bound(i)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    WalkAudit {
        newly_frozen,
        target: free_count.div_ceil(2),
        max_excess,
        slack,
        in_box: out.x.iter().all(|v| (-1.0..=1.0).contains(v)),
        frozen_unchanged: (0..n).all(|j| free[j] || (out.x[j] - start.x[j]).abs() <= slack),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cs(n: usize, sets: Vec<Vec<u32>>, coeffs: Vec<f64>) -> ConstraintSet {
        ConstraintSet::new(n, sets, coeffs).unwrap()
    }

    #[test]
    fn feasibility_examples() {
        assert!(check_feasible(&cs(8, vec![], vec![])));
        assert!(check_feasible(&cs(16, vec![vec![0]], vec![0.0])));
        assert!(!check_feasible(&cs(16, vec![vec![0], vec![1]], vec![0.0, 0.0])));
        // empty sets are ignored
        assert!(check_feasible(&cs(16, vec![vec![0], vec![]], vec![0.0, 0.0])));
    }

    #[test]
    fn constraint_set_validation() {
        assert!(ConstraintSet::new(4, vec![vec![4]], vec![1.0]).is_err());
        assert!(ConstraintSet::new(4, vec![vec![1]], vec![-1.0]).is_err());
        assert!(ConstraintSet::new(4, vec![vec![1]], vec![]).is_err());
    }

    #[test]
    fn unconstrained_walk_freezes_half() {
        let c = cs(50, vec![], vec![]);
        let start = PartialVector::zeros(50, 1e-3);
        let out = lovett_meka(&c, &start, 1e-3, &RandomSource::new(1), &WalkConfig::default()).unwrap();
        assert!(out.vector.frozen_count() >= 25);
        assert!(audit_walk(&c, &start, &out.vector).ok());
    }

    #[test]
    fn zero_coefficient_pins_the_sum() {
        let n = 64;
        let c = cs(n, vec![(0..n as u32).collect()], vec![0.0]);
        let start = PartialVector::zeros(n, 1e-3);
        let out = lovett_meka(&c, &start, 1e-3, &RandomSource::new(2), &WalkConfig::default()).unwrap();
        let sum: f64 = out.vector.x.iter().sum();
        assert!(sum.abs() <= numeric_slack(n), "{sum}");
        assert!(audit_walk(&c, &start, &out.vector).ok());
    }

    #[test]
    fn frozen_start_coordinates_stay_put() {
        let n = 40;
        let mut start = PartialVector::zeros(n, 1e-2);
        for j in 0..10 {
            start.x[j] = if j % 2 == 0 { 1.0 } else { -1.0 };
            start.frozen[j] = true;
        }
        start.x[12] = 0.3;
        let sets = vec![(0..20).collect(), (10..40).collect()];
        let c = cs(n, sets, vec![0.5, 0.5]);
        let cfg = WalkConfig {
            require_feasible: false,
            ..WalkConfig::default()
        };
        let out = lovett_meka(&c, &start, 1e-2, &RandomSource::new(3), &cfg).unwrap();
        for j in 0..10 {
            assert_eq!(out.vector.x[j], start.x[j]);
        }
        let a = audit_walk(&c, &start, &out.vector);
        assert!(a.ok(), "{a:?}");
        assert_eq!(a.target, 15);
    }

    #[test]
    fn infeasible_is_rejected_when_required() {
        let c = cs(16, vec![vec![0], vec![1]], vec![0.0, 0.0]);
        let start = PartialVector::zeros(16, 0.1);
        let err = lovett_meka(&c, &start, 0.1, &RandomSource::new(0), &WalkConfig::default());
        assert!(matches!(err, Err(Error::Parameter(_))));
    }

    #[test]
    fn over_constrained_walk_exhausts_retries() {
        // every coordinate pinned individually: nothing can move
        let n = 8;
        let sets: Vec<Vec<u32>> = (0..n as u32).map(|v| vec![v]).collect();
        let c = cs(n, sets, vec![0.0; n]);
        let cfg = WalkConfig {
            require_feasible: false,
            retries: 2,
            ..WalkConfig::default()
        };
        let err = lovett_meka(&c, &PartialVector::zeros(n, 0.1), 0.1, &RandomSource::new(0), &cfg);
        match err {
            Err(Error::WalkExhausted { attempts, frozen, .. }) => {
                assert_eq!(attempts, 3);
                assert_eq!(frozen, 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let n = 30;
        let sets: Vec<Vec<u32>> = (0..10u32).map(|i| vec![i, i + 10, i + 20]).collect();
        let c = cs(n, sets, vec![0.7; 10]);
        let cfg = WalkConfig {
            require_feasible: false,
            record_trajectory: true,
            ..WalkConfig::default()
        };
        let start = PartialVector::zeros(n, 1e-3);
        let a = lovett_meka(&c, &start, 1e-3, &RandomSource::new(9), &cfg).unwrap();
        let b = lovett_meka(&c, &start, 1e-3, &RandomSource::new(9), &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.trajectory.iter().all(|r| r.max_constraint_slack <= numeric_slack(n)));
        assert!(a.trajectory.windows(2).all(|w| w[0].frozen_count <= w[1].frozen_count));
    }

    #[test]
    fn projection_removes_row_components() {
        let rows = vec![vec![0, 1, 2], vec![2, 3], vec![0, 1, 2]];
        let mut g = vec![1.0, -2.0, 0.5, 3.0, 1.0];
        let mut scratch = vec![0.0; 5];
        project_out(&rows, &mut g, &mut scratch);
        for r in &rows {
            let s: f64 = r.iter().map(|&v| g[v as usize]).sum();
            assert!(s.abs() < 1e-12, "{s}");
        }
        assert_eq!(g[4], 1.0);
    }
}
