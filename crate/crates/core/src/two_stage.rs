//! Iterated partial coloring in two stages.
//!
//! Each round walks the still-fractional vertices S with one constraint per
//! edge: edges that meet S in about their fair share ("small") get a
//! coefficient c = κ·√ln(2/α), α = |S|/n; edges that meet S unusually much
//! ("large") are pinned with c = 0.  While α ≥ t^(-0.4) the large threshold
//! is α|e| + 2C√t, afterwards it widens by αt.  When every vertex is frozen
//! the vector is rounded to signs.

use serde::{Deserialize, Serialize};

use crate::discrepancy::{disc_of, Coloring, DiscReport};
use crate::error::{Error, Result};
use crate::hypergraph::{check_edge_sizes, Hypergraph};
use crate::partial_coloring::{
    lovett_meka, numeric_slack, ConstraintSet, PartialVector, WalkConfig,
};
use crate::rng::{domain, RandomSource};
use crate::spectral::restricted_norm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Feasibility {
    /// Raise the small-edge coefficient until Σ exp(-c²/16) ≤ |S|/16.
    Raise,
    /// Keep the scheduled coefficient; if the walk cannot freeze half of S,
    /// multiply the coefficient by `escalation_factor`, halve the pinning
    /// budget, and walk again.
    Relaxed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageParams {
    pub t: usize,
    /// σ/√t for the instance being colored.
    pub c_norm: f64,
    /// Stage 1 runs while α ≥ this value.
    pub alpha_threshold: f64,
    /// κ in c = κ·√ln(2/α).
    pub coeff_scale: f64,
    pub delta: f64,
    pub round_cap: usize,
    pub feasibility: Feasibility,
    /// Upper limit on coefficient escalations per round in relaxed mode.
    pub max_escalations: usize,
    /// Multiplier applied to the coefficient at each escalation.
    pub escalation_factor: f64,
    /// Each round also pins (c = 0) up to this fraction of |S| small edges,
    /// those with the largest accumulated |<x, 1_e>|.
    pub pin_fraction: f64,
    pub walk: WalkConfig,
}

impl StageParams {
    /// Defaults for an `n`-vertex instance: threshold t^(-0.4), κ = 10,
    /// δ = 1/n, ⌈4 log₂ n⌉ rounds, coefficients raised to feasibility.
    pub fn new(n: usize, t: usize, c_norm: f64) -> Result<Self> {
        if t == 0 {
            return Err(Error::param("t must be at least 1"));
        }
        if n < 2 {
            return Err(Error::param("need at least two vertices"));
        }
        Ok(StageParams {
            t,
            c_norm,
            alpha_threshold: (t as f64).powf(-0.4),
            coeff_scale: 10.0,
            delta: 1.0 / n as f64,
            round_cap: (4.0 * (n as f64).log2()).ceil() as usize,
            feasibility: Feasibility::Raise,
            max_escalations: 12,
            escalation_factor: 1.5,
            pin_fraction: 0.0,
            walk: WalkConfig {
                require_feasible: false,
                ..WalkConfig::default()
            },
        })
    }

    /// Like [`StageParams::new`] with the small-edge coefficients at
    /// κ = 1.25 and relaxed feasibility, which leaves the constraints
    /// binding at practical sizes.
    pub fn practical(n: usize, t: usize, c_norm: f64) -> Result<Self> {
        Ok(StageParams {
            coeff_scale: PRACTICAL_COEFF_SCALE,
            feasibility: Feasibility::Relaxed,
            pin_fraction: PRACTICAL_PIN_FRACTION,
            walk: WalkConfig {
                require_feasible: false,
                retries: 1,
                ..WalkConfig::default()
            },
            ..StageParams::new(n, t, c_norm)?
        })
    }

    /// Measures C = σ/√t on `h` and builds default parameters.
    pub fn for_instance(h: &Hypergraph, t: usize, rng: &RandomSource) -> Result<Self> {
        StageParams::new(h.n(), t, measure_c_norm(h, t, rng)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t == 0 {
            return Err(Error::param("t must be at least 1"));
        }
        if !(self.alpha_threshold > 0.0 && self.alpha_threshold <= 1.0) {
            return Err(Error::param("alpha_threshold must lie in (0, 1]"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::param("delta must lie in (0, 1)"));
        }
        if !(self.c_norm >= 0.0 && self.c_norm.is_finite()) {
            return Err(Error::param("c_norm must be a nonnegative real"));
        }
        if !(self.coeff_scale > 0.0 && self.coeff_scale.is_finite()) {
            return Err(Error::param("coeff_scale must be positive"));
        }
        if !(self.escalation_factor > 1.0 && self.escalation_factor.is_finite()) {
            return Err(Error::param("escalation_factor must exceed 1"));
        }
        if !(0.0..=1.0).contains(&self.pin_fraction) {
            return Err(Error::param("pin_fraction must lie in [0, 1]"));
        }
        Ok(())
    }

    /// κ·√ln(2/α).
    pub fn coeff_small(&self, alpha: f64) -> f64 {
        self.coeff_scale * (2.0 / alpha).ln().sqrt()
    }

    pub fn stage_of(&self, alpha: f64) -> Stage {
        if alpha >= self.alpha_threshold {
            Stage::One
        } else {
            Stage::Two
        }
    }
}

pub const PRACTICAL_COEFF_SCALE: f64 = 1.25;
pub const PRACTICAL_PIN_FRACTION: f64 = 0.45;

/// σ/√t from the restricted norm of `h`.
pub fn measure_c_norm(h: &Hypergraph, t: usize, rng: &RandomSource) -> Result<f64> {
    let est = restricted_norm(h, Some(t), 1e-6, 50 * h.n().max(20), rng)?;
    Ok(est.c_norm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    One,
    Two,
}

impl Stage {
    pub fn number(self) -> u8 {
        match self {
            Stage::One => 1,
            Stage::Two => 2,
        }
    }
}

fn membership(n: usize, s: &[u32]) -> Result<Vec<bool>> {
    let mut mask = vec![false; n];
    for &v in s {
        *mask
            .get_mut(v as usize)
            .ok_or_else(|| Error::param(format!("vertex {v} out of range")))? = true;
    }
    Ok(mask)
}

fn intersection_sizes(h: &Hypergraph, in_s: &[bool]) -> Vec<usize> {
    h.edges()
        .iter()
        .map(|e| e.iter().filter(|&&v| in_s[v as usize]).count())
        .collect()
}

fn large_threshold(edge_size: usize, alpha: f64, stage: Stage, p: &StageParams) -> f64 {
    let t = p.t as f64;
    let base = alpha * edge_size as f64 + 2.0 * p.c_norm * t.sqrt();
    match stage {
        Stage::One => base,
        Stage::Two => base + alpha * t,
    }
}

fn split_by_size(
    h: &Hypergraph,
    sizes: &[usize],
    alpha: f64,
    stage: Stage,
    p: &StageParams,
) -> (Vec<usize>, Vec<usize>) {
    let (mut small, mut large) = (Vec::new(), Vec::new());
    for (i, (e, &k)) in h.edges().iter().zip(sizes).enumerate() {
        if k as f64 <= large_threshold(e.len(), alpha, stage, p) {
            small.push(i);
        } else {
            large.push(i);
        }
    }
    (small, large)
}

/// Splits the edges into small and large for the vertex set `s`.
pub fn classify_edges(
    h: &Hypergraph,
    s: &[u32],
    alpha: f64,
    stage: Stage,
    params: &StageParams,
) -> Result<(Vec<usize>, Vec<usize>)> {
    let in_s = membership(h.n(), s)?;
    Ok(split_by_size(h, &intersection_sizes(h, &in_s), alpha, stage, params))
}

/// Outcome of one partial-coloring round on S.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepOutcome {
    /// New values on S, indexed like S.
    pub vector: PartialVector,
    pub n_large: usize,
    pub n_pinned: usize,
    /// Coefficient given to small edges after any raise or escalation.
    pub coeff_small: f64,
    pub feasibility_sum: f64,
    pub escalations: usize,
    pub attempts: usize,
    pub steps: usize,
    /// c_e·√|S∩e| for every edge (0 for edges missing S).
    pub edge_bounds: Vec<f64>,
}

/// Smallest c with n_small·exp(-c²/16) + n_large ≤ |S|/16, if any.
fn feasible_coeff(n_small: usize, n_large: usize, s_len: usize) -> Option<f64> {
    let room = s_len as f64 / 16.0 - n_large as f64;
    if room <= 0.0 {
        return None;
    }
    if n_small as f64 <= room {
        return Some(0.0);
    }
    Some(4.0 * (n_small as f64 / room).ln().sqrt())
}

/// Moves the small edges with the largest accumulated |<x, 1_e>| into a
/// pinned list, at most ⌊fraction·|S|⌋ of them.
fn pin_heaviest(
    h: &Hypergraph,
    x: &[f64],
    sizes: &[usize],
    small: Vec<usize>,
    fraction: f64,
    s_len: usize,
) -> (Vec<usize>, Vec<usize>) {
    let budget = (fraction * s_len as f64).floor() as usize;
    if budget == 0 {
        return (small, Vec::new());
    }
    let mut load: Vec<(f64, usize)> = small
        .iter()
        .filter(|&&e| sizes[e] > 0)
        .map(|&e| (h.edge(e).iter().map(|&v| x[v as usize]).sum::<f64>().abs(), e))
        .filter(|&(a, _)| a > 0.0)
        .collect();
    load.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    load.truncate(budget);
    let mut is_pinned = vec![false; h.m()];
    for &(_, e) in &load {
        is_pinned[e] = true;
    }
    let (pinned, rest): (Vec<usize>, Vec<usize>) = small.into_iter().partition(|&e| is_pinned[e]);
    (rest, pinned)
}

/// One round: walks the coordinates in `s` from their values in `x`.
pub fn stage_step(
    h: &Hypergraph,
    s: &[u32],
    x: &[f64],
    stage: Stage,
    params: &StageParams,
    rng: &RandomSource,
) -> Result<StepOutcome> {
    let n = h.n();
    if s.is_empty() {
        return Err(Error::param("S must be nonempty"));
    }
    if x.len() != n {
        return Err(Error::param("x must have one entry per vertex"));
    }
    let in_s = membership(n, s)?;
    let alpha = s.len() as f64 / n as f64;
    let sizes = intersection_sizes(h, &in_s);
    let (small_all, large) = split_by_size(h, &sizes, alpha, stage, params);

    let mut local = vec![u32::MAX; n];
    for (i, &v) in s.iter().enumerate() {
        local[v as usize] = i as u32;
    }
    let restrict = |e: usize| -> Vec<u32> {
        h.edge(e)
            .iter()
            .filter(|&&v| in_s[v as usize])
            .map(|&v| local[v as usize])
            .collect()
    };
    let nonempty = |list: &[usize]| list.iter().filter(|&&e| sizes[e] > 0).count();
    let start = PartialVector {
        x: s.iter().map(|&v| x[v as usize]).collect(),
        frozen: vec![false; s.len()],
        delta: params.delta,
    };
    let escalation_cap = match params.feasibility {
        Feasibility::Raise => 0,
        Feasibility::Relaxed => params.max_escalations,
    };
    let mut coeff = params.coeff_small(alpha);
    let mut pin_fraction = params.pin_fraction;
    let mut escalations = 0;
    loop {
        let (small, pinned) = pin_heaviest(h, x, &sizes, small_all.clone(), pin_fraction, s.len());
        if params.feasibility == Feasibility::Raise {
            let fixed = nonempty(&large) + pinned.len();
            if let Some(c) = feasible_coeff(nonempty(&small), fixed, s.len()) {
                coeff = coeff.max(c);
            }
        }
        let sets: Vec<Vec<u32>> = small
            .iter()
            .chain(&large)
            .chain(&pinned)
            .map(|&e| restrict(e))
            .collect();
        let coeffs: Vec<f64> = small
            .iter()
            .map(|_| coeff)
            .chain(large.iter().chain(&pinned).map(|_| 0.0))
            .collect();
        let cs = ConstraintSet::new(s.len(), sets, coeffs)?;
        let walk_rng = rng.derive(domain::WALK_ATTEMPT, escalations as u64);
        match lovett_meka(&cs, &start, params.delta, &walk_rng, &params.walk) {
            Ok(out) => {
                let mut edge_bounds = vec![0.0; h.m()];
                for &e in &small {
                    edge_bounds[e] = coeff * (sizes[e] as f64).sqrt();
                }
                return Ok(StepOutcome {
                    vector: out.vector,
                    n_large: large.len(),
                    n_pinned: pinned.len(),
                    coeff_small: coeff,
                    feasibility_sum: cs.feasibility_sum(),
                    escalations,
                    attempts: out.attempts,
                    steps: out.steps,
                    edge_bounds,
                });
            }
            Err(Error::WalkExhausted { .. }) if escalations < escalation_cap => {
                escalations += 1;
                coeff *= params.escalation_factor;
                pin_fraction /= 2.0;
            }
            Err(e) => return Err(e),
        }
    }
}

/// χ_i = sign(x_i) with ties sent to +1.
pub fn round_partial(x: &PartialVector) -> Coloring {
    Coloring::from_signs(&x.x)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub stage: u8,
    pub s_size: usize,
    pub alpha: f64,
    pub n_large: usize,
    pub n_pinned: usize,
    pub coeff_small: f64,
    pub feasibility_sum: f64,
    pub escalations: usize,
    pub attempts: usize,
    pub steps: usize,
    pub newly_frozen: usize,
    /// max_e |<x_after - x_before, 1_{S∩e}>|.
    pub max_round_disc: f64,
    /// max_e (|<x_after - x_before, 1_{S∩e}>| - bound_e); at most ε_num.
    pub max_round_excess: f64,
    /// max_e of the per-edge bounds summed over rounds so far.
    pub cumulative_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColoringTrace {
    pub n: usize,
    pub m: usize,
    pub params: StageParams,
    pub rounds: Vec<RoundRecord>,
    /// Σ over rounds of (c_e·√|S∩e| + ε_num), per edge.
    pub edge_bounds: Vec<f64>,
    /// |χ(e) - <x, 1_e>| at rounding, per edge.
    pub rounding_shift: Vec<f64>,
    /// |e|·δ + #(unfrozen vertices of e) at rounding, per edge.
    pub rounding_bound: Vec<f64>,
    /// Σ over stage-1 rounds of 20·√(α t ln(2/α)).
    pub stage1_series: f64,
    pub warnings: Vec<String>,
    pub report: DiscReport,
}

impl ColoringTrace {
    /// Edges whose final |χ(e)| exceeds the summed round bounds plus the
    /// rounding bound.
    pub fn telescoping_violations(&self, h: &Hypergraph, chi: &Coloring) -> Vec<usize> {
        h.edges()
            .iter()
            .enumerate()
            .filter(|(i, e)| {
                let d = chi.edge_sum(e).unsigned_abs() as f64;
                d > self.edge_bounds[*i] + self.rounding_bound[*i] + 1e-9
            })
            .map(|(i, _)| i)
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("round,stage,S_size,alpha,n_large,max_round_disc,cumulative_bound\n");
        for r in &self.rounds {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.round, r.stage, r.s_size, r.alpha, r.n_large, r.max_round_disc, r.cumulative_bound
            ));
        }
        out
    }
}

/// Colors `h` by repeated partial coloring and a final sign rounding.
pub fn color_two_stage(
    h: &Hypergraph,
    params: &StageParams,
    rng: &RandomSource,
) -> Result<(Coloring, ColoringTrace)> {
    params.validate()?;
    let n = h.n();
    let m = h.m();
    let eps = numeric_slack(n);
    let mut warnings = Vec::new();
    match check_edge_sizes(h, params.t) {
        Ok(c) if !c.ok => warnings.push(format!(
            "{} edges outside t/2 ≤ |e| ≤ 3t/2",
            c.violating.len()
        )),
        Ok(_) => {}
        Err(e) => warnings.push(e.to_string()),
    }

    let mut x = vec![0.0; n];
    let mut frozen = vec![false; n];
    let mut edge_bounds = vec![0.0; m];
    let mut rounds = Vec::new();
    let mut stage1_series = 0.0;

    for round in 0..params.round_cap {
        let s: Vec<u32> = (0..n as u32).filter(|&v| !frozen[v as usize]).collect();
        if s.is_empty() {
            break;
        }
        let alpha = s.len() as f64 / n as f64;
        let stage = params.stage_of(alpha);
        let step = stage_step(h, &s, &x, stage, params, &rng.derive(domain::PIPELINE_ROUND, round as u64))?;

        let before: Vec<f64> = s.iter().map(|&v| x[v as usize]).collect();
        for (i, &v) in s.iter().enumerate() {
            x[v as usize] = step.vector.x[i];
            frozen[v as usize] = step.vector.frozen[i];
        }
        let newly_frozen = step.vector.frozen_count();
        let mut diff = vec![0.0; n];
        for (i, &v) in s.iter().enumerate() {
            diff[v as usize] = step.vector.x[i] - before[i];
        }
        let mut max_round_disc = 0.0f64;
        let mut max_round_excess = f64::NEG_INFINITY;
        for (i, e) in h.edges().iter().enumerate() {
            let moved: f64 = e.iter().map(|&v| diff[v as usize]).sum::<f64>().abs();
            max_round_disc = max_round_disc.max(moved);
            max_round_excess = max_round_excess.max(moved - step.edge_bounds[i]);
            edge_bounds[i] += step.edge_bounds[i] + eps;
        }
        if stage == Stage::One {
            stage1_series += 20.0 * (alpha * params.t as f64 * (2.0 / alpha).ln()).sqrt();
        }
        if step.escalations > 0 {
            warnings.push(format!(
                "round {round}: coefficient escalated {} times to {:.3}",
                step.escalations, step.coeff_small
            ));
        }
        if 2 * newly_frozen < s.len() {
            return Err(Error::Convergence(format!(
                "round {round} froze {newly_frozen} of {} vertices",
                s.len()
            )));
        }
        rounds.push(RoundRecord {
            round,
            stage: stage.number(),
            s_size: s.len(),
            alpha,
            n_large: step.n_large,
            n_pinned: step.n_pinned,
            coeff_small: step.coeff_small,
            feasibility_sum: step.feasibility_sum,
            escalations: step.escalations,
            attempts: step.attempts,
            steps: step.steps,
            newly_frozen,
            max_round_disc,
            max_round_excess,
            cumulative_bound: edge_bounds.iter().copied().fold(0.0, f64::max),
        });
    }
    let leftover = frozen.iter().filter(|&&f| !f).count();
    if leftover > 0 {
        warnings.push(format!("{leftover} vertices unfrozen after {} rounds", params.round_cap));
    }

    let final_vec = PartialVector {
        x: x.clone(),
        frozen: frozen.clone(),
        delta: params.delta,
    };
    let chi = round_partial(&final_vec);
    let mut rounding_shift = Vec::with_capacity(m);
    let mut rounding_bound = Vec::with_capacity(m);
    for e in h.edges() {
        let frac: f64 = e.iter().map(|&v| x[v as usize]).sum();
        rounding_shift.push((chi.edge_sum(e) as f64 - frac).abs());
        let unfrozen = e.iter().filter(|&&v| !frozen[v as usize]).count();
        rounding_bound.push(e.len() as f64 * params.delta + unfrozen as f64);
    }
    let report = disc_of(h, &chi)?;
    Ok((
        chi,
        ColoringTrace {
            n,
            m,
            params: params.clone(),
            rounds,
            edge_bounds,
            rounding_shift,
            rounding_bound,
            stage1_series,
            warnings,
            report,
        },
    ))
}
