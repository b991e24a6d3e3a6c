//! Discrepancy evaluation, exhaustive oracles, and the two classical
//! baselines (uniform random colorings and Beck-Fiala rounding).

use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::enumerate::{check_cap, edge_masks, for_each_balanced, signed_sum};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::linalg::{kernel_vector, Dense};
use crate::rng::{domain, RandomSource};

/// A full ±1 coloring of the vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Coloring(Vec<i8>);

impl Coloring {
    pub fn new(values: Vec<i8>) -> Result<Self> {
        if values.iter().any(|&v| v != 1 && v != -1) {
            return Err(Error::param("coloring entries must be +1 or -1"));
        }
        Ok(Coloring(values))
    }

    /// Signs of a real vector, with zero sent to +1.
    pub fn from_signs(x: &[f64]) -> Self {
        Coloring(x.iter().map(|&v| if v < 0.0 { -1 } else { 1 }).collect())
    }

    pub fn all_plus(n: usize) -> Self {
        Coloring(vec![1; n])
    }

    /// Coloring that is -1 exactly on the set bits of `minus`.
    pub fn from_minus_mask(n: usize, minus: u64) -> Self {
        Coloring((0..n).map(|i| if minus >> i & 1 == 1 { -1 } else { 1 }).collect())
    }

    pub fn from_plus_mask(n: usize, plus: u64) -> Self {
        Coloring((0..n).map(|i| if plus >> i & 1 == 1 { 1 } else { -1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    pub fn negated(&self) -> Self {
        Coloring(self.0.iter().map(|v| -v).collect())
    }

    pub fn edge_sum(&self, edge: &[u32]) -> i64 {
        edge.iter().map(|&v| self.0[v as usize] as i64).sum()
    }
}

impl fmt::Display for Coloring {
    /// One line of space-separated `1` / `-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl FromStr for Coloring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let line = s
            .lines()
            .find(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .unwrap_or("");
        let values = line
            .split_whitespace()
            .map(|tok| match tok {
                "1" | "+1" => Ok(1),
                "-1" => Ok(-1),
                _ => Err(Error::Parse {
                    line: 1,
                    message: format!("not a ±1 entry: {tok:?}"),
                }),
            })
            .collect::<Result<Vec<i8>>>()?;
        Ok(Coloring(values))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiscReport {
    pub disc: u64,
    /// Lowest-index edge attaining `disc`; `None` when there are no edges.
    pub argmax_edge: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_edge: Option<Vec<u64>>,
}

/// max_e |χ(e)| together with the per-edge values.
pub fn disc_of(h: &Hypergraph, chi: &Coloring) -> Result<DiscReport> {
    if chi.len() != h.n() {
        return Err(Error::param(format!(
            "coloring has length {} but the hypergraph has {} vertices",
            chi.len(),
            h.n()
        )));
    }
    let per_edge: Vec<u64> = h.edges().iter().map(|e| chi.edge_sum(e).unsigned_abs()).collect();
    let mut disc = 0;
    let mut argmax = None;
    for (i, &d) in per_edge.iter().enumerate() {
        if argmax.is_none() || d > disc {
            disc = d;
            argmax = Some(i);
        }
    }
    Ok(DiscReport {
        disc,
        argmax_edge: argmax,
        per_edge: Some(per_edge),
    })
}

/// Exact discrepancy by enumeration of the 2^(n-1) colorings with the last
/// vertex fixed to +1.
///
/// Colorings are ranked by the integer whose bit `i` marks χ_i = -1; the
/// witness is the lowest-ranked optimum.
pub fn brute_force_disc(h: &Hypergraph, cap: usize) -> Result<(u64, Coloring)> {
    let n = h.n();
    check_cap(n, cap)?;
    if n == 0 {
        return Ok((0, Coloring(Vec::new())));
    }
    let adj = h.vertex_edges();
    let mut sums: Vec<i64> = h.edges().iter().map(|e| e.len() as i64).collect();
    let floor = h.edges().iter().map(|e| (e.len() % 2) as u64).max().unwrap_or(0);
    let current_max = |sums: &[i64]| sums.iter().map(|s| s.unsigned_abs()).max().unwrap_or(0);

    let mut best = (current_max(&sums), 0u64);
    let total = 1u64 << (n - 1);
    let mut rank = 0u64;
    while best.0 > floor && rank + 1 < total {
        // binary increment: trailing ones go back to +1, next bit to -1
        let next = rank + 1;
        let cleared = rank & !next;
        let set = next & !rank;
        for v in 0..n {
            let bit = 1u64 << v;
            if cleared & bit != 0 {
                adj[v].iter().for_each(|&e| sums[e as usize] += 2);
            } else if set & bit != 0 {
                adj[v].iter().for_each(|&e| sums[e as usize] -= 2);
            }
            if bit == set {
                break;
            }
        }
        rank = next;
        let d = current_max(&sums);
        if d < best.0 {
            best = (d, rank);
        }
    }
    Ok((best.0, Coloring::from_minus_mask(n, best.1)))
}

/// Whether some balanced coloring has max_e |χ(e)| ≤ `target`; returns the
/// first such coloring in lexicographic order of its +1 set.
pub fn brute_force_balanced_disc(
    h: &Hypergraph,
    target: u64,
    cap: usize,
) -> Result<(bool, Option<Coloring>)> {
    let n = h.n();
    if n % 2 != 0 {
        return Err(Error::param(format!("balanced colorings need even n, got {n}")));
    }
    check_cap(n, cap)?;
    let masks = edge_masks(h);
    let mut witness = None;
    for_each_balanced(n, |plus| {
        if masks
            .iter()
            .all(|&e| signed_sum(plus, e).unsigned_abs() <= target)
        {
            witness = Some(plus);
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(match witness {
        Some(plus) => (true, Some(Coloring::from_plus_mask(n, plus))),
        None => (false, None),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineSummary {
    pub trials: usize,
    pub min: u64,
    /// Lower median: element `(trials - 1) / 2` of the sorted values.
    pub median: u64,
    pub max: u64,
    pub mean: f64,
}

/// Discrepancy statistics of uniformly random colorings.
pub fn random_coloring_baseline(
    h: &Hypergraph,
    trials: usize,
    rng: &RandomSource,
) -> Result<BaselineSummary> {
    if trials == 0 {
        return Err(Error::param("trials must be at least 1"));
    }
    let mut values: Vec<u64> = (0..trials)
        .map(|i| {
            let mut r = rng.stream(domain::RANDOM_COLORING, i as u64);
            let chi = Coloring((0..h.n()).map(|_| if r.random::<bool>() { 1 } else { -1 }).collect());
            h.edges()
                .iter()
                .map(|e| chi.edge_sum(e).unsigned_abs())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mean = values.iter().sum::<u64>() as f64 / trials as f64;
    values.sort_unstable();
    Ok(BaselineSummary {
        trials,
        min: values[0],
        median: values[(trials - 1) / 2],
        max: values[trials - 1],
        mean,
    })
}

const BF_PIVOT_TOL: f64 = 1e-9;
const BF_SNAP_TOL: f64 = 1e-7;

/// Beck-Fiala iterative rounding.
///
/// Starting from x = 0, an edge stays active while it holds more than `t`
/// floating coordinates (t = max degree).  Each step moves x along a kernel
/// vector of the active rows until some coordinate reaches ±1; afterwards
/// the remaining coordinates are rounded by sign.  Every edge ends with
/// |χ(e)| ≤ 2t - 1.
pub fn beck_fiala_color(h: &Hypergraph) -> Coloring {
    let n = h.n();
    let t = h.max_degree();
    let mut x = vec![0.0f64; n];
    let mut floating = vec![true; n];

    loop {
        let active: Vec<&Vec<u32>> = h
            .edges()
            .iter()
            .filter(|e| e.iter().filter(|&&v| floating[v as usize]).count() > t)
            .collect();
        if active.is_empty() {
            break;
        }
        // #active < #floating, so the first #active + 1 floating columns
        // already carry a kernel vector.
        let cols: Vec<usize> = (0..n).filter(|&v| floating[v]).take(active.len() + 1).collect();
        let mut col_of = vec![usize::MAX; n];
        for (j, &v) in cols.iter().enumerate() {
            col_of[v] = j;
        }
        let mut a = Dense::zeros(active.len(), cols.len());
        for (r, e) in active.iter().enumerate() {
            for &v in e.iter() {
                let j = col_of[v as usize];
                if j != usize::MAX {
                    a.set(r, j, 1.0);
                }
            }
        }
        let Some(y) = kernel_vector(a, BF_PIVOT_TOL) else {
            // cannot happen for a wide matrix; fall back to freezing the
            // lowest floating coordinate
            let v = cols[0];
            x[v] = if x[v] >= 0.0 { 1.0 } else { -1.0 };
            floating[v] = false;
            continue;
        };
        let mut step = f64::INFINITY;
        for (j, &v) in cols.iter().enumerate() {
            if y[j] > BF_PIVOT_TOL {
                step = step.min((1.0 - x[v]) / y[j]);
            } else if y[j] < -BF_PIVOT_TOL {
                step = step.min((-1.0 - x[v]) / y[j]);
            }
        }
        let mut froze = false;
        for (j, &v) in cols.iter().enumerate() {
            x[v] = (x[v] + step * y[j]).clamp(-1.0, 1.0);
            if x[v].abs() >= 1.0 - BF_SNAP_TOL {
                x[v] = x[v].signum();
                floating[v] = false;
                froze = true;
            }
        }
        if !froze {
            // numerical corner: freeze the coordinate closest to the boundary
            let v = cols
                .iter()
                .copied()
                .max_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs()).then(b.cmp(&a)))
                .expect("nonempty");
            x[v] = if x[v] >= 0.0 { 1.0 } else { -1.0 };
            floating[v] = false;
        }
    }
    Coloring(x.iter().map(|&v| if v >= 0.0 { 1 } else { -1 }).collect())
}
