//! Exact first and second moments of the number of good balanced colorings
//! of an even-row Bernoulli(1/2) matrix, and the enumeration experiment that
//! checks disc ≤ 1 on sampled instances.
//!
//! A balanced coloring χ is good for a row e when χ(e) = 0; X counts the
//! balanced colorings that are good for every row.

use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::discrepancy::{brute_force_disc, disc_of, Coloring};
use crate::enumerate::{check_cap, edge_masks, for_each_balanced, signed_sum, DEFAULT_CAP};
use crate::error::{Error, Result};
use crate::hypergraph::{generate_h2_even, resample_first_column, Hypergraph};
use crate::rng::{domain, mix, RandomSource};

/// Arbitrary-precision rational in lowest terms with positive denominator.
///
/// Serialized as the string `"p/q"`, or `"p"` when q = 1.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactRational(pub BigRational);

impl ExactRational {
    pub fn new(num: BigInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::param("zero denominator"));
        }
        Ok(ExactRational(BigRational::new(num, den)))
    }

    pub fn from_integer(v: impl Into<BigInt>) -> Self {
        ExactRational(BigRational::from_integer(v.into()))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// Truncated decimal expansion with `digits` places after the point.
    pub fn to_decimal(&self, digits: usize) -> String {
        let neg = self.0 < BigRational::zero();
        let abs = if neg { -self.0.clone() } else { self.0.clone() };
        let scale = BigInt::from(10u32).pow(digits as u32);
        let scaled = (abs.numer() * &scale) / abs.denom();
        let s = scaled.to_string();
        let s = format!("{s:0>width$}", width = digits + 1);
        let (int, frac) = s.split_at(s.len() - digits);
        let sign = if neg { "-" } else { "" };
        if digits == 0 {
            format!("{sign}{int}")
        } else {
            format!("{sign}{int}.{frac}")
        }
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl FromStr for ExactRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::param(format!("not a rational: {s:?}"));
        match s.split_once('/') {
            Some((p, q)) => ExactRational::new(
                p.trim().parse().map_err(|_| bad())?,
                q.trim().parse().map_err(|_| bad())?,
            ),
            None => Ok(ExactRational::from_integer(
                s.trim().parse::<BigInt>().map_err(|_| bad())?,
            )),
        }
    }
}

impl Serialize for ExactRational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactRational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn check_even(n: usize) -> Result<()> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::param(format!("n must be even and at least 2, got {n}")));
    }
    Ok(())
}

fn central(n: usize) -> BigInt {
    binomial(BigInt::from(n), BigInt::from(n / 2))
}

fn pow2(k: usize) -> BigInt {
    BigInt::one() << k
}

/// Number of even-weight rows of length n that a fixed pair of balanced
/// colorings at Hamming distance d both split evenly.
fn both_good_rows(n: usize, d: usize) -> BigInt {
    central(d) * central(n - d)
}

/// Pr(χ(e) = 0) for a fixed balanced χ and a uniform even-weight row:
/// C(n, n/2) / 2^(n-1).
pub fn prob_good(n: usize) -> Result<ExactRational> {
    check_even(n)?;
    ExactRational::new(central(n), pow2(n - 1))
}

/// Pr(χ₁(e) = 0 and χ₂(e) = 0) for balanced χ₁, χ₂ at Hamming distance d:
/// C(d, d/2)·C(n-d, (n-d)/2) / 2^(n-1).
pub fn prob_both_good(n: usize, d: usize) -> Result<ExactRational> {
    check_even(n)?;
    if d % 2 != 0 || d > n {
        return Err(Error::param(format!("distance must be even and at most {n}, got {d}")));
    }
    ExactRational::new(both_good_rows(n, d), pow2(n - 1))
}

/// E[X] = C(n, n/2)·prob_good(n)^m.
pub fn expected_count(n: usize, m: usize) -> Result<ExactRational> {
    check_even(n)?;
    let c = central(n);
    ExactRational::new(&c * c.pow(m as u32), pow2((n - 1) * m))
}

/// Asymptotic mirror C(n, n/2)·(2√(2/(πn)))^m, as a float.
pub fn expected_count_asymptotic(n: usize, m: usize) -> f64 {
    let c = central(n).to_f64().unwrap_or(f64::INFINITY);
    c * (2.0 * (2.0 / (std::f64::consts::PI * n as f64)).sqrt()).powi(m as i32)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub n: usize,
    pub m: usize,
    pub e_x: ExactRational,
    pub e_x2: ExactRational,
    /// E[X²] / E[X]².
    pub ratio: ExactRational,
    pub e_x_f64: f64,
    pub e_x2_f64: f64,
    pub ratio_f64: f64,
    pub e_x_asymptotic: f64,
}

/// Exact E[X²] = C(n, n/2)·Σ_j C(n/2, j)²·prob_both_good(n, 2j)^m, with the
/// ratio to E[X]².
pub fn second_moment(n: usize, m: usize) -> Result<MomentReport> {
    check_even(n)?;
    let h = n / 2;
    let c = central(n);
    let mut sum = BigInt::zero();
    // C(h, j) built incrementally
    let mut row = BigInt::one();
    for j in 0..=h {
        if j > 0 {
            row = row * BigInt::from(h - j + 1) / BigInt::from(j);
        }
        sum += &row * &row * both_good_rows(n, 2 * j).pow(m as u32);
    }
    let e_x2 = ExactRational::new(&c * sum, pow2((n - 1) * m))?;
    let e_x = expected_count(n, m)?;
    let ratio = ExactRational(&e_x2.0 / (&e_x.0 * &e_x.0));
    Ok(MomentReport {
        n,
        m,
        e_x_f64: e_x.to_f64(),
        e_x2_f64: e_x2.to_f64(),
        ratio_f64: ratio.to_f64(),
        e_x_asymptotic: expected_count_asymptotic(n, m),
        e_x,
        e_x2,
        ratio,
    })
}

/// max(1, ⌊n / (8 ln n)⌋).
pub fn m_default(n: usize) -> usize {
    if n < 2 {
        return 1;
    }
    ((n as f64 / (8.0 * (n as f64).ln())).floor() as usize).max(1)
}

/// Count of good balanced colorings and the first one found, as a +1 mask.
fn count_with_witness(h: &Hypergraph, cap: usize) -> Result<(u64, Option<u64>)> {
    let n = h.n();
    check_even(n)?;
    check_cap(n, cap)?;
    let masks = edge_masks(h);
    let mut count = 0u64;
    let mut witness = None;
    for_each_balanced(n, |plus| {
        if masks.iter().all(|&e| signed_sum(plus, e) == 0) {
            count += 1;
            witness.get_or_insert(plus);
        }
        ControlFlow::Continue(())
    });
    Ok((count, witness))
}

/// #{balanced χ : χ(e) = 0 for every edge}, by enumeration of the
/// C(n, n/2) balanced colorings.
pub fn count_good_balanced(h: &Hypergraph, cap: usize) -> Result<BigUint> {
    count_with_witness(h, cap).map(|(c, _)| BigUint::from(c))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum H2Mode {
    /// Only test X > 0 on the even-row instance.
    Exact,
    /// Also resample vertex 0's column and check disc ≤ 1 on the result.
    Resample,
}

impl FromStr for H2Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(H2Mode::Exact),
            "resample" => Ok(H2Mode::Resample),
            _ => Err(Error::param(format!("unknown mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H2Trial {
    pub trial: usize,
    pub seed: u64,
    #[serde(rename = "X")]
    pub x: u64,
    /// Exact mode: X > 0.  Resample mode: disc ≤ 1 on the resampled instance.
    pub disc_check: bool,
    /// Discrepancy certified on the resampled instance (resample mode only).
    pub disc: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct H2Experiment {
    pub n: usize,
    pub m: usize,
    pub mode: H2Mode,
    pub trials: usize,
    pub fraction_x_positive: f64,
    pub fraction_disc_check: f64,
    /// Binomial standard error of `fraction_x_positive`.
    pub sigma_x_positive: f64,
    pub records: Vec<H2Trial>,
}

/// Seed of trial `i` under master source `rng`.
pub fn trial_seed(rng: &RandomSource, i: usize) -> u64 {
    mix(rng.master_seed, domain::EXPERIMENT_TRIAL, i as u64)
}

/// One trial on the even-row instance generated from `seed`.
pub fn h2_trial(n: usize, m: usize, mode: H2Mode, cap: usize, trial: usize, seed: u64) -> Result<H2Trial> {
    let src = RandomSource::new(seed);
    let h = if m == 0 {
        Hypergraph::new(n, Vec::new())?
    } else {
        generate_h2_even(n, m, &src)?
    };
    let (x, witness) = count_with_witness(&h, cap)?;
    let (disc_check, disc) = match mode {
        H2Mode::Exact => (x > 0, None),
        H2Mode::Resample => {
            let h1 = resample_first_column(&h, &src)?;
            let mut best = None;
            if let Some(plus) = witness {
                best = Some(disc_of(&h1, &Coloring::from_plus_mask(n, plus))?.disc);
            }
            if best.is_none_or(|d| d > 1) {
                best = Some(brute_force_disc(&h1, cap)?.0);
            }
            let d = best.unwrap_or(u64::MAX);
            (d <= 1, Some(d))
        }
    };
    Ok(H2Trial { trial, seed, x, disc_check, disc })
}

/// Samples `trials` even-row instances and counts their good balanced
/// colorings exactly.  Trials run in parallel; output is in trial order.
pub fn h2_experiment(
    n: usize,
    m: usize,
    trials: usize,
    mode: H2Mode,
    cap: usize,
    rng: &RandomSource,
) -> Result<H2Experiment> {
    check_even(n)?;
    check_cap(n, cap)?;
    if trials == 0 {
        return Err(Error::param("trials must be positive"));
    }
    let records = (0..trials)
        .into_par_iter()
        .map(|i| h2_trial(n, m, mode, cap, i, trial_seed(rng, i)))
        .collect::<Result<Vec<_>>>()?;
    let frac = |f: &dyn Fn(&H2Trial) -> bool| {
        records.iter().filter(|r| f(r)).count() as f64 / trials as f64
    };
    let fx = frac(&|r| r.x > 0);
    Ok(H2Experiment {
        n,
        m,
        mode,
        trials,
        fraction_x_positive: fx,
        fraction_disc_check: frac(&|r| r.disc_check),
        sigma_x_positive: (fx * (1.0 - fx) / trials as f64).sqrt(),
        records,
    })
}

/// `h2_experiment` with the default enumeration cap.
pub fn h2_experiment_default(
    n: usize,
    m: usize,
    trials: usize,
    mode: H2Mode,
    rng: &RandomSource,
) -> Result<H2Experiment> {
    h2_experiment(n, m, trials, mode, DEFAULT_CAP, rng)
}
