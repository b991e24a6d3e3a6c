//! Acceptance suite.  One line per criterion:
//!
//!     [PASS] 3 h2 n=24 m=2 good colorings: ... (12.3 s, limit 1800 s)
//!
//! Pass criterion numbers as arguments to run a subset.  The process exits
//! nonzero if any selected criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use common::*;
use disclab::discrepancy::{beck_fiala_color, brute_force_disc, random_coloring_baseline};
use disclab::enumerate::DEFAULT_CAP;
use disclab::h2_moments::{expected_count, h2_experiment, m_default, second_moment, H2Mode};
use disclab::hypergraph::{generate_h1, generate_h2, generate_h2_even, Hypergraph};
use disclab::partial_coloring::{lovett_meka, numeric_slack, ConstraintSet, PartialVector, WalkConfig};
use disclab::spectral::{centered_indicator, incidence_apply, restricted_norm};
use disclab::two_stage::{color_two_stage, measure_c_norm, StageParams};
use disclab::RandomSource;
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

type Criterion = (u32, &'static str, f64, fn() -> Verdict);

const CRITERIA: [Criterion; 10] = [
    (1, "exact moments equal enumeration averages", 60.0, exact_moments_vs_enumeration),
    (2, "expected count identity up to n=200, m=50", 60.0, expected_count_identity),
    (3, "h2 n=24 m=2 good balanced colorings exist", 1800.0, h2_desk_scale),
    (4, "second-moment ratio trend at sparse m", 300.0, second_moment_trend),
    (5, "partial coloring walk postconditions", 300.0, walk_postconditions),
    (6, "two-stage pipeline on h1(4096, 4096, 64)", 1200.0, two_stage_pipeline),
    (7, "exact discrepancy dominates heuristics", 120.0, oracle_dominance),
    (8, "restricted norm vs dense eigensolver", 60.0, spectral_correctness),
    (9, "sigma/sqrt(t) flat across t at n=4096", 600.0, norm_trend),
    (10, "determinism across runs and --jobs", 600.0, determinism),
];

fn main() {
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (k, name, limit, f) in CRITERIA {
        if !selected.is_empty() && !selected.contains(&k) {
            continue;
        }
        let start = Instant::now();
        let v = catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|p| verdict(false, format!("panicked: {:?}", p.downcast_ref::<String>())));
        let secs = start.elapsed().as_secs_f64();
        let pass = v.pass && secs <= limit;
        let late = if secs > limit { "; over time limit" } else { "" };
        println!(
            "[{}] {k} {name}: {}{late} ({secs:.1} s, limit {limit:.0} s)",
            if pass { "PASS" } else { "FAIL" },
            v.detail
        );
        if !pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

fn exact_moments_vs_enumeration() -> Verdict {
    let mut bad = Vec::new();
    let mut checked = 0;
    for n in [4, 6, 8, 10] {
        for m in 0..=2 {
            let (ex, ex2) = moment_oracle(n, m);
            let e = expected_count(n, m).unwrap().0;
            let s = second_moment(n, m).unwrap();
            if e != ex || s.e_x.0 != ex || s.e_x2.0 != ex2 {
                bad.push(format!("(n={n}, m={m}): E[X] {e} vs {ex}, E[X²] {} vs {ex2}", s.e_x2));
            }
            checked += 1;
        }
    }
    verdict(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{checked} (n, m) pairs equal as exact rationals")
        } else {
            bad.join("; ")
        },
    )
}

fn expected_count_identity() -> Verdict {
    let mut bad = Vec::new();
    let mut checked = 0;
    for n in (2..=200usize).step_by(2) {
        let central = BigInt::from(binomial(n as u64, n as u64 / 2));
        for m in 0..=50usize {
            let lhs = expected_count(n, m).unwrap().0 * BigRational::from_integer(BigInt::from(2).pow((m * (n - 1)) as u32));
            let rhs = BigRational::from_integer(central.pow(m as u32 + 1));
            if lhs != rhs {
                bad.push(format!("(n={n}, m={m})"));
            }
            checked += 1;
        }
    }
    verdict(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{checked} (n, m) pairs, even n ≤ 200, m ≤ 50, exact")
        } else {
            format!("mismatch at {}", bad.join(", "))
        },
    )
}

fn h2_desk_scale() -> Verdict {
    let (n, m, trials) = (24, 2, 100);
    let rng = RandomSource::new(2024);
    let exp = h2_experiment(n, m, trials, H2Mode::Exact, DEFAULT_CAP, &rng).unwrap();
    let ratio = second_moment(n, m).unwrap().ratio_f64;
    let f = exp.fraction_x_positive;
    let floor = 1.0 - (ratio - 1.0) - 3.0 * exp.sigma_x_positive;

    // recount three trials with the oracle on the regenerated instance
    let cols = balanced_masks(n);
    let mut recount_ok = true;
    for r in exp.records.iter().take(3) {
        let h = generate_h2_even(n, m, &RandomSource::new(r.seed)).unwrap();
        let masks: Vec<u64> = h.edges().iter().map(|e| e.iter().map(|&v| 1u64 << v).sum()).collect();
        let x = cols
            .iter()
            .filter(|&&plus| masks.iter().all(|&e| 2 * (e & plus).count_ones() == e.count_ones()))
            .count() as u64;
        recount_ok &= x == r.x;
    }
    verdict(
        f >= 0.8 && f >= floor && recount_ok,
        format!(
            "fraction X>0 = {f:.2} (need ≥ 0.80 and ≥ 1-(ratio-1)-3σ = {floor:.4}, ratio {ratio:.5}, σ {:.4}); oracle recount {}",
            exp.sigma_x_positive,
            if recount_ok { "agrees" } else { "DISAGREES" }
        ),
    )
}

fn second_moment_trend() -> Verdict {
    let ns = [64usize, 128, 256, 512];
    let rows: Vec<(usize, usize, f64, BigRational)> = ns
        .iter()
        .map(|&n| {
            let m = m_default(n);
            let r = second_moment(n, m).unwrap();
            (n, m, r.ratio_f64, r.ratio.0)
        })
        .collect();
    let decreasing = rows.windows(2).all(|w| w[1].3 < w[0].3);
    let last_ok = rows[3].3 <= BigRational::new(BigInt::from(3), BigInt::from(2));
    let listing: Vec<String> = rows.iter().map(|(n, m, r, _)| format!("n={n} m={m}: {r:.7}")).collect();
    verdict(
        decreasing && last_ok,
        format!(
            "{}; strictly decreasing: {decreasing}; ≤ 1.5 at n=512: {last_ok}",
            listing.join(", ")
        ),
    )
}

fn walk_postconditions() -> Verdict {
    let (n, t) = (256usize, 16usize);
    let delta = 1.0 / n as f64;
    let eps = numeric_slack(n);
    let mut violations = Vec::new();
    let mut retried = 0;
    let mut failed = 0;
    for i in 0..100u64 {
        let src = RandomSource::new(5000 + i);
        let h = generate_h1(n, n, t, &src).unwrap();
        let mut r = ChaCha8Rng::seed_from_u64(9000 + i);
        let (mut x0, mut frozen0) = (vec![0.0; n], vec![false; n]);
        if i % 2 == 1 {
            for j in 0..n {
                if r.random::<f64>() < 0.25 {
                    x0[j] = if r.random::<bool>() { 1.0 } else { -1.0 };
                    frozen0[j] = true;
                } else {
                    x0[j] = r.random_range(-0.5..0.5);
                }
            }
        }
        // k hard constraints (c = 0); the rest share what is left of the
        // Σ exp(-c²/16) ≤ n/16 budget
        let k = (i as usize % 4) * 4;
        let m = h.m();
        let c = 4.0 * ((m - k) as f64 / (n as f64 / 16.0 - k as f64)).ln().sqrt() * 1.001;
        let coeffs: Vec<f64> = (0..m).map(|e| if e < k { 0.0 } else { c }).collect();
        let sets = h.edges().to_vec();
        let cs = ConstraintSet::new(n, sets.clone(), coeffs.clone()).unwrap();
        let start = PartialVector { x: x0.clone(), frozen: frozen0.clone(), delta };
        match lovett_meka(&cs, &start, delta, &src, &WalkConfig::default()) {
            Ok(out) => {
                if out.attempts > 1 {
                    retried += 1;
                }
                if let Err(e) = check_walk_output(&sets, &coeffs, &x0, &frozen0, &out.vector.x, delta, eps) {
                    violations.push(format!("instance {i}: {e}"));
                }
            }
            Err(_) => {
                failed += 1;
                retried += 1;
            }
        }
    }
    verdict(
        violations.is_empty() && retried <= 10,
        format!(
            "100 instances, {} violations, {retried} needed a retry (≤ 10 allowed), {failed} exhausted retries{}",
            violations.len(),
            violations.first().map(|v| format!("; first: {v}")).unwrap_or_default()
        ),
    )
}

struct PipelineRun {
    disc: u64,
    random_median: u64,
}

fn pipeline_instance(n: usize, t: usize, seed: u64) -> Result<PipelineRun, String> {
    let src = RandomSource::new(seed);
    let h = generate_h1(n, n, t, &src).map_err(|e| e.to_string())?;
    let c = measure_c_norm(&h, t, &src).map_err(|e| e.to_string())?;
    let params = StageParams::practical(n, t, c).map_err(|e| e.to_string())?;
    let (chi, trace) = color_two_stage(&h, &params, &src).map_err(|e| e.to_string())?;

    if trace.rounds.len() > params.round_cap || trace.warnings.iter().any(|w| w.contains("unfrozen")) {
        return Err(format!("seed {seed}: did not finish within {} rounds", params.round_cap));
    }
    let vals = chi.values();
    if vals.len() != n || vals.iter().any(|&v| v != 1 && v != -1) {
        return Err(format!("seed {seed}: not a ±1 coloring"));
    }
    let slack = numeric_slack(n);
    if let Some(r) = trace.rounds.iter().find(|r| r.max_round_excess > slack) {
        return Err(format!("seed {seed}: round {} exceeds its bound by {}", r.round, r.max_round_excess));
    }
    for (i, e) in h.edges().iter().enumerate() {
        let d = edge_sum(e, vals).unsigned_abs() as f64;
        if trace.rounding_shift[i] > trace.rounding_bound[i] + 1e-9
            || d > trace.edge_bounds[i] + trace.rounding_bound[i] + 1e-9
        {
            return Err(format!("seed {seed}: telescoped bound fails on edge {i}"));
        }
    }
    let d = disc(h.edges(), vals);
    let base = random_coloring_baseline(&h, 51, &src).map_err(|e| e.to_string())?;
    Ok(PipelineRun { disc: d, random_median: base.median })
}

fn two_stage_pipeline() -> Verdict {
    let n = 4096;
    let mut errors = Vec::new();
    let mut per_t = Vec::new();
    let mut main_runs = Vec::new();
    for (t, count) in [(64usize, 20u64), (36, 5), (16, 5)] {
        let mut discs = Vec::new();
        for i in 0..count {
            match pipeline_instance(n, t, 60_000 + 100 * t as u64 + i) {
                Ok(r) => {
                    discs.push(r.disc as f64);
                    if t == 64 {
                        main_runs.push(r);
                    }
                }
                Err(e) => errors.push(e),
            }
        }
        per_t.push((t, median_f64(&discs) / (t as f64).sqrt()));
    }
    let bound = 2 * 64 - 3;
    let discs: Vec<f64> = main_runs.iter().map(|r| r.disc as f64).collect();
    let bases: Vec<f64> = main_runs.iter().map(|r| r.random_median as f64).collect();
    let max_disc = discs.iter().copied().fold(0.0, f64::max);
    let med = median_f64(&discs);
    let base_med = median_f64(&bases);
    let consts: Vec<f64> = per_t.iter().map(|p| p.1).collect();
    let spread = consts.iter().copied().fold(0.0, f64::max) / consts.iter().copied().fold(f64::INFINITY, f64::min);

    let all_ok = errors.is_empty() && main_runs.len() == 20;
    let bound_ok = max_disc <= bound as f64;
    let median_ok = med <= 0.5 * base_med;
    let trend_ok = spread < 2.5;
    let table: Vec<String> = per_t.iter().map(|(t, c)| format!("t={t}: {c:.3}")).collect();
    verdict(
        all_ok && bound_ok && median_ok && trend_ok,
        format!(
            "20 instances valid with telescoped bounds: {all_ok}{}; max disc {max_disc} (≤ {bound}: {bound_ok}); \
             median disc {med} vs 0.5 × random median {base_med} ({median_ok}, ratio {:.3}); \
             median disc/√t {} spread {spread:.2} (< 2.5: {trend_ok})",
            errors.first().map(|e| format!(" [{e}]")).unwrap_or_default(),
            med / base_med,
            table.join(", ")
        ),
    )
}

fn oracle_dominance() -> Verdict {
    let mut bad = Vec::new();
    for i in 0..50u64 {
        let src = RandomSource::new(7000 + i);
        let n = 6 + (i as usize % 9);
        let h: Hypergraph = if i % 2 == 0 {
            generate_h1(n, n, 2 + i as usize % 3, &src).unwrap()
        } else {
            generate_h2(n, n, 0.3, &src).unwrap()
        };
        let t = h.max_degree().max(1);
        let exact = brute_disc(n, h.edges());
        let (lib, _) = brute_force_disc(&h, DEFAULT_CAP).unwrap();
        let bf = disc(h.edges(), beck_fiala_color(&h).values());
        let two_stage = measure_c_norm(&h, t, &src)
            .and_then(|c| StageParams::practical(n, t, c))
            .and_then(|p| color_two_stage(&h, &p, &src))
            .map(|(chi, _)| disc(h.edges(), chi.values()));
        match two_stage {
            Ok(ts) => {
                if lib != exact || exact > bf || exact > ts || bf > 2 * t as u64 - 1 {
                    bad.push(format!("instance {i}: exact {exact} lib {lib} bf {bf} two-stage {ts} t {t}"));
                }
            }
            Err(e) => bad.push(format!("instance {i}: two-stage failed: {e}")),
        }
    }
    verdict(
        bad.is_empty(),
        if bad.is_empty() {
            "50 instances (n ≤ 14): brute ≤ Beck-Fiala, brute ≤ two-stage, Beck-Fiala ≤ 2t-1".to_string()
        } else {
            bad.join("; ")
        },
    )
}

fn spectral_correctness() -> Verdict {
    let mut worst_rel = 0.0f64;
    let mut norm_bad = Vec::new();
    for i in 0..50u64 {
        let src = RandomSource::new(8000 + i);
        let mut r = ChaCha8Rng::seed_from_u64(i);
        let n = r.random_range(8..=64usize);
        let h = if i % 2 == 0 {
            let t = r.random_range(2..=6usize);
            generate_h1(n, r.random_range(t.max(n / 2)..=n), t, &src).unwrap()
        } else {
            generate_h2(n, r.random_range(4..=n), 0.2, &src).unwrap()
        };
        let est = restricted_norm(&h, None, 1e-15, 1_000_000, &src).unwrap();
        let want = dense_restricted_norm(n, h.edges());
        let rel = (est.sigma - want).abs() / want.max(1e-300);
        worst_rel = worst_rel.max(rel);
        if rel > 1e-7 {
            norm_bad.push(format!("instance {i}: {} vs {want}", est.sigma));
        }
    }
    let mut worst_identity = 0.0f64;
    let mut identity_ok = true;
    for i in 0..100u64 {
        let src = RandomSource::new(8500 + i);
        let mut r = ChaCha8Rng::seed_from_u64(100 + i);
        let n = r.random_range(10..=200usize);
        let t = r.random_range(1..=8usize);
        let h = generate_h1(n, r.random_range(t..=n), t, &src).unwrap();
        let mut s: Vec<u32> = (0..n as u32).filter(|_| r.random::<f64>() < 0.3).collect();
        if s.is_empty() {
            s.push(0);
        }
        let alpha = s.len() as f64 / n as f64;
        let inside: Vec<bool> = (0..n).map(|v| s.contains(&(v as u32))).collect();
        let lhs: f64 = incidence_apply(&h, &centered_indicator(n, &s).unwrap()).iter().map(|y| y * y).sum();
        let rhs: f64 = h
            .edges()
            .iter()
            .map(|e| {
                let k = e.iter().filter(|&&v| inside[v as usize]).count() as f64;
                (k - alpha * e.len() as f64).powi(2)
            })
            .sum();
        let err = (lhs - rhs).abs();
        worst_identity = worst_identity.max(err / n as f64);
        identity_ok &= err <= 1e-9 * n as f64;
    }
    verdict(
        norm_bad.is_empty() && identity_ok,
        format!(
            "norm: worst relative error {worst_rel:.2e} over 50 instances (≤ 1e-7){}; identity: worst |Δ|/n {worst_identity:.2e} over 100 pairs (≤ 1e-9)",
            norm_bad.first().map(|b| format!(" [{b}]")).unwrap_or_default()
        ),
    )
}

fn norm_trend() -> Verdict {
    let n = 4096;
    let mut meds = Vec::new();
    for t in [16usize, 32, 64] {
        let vals: Vec<f64> = (0..10u64)
            .map(|i| {
                let src = RandomSource::new(90_000 + 100 * t as u64 + i);
                let h = generate_h1(n, n, t, &src).unwrap();
                restricted_norm(&h, Some(t), 1e-6, 50 * n, &src).unwrap().c_norm
            })
            .collect();
        meds.push((t, median_f64(&vals)));
    }
    let hi = meds.iter().map(|m| m.1).fold(0.0, f64::max);
    let lo = meds.iter().map(|m| m.1).fold(f64::INFINITY, f64::min);
    let listing: Vec<String> = meds.iter().map(|(t, c)| format!("t={t}: {c:.3}")).collect();
    verdict(
        hi / lo <= 2.0,
        format!("median σ/√t {}; max/min {:.3} (≤ 2)", listing.join(", "), hi / lo),
    )
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_disclab"))
        .args(args)
        .current_dir(dir)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("sweep.json"),
        r#"{"kind":"two-stage-sweep","grid":{"n":[512],"t":[16]},"trials":3,"master_seed":7}"#,
    )
    .unwrap();
    std::fs::write(
        d.join("h2.json"),
        r#"{"kind":"h2-sweep","grid":{"n":[12,16],"m":[1,2]},"trials":6,"master_seed":11,"h2_mode":"resample"}"#,
    )
    .unwrap();
    let mut checks = Vec::new();
    let mut mismatches = Vec::new();
    let result = (|| -> Result<(), String> {
        for run in 0..3 {
            let jobs = if run == 2 { "8" } else { "1" };
            let tag = format!("{run}");
            let j = ["--jobs", jobs];
            run_cli(d, &[&["generate-h1", "--n", "2000", "--t", "10", "--seed", "42", "--out", &format!("h1_{tag}.txt")][..], &j].concat())?;
            run_cli(d, &[&["generate-h2", "--n", "300", "--m", "200", "--p", "0.1", "--seed", "42", "--out", &format!("h2_{tag}.txt")][..], &j].concat())?;
            run_cli(d, &[&["color-two-stage", "--input", "h1_0.txt", "--t", "10", "--seed", "5", "--trace", &format!("trace_{tag}.csv"), "--out", &format!("chi_{tag}.txt")][..], &j].concat())?;
            run_cli(d, &[&["beck-fiala", "--input", "h2_0.txt", "--out", &format!("bf_{tag}.txt")][..], &j].concat())?;
            run_cli(d, &[&["experiment", "--config", "sweep.json", "--out", &format!("sweep_{tag}.csv")][..], &j].concat())?;
            run_cli(d, &[&["experiment", "--config", "h2.json", "--out", &format!("h2exp_{tag}.csv")][..], &j].concat())?;
            let h2 = run_cli(d, &[&["h2-exp", "--n", "14", "--m", "2", "--trials", "8", "--seed", "3"][..], &j].concat())?;
            std::fs::write(d.join(format!("h2cli_{tag}.csv")), h2).unwrap();
        }
        Ok(())
    })();
    if let Err(e) = result {
        return verdict(false, format!("CLI failed: {e}"));
    }
    for stem in ["h1_", "h2_", "chi_", "trace_", "bf_", "sweep_", "h2exp_", "h2cli_"] {
        let ext = if ["h1_", "h2_", "chi_", "bf_"].contains(&stem) { "txt" } else { "csv" };
        let files: Vec<Vec<u8>> = (0..3).map(|r| std::fs::read(d.join(format!("{stem}{r}.{ext}"))).unwrap()).collect();
        checks.push(stem);
        if files[0] != files[1] || files[0] != files[2] || files[0].is_empty() {
            mismatches.push(stem.trim_end_matches('_'));
        }
    }
    verdict(
        mismatches.is_empty(),
        if mismatches.is_empty() {
            format!("{} artifacts byte-identical over two --jobs 1 runs and one --jobs 8 run", checks.len())
        } else {
            format!("differ: {}", mismatches.join(", "))
        },
    )
}
