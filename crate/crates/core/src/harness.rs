//! Seeded batch experiments.
//!
//! A config names an experiment kind and a parameter grid.  Every grid cell
//! runs `trials` independent trials; trial `j` of a cell draws everything
//! from `mix(master_seed, cell_key, j)`, where `cell_key` is a hash of the
//! cell's parameters (not its position), so reordering or extending the grid
//! leaves existing cells' trials unchanged.
//!
//! Rows go to a CSV file, one cell at a time, in (cell, trial) order.  A JSON
//! sidecar next to it echoes the config and, once the run completes, the
//! per-cell summaries.  Rerunning a config against its own partial output
//! keeps the completed cells and computes only the rest.

use std::fs::{self, File, OpenOptions};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::discrepancy::{beck_fiala_color, disc_of, random_coloring_baseline};
use crate::enumerate::DEFAULT_CAP;
use crate::h2_moments::{h2_trial, m_default, second_moment, H2Mode};
use crate::hypergraph::{generate_h1, generate_h2, Hypergraph};
use crate::rng::{mix, RandomSource};
use crate::spectral::restricted_norm;
use crate::two_stage::{color_two_stage, measure_c_norm, StageParams};
use crate::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Random colorings per instance for the baseline median.
pub const DEFAULT_BASELINE_COLORINGS: usize = 25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Two-stage coloring of t-regular instances over n × t.
    TwoStageSweep,
    /// Restricted norm σ of t-regular instances over n × t.
    NormSweep,
    /// Good balanced colorings of even-row Bernoulli instances over n × m.
    H2Sweep,
    /// Two-stage vs Beck-Fiala vs random colorings, on t-regular instances
    /// (n × t) or, when `p` is given, Bernoulli instances (n × m × p).
    BaselineCompare,
}

impl ExperimentKind {
    fn tag(self) -> u64 {
        match self {
            ExperimentKind::TwoStageSweep => 1,
            ExperimentKind::NormSweep => 2,
            ExperimentKind::H2Sweep => 3,
            ExperimentKind::BaselineCompare => 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Grid {
    pub n: Vec<usize>,
    #[serde(default)]
    pub t: Vec<usize>,
    /// Edge counts.  Empty means m = n for t-regular kinds and the default
    /// sparse m for the h2 sweep.
    #[serde(default)]
    pub m: Vec<usize>,
    #[serde(default)]
    pub p: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// `StageParams::practical`.
    #[default]
    Practical,
    /// `StageParams::new`.
    Default,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub grid: Grid,
    pub trials: usize,
    pub master_seed: u64,
    /// CSV destination; the sidecar goes next to it with a `.json`
    /// extension.
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub preset: Preset,
    #[serde(default = "default_h2_mode")]
    pub h2_mode: H2Mode,
    #[serde(default = "default_baseline_colorings")]
    pub baseline_colorings: usize,
}

fn default_h2_mode() -> H2Mode {
    H2Mode::Exact
}

fn default_baseline_colorings() -> usize {
    DEFAULT_BASELINE_COLORINGS
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, grid: Grid, trials: usize, master_seed: u64) -> Self {
        ExperimentConfig {
            kind,
            grid,
            trials,
            master_seed,
            output: None,
            preset: Preset::default(),
            h2_mode: default_h2_mode(),
            baseline_colorings: DEFAULT_BASELINE_COLORINGS,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::param("trials must be at least 1"));
        }
        if self.baseline_colorings == 0 {
            return Err(Error::param("baseline_colorings must be at least 1"));
        }
        let g = &self.grid;
        if g.n.is_empty() {
            return Err(Error::param("grid.n is empty"));
        }
        if g.n.contains(&0) || g.m.contains(&0) || g.t.contains(&0) {
            return Err(Error::param("grid values must be positive"));
        }
        if let Some(p) = g.p.iter().find(|p| !(**p > 0.0 && **p <= 1.0)) {
            return Err(Error::param(format!("p = {p} outside (0, 1]")));
        }
        let bernoulli = self.kind == ExperimentKind::BaselineCompare && !g.p.is_empty();
        match self.kind {
            ExperimentKind::H2Sweep => {
                if let Some(n) = g.n.iter().find(|&&n| n % 2 == 1 || n > DEFAULT_CAP) {
                    return Err(Error::param(format!(
                        "h2 sweep needs even n ≤ {DEFAULT_CAP}, got {n}"
                    )));
                }
            }
            _ if bernoulli => {
                if g.m.is_empty() {
                    return Err(Error::param("Bernoulli baseline needs grid.m"));
                }
            }
            _ => {
                if g.t.is_empty() {
                    return Err(Error::param("grid.t is empty"));
                }
            }
        }
        if self.cells().is_empty() {
            return Err(Error::param("grid has no cells"));
        }
        Ok(())
    }

    /// Grid cells in canonical order: n outermost, then t or m, then p.
    pub fn cells(&self) -> Vec<Cell> {
        let g = &self.grid;
        let mut out = Vec::new();
        for &n in &g.n {
            match self.kind {
                ExperimentKind::H2Sweep => {
                    let ms = if g.m.is_empty() { vec![m_default(n)] } else { g.m.clone() };
                    for m in ms {
                        out.push(Cell { n, m, t: None, p: None });
                    }
                }
                ExperimentKind::BaselineCompare if !g.p.is_empty() => {
                    for &m in &g.m {
                        for &p in &g.p {
                            out.push(Cell { n, m, t: None, p: Some(p) });
                        }
                    }
                }
                _ => {
                    for &t in &g.t {
                        let ms = if g.m.is_empty() { vec![n] } else { g.m.clone() };
                        for m in ms {
                            out.push(Cell { n, m, t: Some(t), p: None });
                        }
                    }
                }
            }
        }
        out
    }

    fn cell_key(&self, c: &Cell) -> u64 {
        let k = mix(self.kind.tag(), c.n as u64, c.m as u64);
        mix(k, c.t.map_or(0, |t| t as u64 + 1), c.p.map_or(0, f64::to_bits))
    }

    /// Seed of trial `j` in cell `c`.
    pub fn trial_seed(&self, c: &Cell, j: usize) -> u64 {
        mix(self.master_seed, self.cell_key(c), j as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub n: usize,
    pub m: usize,
    pub t: Option<usize>,
    pub p: Option<f64>,
}

/// One trial.  Columns that do not apply to the experiment kind are empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub cell: usize,
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub t: Option<usize>,
    pub p: Option<f64>,
    pub disc: Option<u64>,
    pub disc_beck_fiala: Option<u64>,
    pub disc_random_median: Option<u64>,
    pub sigma: Option<f64>,
    #[serde(rename = "X")]
    pub x: Option<u64>,
    pub disc_check: Option<bool>,
    pub error: Option<String>,
}

pub const CSV_COLUMNS: [&str; 14] = [
    "cell",
    "trial",
    "seed",
    "n",
    "m",
    "t",
    "p",
    "disc",
    "disc_beck_fiala",
    "disc_random_median",
    "sigma",
    "X",
    "disc_check",
    "error",
];

impl ExperimentRow {
    fn blank(cell_idx: usize, cell: &Cell, trial: usize, seed: u64) -> Self {
        ExperimentRow {
            cell: cell_idx,
            trial,
            seed,
            n: cell.n,
            m: cell.m,
            t: cell.t,
            p: cell.p,
            disc: None,
            disc_beck_fiala: None,
            disc_random_median: None,
            sigma: None,
            x: None,
            disc_check: None,
            error: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub mean: f64,
}

impl Stats {
    pub fn of(values: &[f64]) -> Option<Stats> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let k = v.len();
        let median = if k % 2 == 1 { v[k / 2] } else { 0.5 * (v[k / 2 - 1] + v[k / 2]) };
        Some(Stats {
            min: v[0],
            median,
            max: v[k - 1],
            mean: v.iter().sum::<f64>() / k as f64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub cell: usize,
    #[serde(flatten)]
    pub params: Cell,
    pub trials: usize,
    pub errors: usize,
    pub disc: Option<Stats>,
    pub sigma: Option<Stats>,
    pub fraction_x_positive: Option<f64>,
    pub fraction_disc_check: Option<f64>,
    /// None for cells restored from an earlier partial run.
    pub wall_seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub version: String,
    pub config: ExperimentConfig,
    pub cells: Vec<CellSummary>,
    pub rows: Vec<ExperimentRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct Sidecar {
    version: String,
    config: ExperimentConfig,
    complete: bool,
    cells: Vec<CellSummary>,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads; None uses every core.
    pub jobs: Option<usize>,
}

/// Runs every cell of `config` with default options.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentResult> {
    run_with(config, &RunOptions::default())
}

pub fn run_with(config: &ExperimentConfig, opts: &RunOptions) -> Result<ExperimentResult> {
    config.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = opts.jobs {
        if j == 0 {
            return Err(Error::param("jobs must be at least 1"));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::param(format!("thread pool: {e}")))?;
    pool.install(|| run_in_pool(config))
}

fn run_in_pool(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let cells = config.cells();
    let mut rows = match &config.output {
        Some(path) => resume(config, path, &cells)?,
        None => Vec::new(),
    };
    let done = rows.len() / config.trials;
    let mut wall = vec![None; cells.len()];

    let mut writer = match &config.output {
        Some(path) => Some(CsvSink::open(path, &rows)?),
        None => None,
    };
    for (ci, cell) in cells.iter().enumerate().skip(done) {
        let started = Instant::now();
        let cell_rows = (0..config.trials)
            .into_par_iter()
            .map(|j| run_trial(config, ci, cell, j))
            .collect::<Result<Vec<_>>>()?;
        wall[ci] = Some(started.elapsed().as_secs_f64());
        if let Some(w) = writer.as_mut() {
            w.append(&cell_rows)?;
        }
        rows.extend(cell_rows);
    }

    let summaries = summarize(&cells, &rows, config.trials, &wall);
    let result = ExperimentResult {
        version: VERSION.to_string(),
        config: config.clone(),
        cells: summaries,
        rows,
    };
    if let Some(path) = &config.output {
        write_sidecar(path, config, true, result.cells.clone())?;
    }
    Ok(result)
}

fn recoverable(e: &Error) -> bool {
    matches!(e, Error::Convergence(_) | Error::WalkExhausted { .. })
}

fn run_trial(config: &ExperimentConfig, ci: usize, cell: &Cell, j: usize) -> Result<ExperimentRow> {
    let seed = config.trial_seed(cell, j);
    let mut row = ExperimentRow::blank(ci, cell, j, seed);
    match fill_trial(config, cell, j, seed, &mut row) {
        Ok(()) => Ok(row),
        Err(e) if recoverable(&e) => {
            row.error = Some(e.to_string());
            Ok(row)
        }
        Err(e) => Err(e),
    }
}

fn stage_params(config: &ExperimentConfig, h: &Hypergraph, t: usize, c_norm: f64) -> Result<StageParams> {
    match config.preset {
        Preset::Practical => StageParams::practical(h.n(), t, c_norm),
        Preset::Default => StageParams::new(h.n(), t, c_norm),
    }
}

fn fill_trial(
    config: &ExperimentConfig,
    cell: &Cell,
    j: usize,
    seed: u64,
    row: &mut ExperimentRow,
) -> Result<()> {
    let src = RandomSource::new(seed);
    match config.kind {
        ExperimentKind::H2Sweep => {
            let r = h2_trial(cell.n, cell.m, config.h2_mode, DEFAULT_CAP, j, seed)?;
            row.x = Some(r.x);
            row.disc_check = Some(r.disc_check);
            row.disc = r.disc;
        }
        ExperimentKind::NormSweep => {
            let t = cell.t.unwrap_or(1);
            let h = generate_h1(cell.n, cell.m, t, &src)?;
            let est = restricted_norm(&h, Some(t), 1e-6, 50 * cell.n.max(20), &src)?;
            row.sigma = Some(est.sigma);
            if !est.converged {
                row.error = Some(format!(
                    "power iteration stopped after {} iterations, residual {:.3e}",
                    est.iterations, est.residual
                ));
            }
        }
        ExperimentKind::TwoStageSweep | ExperimentKind::BaselineCompare => {
            let (h, t) = match (cell.t, cell.p) {
                (Some(t), _) => (generate_h1(cell.n, cell.m, t, &src)?, t),
                (None, Some(p)) => {
                    let h = generate_h2(cell.n, cell.m, p, &src)?;
                    let t = h.max_degree().max(1);
                    (h, t)
                }
                (None, None) => return Err(Error::param("cell without t or p")),
            };
            row.disc_random_median =
                Some(random_coloring_baseline(&h, config.baseline_colorings, &src)?.median);
            if config.kind == ExperimentKind::BaselineCompare {
                row.disc_beck_fiala = Some(disc_of(&h, &beck_fiala_color(&h))?.disc);
            }
            if h.n() >= 2 {
                let c_norm = measure_c_norm(&h, t, &src)?;
                row.sigma = Some(c_norm * (t as f64).sqrt());
                let params = stage_params(config, &h, t, c_norm)?;
                let (chi, _) = color_two_stage(&h, &params, &src)?;
                row.disc = Some(disc_of(&h, &chi)?.disc);
            }
        }
    }
    Ok(())
}

fn summarize(cells: &[Cell], rows: &[ExperimentRow], trials: usize, wall: &[Option<f64>]) -> Vec<CellSummary> {
    cells
        .iter()
        .enumerate()
        .map(|(ci, cell)| {
            let rs = &rows[ci * trials..(ci + 1) * trials];
            let disc: Vec<f64> = rs.iter().filter_map(|r| r.disc).map(|d| d as f64).collect();
            let sigma: Vec<f64> = rs.iter().filter_map(|r| r.sigma).collect();
            let frac = |f: &dyn Fn(&ExperimentRow) -> Option<bool>| {
                let v: Vec<bool> = rs.iter().filter_map(f).collect();
                (!v.is_empty()).then(|| v.iter().filter(|&&b| b).count() as f64 / v.len() as f64)
            };
            CellSummary {
                cell: ci,
                params: *cell,
                trials,
                errors: rs.iter().filter(|r| r.error.is_some()).count(),
                disc: Stats::of(&disc),
                sigma: Stats::of(&sigma),
                fraction_x_positive: frac(&|r| r.x.map(|x| x > 0)),
                fraction_disc_check: frac(&|r| r.disc_check),
                wall_seconds: wall[ci],
            }
        })
        .collect()
}

pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

fn write_sidecar(csv: &Path, config: &ExperimentConfig, complete: bool, cells: Vec<CellSummary>) -> Result<()> {
    let side = Sidecar {
        version: VERSION.to_string(),
        config: config.clone(),
        complete,
        cells,
    };
    let path = sidecar_path(csv);
    let text = serde_json::to_string_pretty(&side).expect("sidecar serializes");
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))
}

/// Reads the rows of completed cells from an earlier run of the same config.
/// A fresh start writes a sidecar marked incomplete.
fn resume(config: &ExperimentConfig, csv: &Path, cells: &[Cell]) -> Result<Vec<ExperimentRow>> {
    let side_path = sidecar_path(csv);
    if !side_path.exists() || !csv.exists() {
        write_sidecar(csv, config, false, Vec::new())?;
        return Ok(Vec::new());
    }
    let text = fs::read_to_string(&side_path).map_err(|e| Error::io(&side_path, e))?;
    let side: Sidecar = serde_json::from_str(&text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    if side.config != *config {
        return Err(Error::Refused(format!(
            "{} belongs to a different experiment config",
            side_path.display()
        )));
    }
    let mut rows = Vec::new();
    let mut reader = csv::Reader::from_path(csv).map_err(|e| csv_io(csv, e))?;
    // A row cut short by an interrupted write fails to parse; stop there.
    for rec in reader.deserialize::<ExperimentRow>() {
        match rec {
            Ok(r) => rows.push(r),
            Err(_) => break,
        }
    }
    let mut keep = 0;
    'cells: for (ci, cell) in cells.iter().enumerate() {
        let chunk = match rows.get(ci * config.trials..(ci + 1) * config.trials) {
            Some(c) => c,
            None => break,
        };
        for (j, r) in chunk.iter().enumerate() {
            if r.cell != ci || r.trial != j || r.seed != config.trial_seed(cell, j) {
                break 'cells;
            }
        }
        keep = ci + 1;
    }
    rows.truncate(keep * config.trials);
    Ok(rows)
}

fn csv_io(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            line: 0,
            message: format!("{other:?}"),
        },
    }
}

/// Appends rows cell by cell, flushing after each.
struct CsvSink {
    path: PathBuf,
    out: csv::Writer<BufWriter<File>>,
}

impl CsvSink {
    /// Rewrites `path` with the header and `kept` rows.
    fn open(path: &Path, kept: &[ExperimentRow]) -> Result<Self> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let file = OpenOptions::new()
            .create(true)
            .write(true)
            .truncate(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        let mut sink = CsvSink {
            path: path.to_path_buf(),
            out: csv::WriterBuilder::new()
                .has_headers(false)
                .from_writer(BufWriter::new(file)),
        };
        sink.out
            .write_record(CSV_COLUMNS)
            .map_err(|e| csv_io(path, e))?;
        sink.append(kept)?;
        Ok(sink)
    }

    fn append(&mut self, rows: &[ExperimentRow]) -> Result<()> {
        for r in rows {
            self.out.serialize(r).map_err(|e| csv_io(&self.path, e))?;
        }
        // flushes the BufWriter too
        self.out.flush().map_err(|e| Error::io(&self.path, e))
    }
}

/// Rows as CSV text with the standard header.
pub fn rows_to_csv(rows: &[ExperimentRow]) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(CSV_COLUMNS).expect("in-memory write");
    for r in rows {
        w.serialize(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotMetric {
    /// x = √t, y = median disc, error bars min/max.
    DiscVsSqrtT,
    /// x = √t, y = median σ, error bars min/max.
    SigmaVsSqrtT,
    /// x = n.  For h2 cells y = E[X²]/E[X]² of the cell's (n, m); otherwise
    /// y = median disc / random-coloring median.  Error bars min/max.
    RatioVsN,
    /// x = n, y = fraction of trials with disc ≤ 1, error bars ± one
    /// binomial standard error.
    FracDiscLe1,
}

impl std::str::FromStr for PlotMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disc_vs_sqrt_t" => Ok(PlotMetric::DiscVsSqrtT),
            "sigma_vs_sqrt_t" => Ok(PlotMetric::SigmaVsSqrtT),
            "ratio_vs_n" => Ok(PlotMetric::RatioVsN),
            "frac_disc_le_1" => Ok(PlotMetric::FracDiscLe1),
            _ => Err(Error::param(format!("unknown metric {s:?}"))),
        }
    }
}

pub const PLOT_COLUMNS: [&str; 4] = ["x", "y", "y_low", "y_high"];

fn group_rows(rows: &[ExperimentRow]) -> Vec<&[ExperimentRow]> {
    rows.chunk_by(|a, b| a.cell == b.cell).collect()
}

/// One (x, y, y_low, y_high) line per cell that carries the metric.
pub fn emit_plot_data(result: &ExperimentResult, metric: &str) -> Result<String> {
    let metric: PlotMetric = metric.parse()?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(PLOT_COLUMNS).expect("in-memory write");
    for rs in group_rows(&result.rows) {
        let first = &rs[0];
        let point = match metric {
            PlotMetric::DiscVsSqrtT | PlotMetric::SigmaVsSqrtT => {
                let Some(t) = first.t else { continue };
                let vals: Vec<f64> = if metric == PlotMetric::DiscVsSqrtT {
                    rs.iter().filter_map(|r| r.disc).map(|d| d as f64).collect()
                } else {
                    rs.iter().filter_map(|r| r.sigma).collect()
                };
                Stats::of(&vals).map(|s| ((t as f64).sqrt(), s.median, s.min, s.max))
            }
            PlotMetric::RatioVsN => {
                if result.config.kind == ExperimentKind::H2Sweep {
                    let r = second_moment(first.n, first.m)?.ratio_f64;
                    Some((first.n as f64, r, r, r))
                } else {
                    let vals: Vec<f64> = rs
                        .iter()
                        .filter_map(|r| match (r.disc, r.disc_random_median) {
                            (Some(d), Some(b)) if b > 0 => Some(d as f64 / b as f64),
                            _ => None,
                        })
                        .collect();
                    Stats::of(&vals).map(|s| (first.n as f64, s.median, s.min, s.max))
                }
            }
            PlotMetric::FracDiscLe1 => {
                let flags: Vec<bool> = rs
                    .iter()
                    .filter_map(|r| r.disc_check.or(r.disc.map(|d| d <= 1)))
                    .collect();
                if flags.is_empty() {
                    None
                } else {
                    let k = flags.len() as f64;
                    let f = flags.iter().filter(|&&b| b).count() as f64 / k;
                    let se = (f * (1.0 - f) / k).sqrt();
                    Some((first.n as f64, f, f - se, f + se))
                }
            }
        };
        if let Some((x, y, lo, hi)) = point {
            w.serialize((x, y, lo, hi)).expect("in-memory write");
        }
    }
    Ok(String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8"))
}
