use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use disclab::discrepancy::{beck_fiala_color, brute_force_disc, disc_of};
use disclab::enumerate::DEFAULT_CAP;
use disclab::h2_moments::{h2_experiment, second_moment, H2Mode};
use disclab::harness::{emit_plot_data, rows_to_csv, run_with, ExperimentConfig, RunOptions};
use disclab::hypergraph::{self, generate_h1, generate_h2, generate_h2_even, Hypergraph};
use disclab::spectral::{default_max_iters, restricted_norm};
use disclab::two_stage::{color_two_stage, measure_c_norm, StageParams};
use disclab::{Coloring, Error, RandomSource, Result};

#[derive(Parser)]
#[command(name = "disclab", version, about = "Discrepancy experiments on random hypergraphs")]
struct Cli {
    /// Master seed for every randomized step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// t-regular hypergraph: every vertex joins t distinct random edges.
    GenerateH1 {
        #[arg(long)]
        n: usize,
        /// Edge count (default n).
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        t: usize,
    },
    /// Bernoulli hypergraph, or the even-row model with --even.
    GenerateH2 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        #[arg(long)]
        even: bool,
    },
    /// Discrepancy of a given coloring.
    Disc {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        coloring: PathBuf,
        /// Include every edge's |χ(e)|.
        #[arg(long)]
        per_edge: bool,
    },
    /// Exact discrepancy by enumeration (small n only).
    Brute {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Beck-Fiala iterative rounding.
    BeckFiala {
        #[arg(long)]
        input: PathBuf,
    },
    /// Two-stage partial-coloring pipeline.
    ColorTwoStage(TwoStageArgs),
    /// Restricted spectral norm of the incidence matrix.
    Norm {
        #[arg(long)]
        input: PathBuf,
        /// Regularity (default: max degree).
        #[arg(long)]
        t: Option<usize>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long)]
        max_iters: Option<usize>,
    },
    /// Exact first and second moments of the good-coloring count.
    Moments {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    /// Sample even-row instances and count good balanced colorings.
    H2Exp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value = "exact")]
        mode: H2Mode,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
    },
    /// Run a batch experiment from a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Also write plot data for this metric to stdout.
        #[arg(long)]
        plot: Option<String>,
    },
}

#[derive(Args)]
struct TwoStageArgs {
    #[arg(long)]
    input: PathBuf,
    /// Regularity (default: max degree).
    #[arg(long)]
    t: Option<usize>,
    /// Per-round trace CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Use the theoretical defaults instead of the practical preset.
    #[arg(long)]
    theory: bool,
}

struct Ctx {
    seed: u64,
    out: Option<PathBuf>,
    format: Option<Format>,
}

impl Ctx {
    fn rng(&self) -> RandomSource {
        RandomSource::new(self.seed)
    }

    fn emit(&self, body: &str) -> Result<()> {
        match &self.out {
            Some(p) => write_file(p, body),
            None => {
                let mut so = std::io::stdout().lock();
                so.write_all(body.as_bytes())
                    .and_then(|_| so.flush())
                    .map_err(|e| Error::Io { path: "<stdout>".into(), source: e })
            }
        }
    }

    fn emit_json<T: Serialize>(&self, v: &T) -> Result<()> {
        self.emit(&(serde_json::to_string_pretty(v).expect("serializable") + "\n"))
    }

    fn emit_hypergraph(&self, h: &Hypergraph) -> Result<()> {
        match self.format {
            Some(Format::Json) => self.emit(&(hypergraph::to_json(h) + "\n")),
            _ => self.emit(&hypergraph::to_text(h)),
        }
    }

    fn emit_coloring(&self, chi: &Coloring) -> Result<()> {
        self.emit(&format!("{chi}\n"))
    }
}

fn write_file(p: &Path, body: &str) -> Result<()> {
    fs::write(p, body).map_err(|e| Error::Io { path: p.to_path_buf(), source: e })
}

fn load_coloring(p: &Path) -> Result<Coloring> {
    let text = fs::read_to_string(p).map_err(|e| Error::Io { path: p.to_path_buf(), source: e })?;
    text.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        // only fails if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    let ctx = Ctx {
        seed: cli.seed.unwrap_or(0),
        out: cli.out.clone(),
        format: cli.format,
    };
    match &cli.cmd {
        Command::GenerateH1 { n, m, t } => {
            let h = generate_h1(*n, m.unwrap_or(*n), *t, &ctx.rng())?;
            ctx.emit_hypergraph(&h)
        }
        Command::GenerateH2 { n, m, p, even } => {
            let h = if *even {
                generate_h2_even(*n, *m, &ctx.rng())?
            } else {
                generate_h2(*n, *m, *p, &ctx.rng())?
            };
            ctx.emit_hypergraph(&h)
        }
        Command::Disc { input, coloring, per_edge } => {
            let h = hypergraph::load(input)?;
            let mut report = disc_of(&h, &load_coloring(coloring)?)?;
            if !per_edge {
                report.per_edge = None;
            }
            match ctx.format {
                Some(Format::Csv) => ctx.emit(&format!(
                    "disc,argmax_edge\n{},{}\n",
                    report.disc,
                    report.argmax_edge.map(|e| e.to_string()).unwrap_or_default()
                )),
                _ => ctx.emit_json(&report),
            }
        }
        Command::Brute { input, cap } => {
            let h = hypergraph::load(input)?;
            let (d, chi) = brute_force_disc(&h, *cap)?;
            eprintln!("disc {d}");
            ctx.emit_coloring(&chi)
        }
        Command::BeckFiala { input } => {
            let h = hypergraph::load(input)?;
            let chi = beck_fiala_color(&h);
            eprintln!("disc {}", disc_of(&h, &chi)?.disc);
            ctx.emit_coloring(&chi)
        }
        Command::ColorTwoStage(a) => color(&ctx, a),
        Command::Norm { input, t, tol, max_iters } => {
            let h = hypergraph::load(input)?;
            let iters = max_iters.unwrap_or_else(|| default_max_iters(h.n()));
            let est = restricted_norm(&h, *t, *tol, iters, &ctx.rng())?;
            ctx.emit_json(&est)
        }
        Command::Moments { n, m } => {
            let r = second_moment(*n, *m)?;
            match ctx.format {
                Some(Format::Csv) => ctx.emit(&format!(
                    "n,m,e_x,e_x2,ratio,ratio_f64\n{},{},{},{},{},{}\n",
                    r.n, r.m, r.e_x, r.e_x2, r.ratio, r.ratio_f64
                )),
                _ => ctx.emit_json(&r),
            }
        }
        Command::H2Exp { n, m, trials, mode, cap } => {
            let exp = h2_experiment(*n, *m, *trials, *mode, *cap, &ctx.rng())?;
            match ctx.format {
                Some(Format::Json) => ctx.emit_json(&exp),
                _ => {
                    let mut body = String::from("seed,X,disc_check\n");
                    for r in &exp.records {
                        body.push_str(&format!("{},{},{}\n", r.seed, r.x, r.disc_check));
                    }
                    ctx.emit(&body)
                }
            }
        }
        Command::Experiment { config, plot } => {
            let mut cfg = ExperimentConfig::load(config)?;
            if let Some(s) = cli.seed {
                cfg.master_seed = s;
            }
            if let Some(o) = &cli.out {
                cfg.output = Some(o.clone());
            }
            let res = run_with(&cfg, &RunOptions { jobs: cli.jobs })?;
            if let Some(metric) = plot {
                print!("{}", emit_plot_data(&res, metric)?);
            } else if cfg.output.is_none() {
                match ctx.format {
                    Some(Format::Json) => ctx.emit_json(&res)?,
                    _ => ctx.emit(&rows_to_csv(&res.rows))?,
                }
            }
            let errors: usize = res.cells.iter().map(|c| c.errors).sum();
            if errors > 0 {
                eprintln!("{errors} trials recorded errors");
            }
            Ok(())
        }
    }
}

fn color(ctx: &Ctx, a: &TwoStageArgs) -> Result<()> {
    let h = hypergraph::load(&a.input)?;
    let t = a.t.unwrap_or_else(|| h.max_degree()).max(1);
    let rng = ctx.rng();
    let c_norm = measure_c_norm(&h, t, &rng)?;
    let params = if a.theory {
        StageParams::new(h.n(), t, c_norm)?
    } else {
        StageParams::practical(h.n(), t, c_norm)?
    };
    let (chi, trace) = color_two_stage(&h, &params, &rng)?;
    if let Some(p) = &a.trace {
        write_file(p, &trace.to_csv())?;
    }
    for w in &trace.warnings {
        eprintln!("warning: {w}");
    }
    eprintln!(
        "disc {} after {} rounds (C = {:.3})",
        disc_of(&h, &chi)?.disc,
        trace.rounds.len(),
        c_norm
    );
    ctx.emit_coloring(&chi)
}
