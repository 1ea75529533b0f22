//! Command-line orchestration: configs, subcommands, artifacts and the cache.

pub mod artifacts;
pub mod cache;
pub mod commands;
pub mod config;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use sha2::{Digest, Sha256};

pub use artifacts::{Artifacts, Csv, SchemaCsv};
pub use cache::ResultCache;
pub use config::{Emit, EstimateChoice, ExperimentConfig, ExperimentKind, Inputs, KronMethod};

use crate::error::{Error, Result};
use crate::evolution::{ForcingSpec, ProblemFile};

#[derive(Debug, Parser)]
#[command(name = "apdim", version, about = "Recurrence complexity of almost periodic functions")]
pub struct Cli {
    /// Experiment config (TOML); flags given on the command line override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Certified digits kept from decimal literals.
    #[arg(long, global = true)]
    pub precision_digits: Option<u32>,
    /// Largest number of candidate evaluations per scan.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Skip the result cache.
    #[arg(long, global = true)]
    pub no_cache: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Continued fraction, convergents and Diophantine profile of a number.
    Cf {
        #[arg(long)]
        number: Option<String>,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        csv: bool,
    },
    /// Point evaluation of a polynomial.
    Eval {
        #[arg(long)]
        poly: Option<PathBuf>,
        #[arg(long = "t", value_delimiter = ',', allow_negative_numbers = true)]
        times: Vec<f64>,
    },
    /// Certified shift distances `sup_t |P(t+τ) - P(t)|`.
    Shiftdist {
        #[arg(long)]
        poly: Option<PathBuf>,
        #[arg(long = "tau", value_delimiter = ',', allow_negative_numbers = true)]
        taus: Vec<f64>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Solutions of `‖ωτ‖ < δ`.
    Kron {
        #[arg(long)]
        omega: Option<String>,
        #[arg(long, value_delimiter = ',')]
        delta: Vec<f64>,
        #[arg(long)]
        window: Option<f64>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
    },
    /// Almost-period scans and inclusion lengths.
    Periods {
        #[arg(long)]
        poly: Option<PathBuf>,
        #[arg(long)]
        epsilon: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        epsilon_ladder: Vec<f64>,
        #[arg(long)]
        window: Option<f64>,
    },
    /// Dimension estimate from a periods summary or ladder CSV.
    Dim {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        estimate: Option<EstimateArg>,
        #[arg(long)]
        d: Option<f64>,
        #[arg(long)]
        tail_start: Option<usize>,
    },
    /// Monotone ODE driven by a polynomial forcing.
    Evolve {
        #[arg(long)]
        problem: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        epsilon_ladder: Vec<f64>,
    },
    /// Birkhoff averages and closeness to a rational neighbour.
    Liouville {
        #[arg(long)]
        omega: Option<String>,
        #[arg(long)]
        region: Option<String>,
        #[arg(long, value_delimiter = ',')]
        horizons: Vec<f64>,
        #[arg(long)]
        convergent_index: Option<usize>,
        #[arg(long)]
        quadrature_step: Option<f64>,
    },
    /// Continued fractions, periods ladder and dimension report in one run.
    Pipeline {
        #[arg(long)]
        poly: Option<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        epsilon_ladder: Vec<f64>,
        #[arg(long)]
        window: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum MethodArg {
    Convergent,
    Grid,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum EstimateArg {
    Diophantine,
    Generalized,
}

fn set<T>(slot: &mut Option<T>, v: Option<T>) {
    if v.is_some() {
        *slot = v;
    }
}

fn set_vec(slot: &mut Vec<f64>, v: Vec<f64>) {
    if !v.is_empty() {
        *slot = v;
    }
}

impl Cli {
    /// Config file (if any) overlaid with command-line flags.
    pub fn to_config(&self) -> Result<ExperimentConfig> {
        let base = match &self.config {
            Some(p) => Some(ExperimentConfig::load(p)?),
            None => None,
        };
        let kind = match &self.command {
            None => base.as_ref().map(|c| c.kind).ok_or_else(|| Error::Validation("no subcommand and no --config".into()))?,
            Some(c) => match c {
                Command::Cf { .. } => ExperimentKind::Cf,
                Command::Eval { .. } => ExperimentKind::Eval,
                Command::Shiftdist { .. } => ExperimentKind::Shiftdist,
                Command::Kron { .. } => ExperimentKind::Kron,
                Command::Periods { .. } => ExperimentKind::Periods,
                Command::Dim { .. } => ExperimentKind::Dim,
                Command::Evolve { .. } => ExperimentKind::Evolve,
                Command::Liouville { .. } => ExperimentKind::Liouville,
                Command::Pipeline { .. } => ExperimentKind::FullPipeline,
            },
        };
        let mut cfg = base.unwrap_or_else(|| ExperimentConfig::new(kind));
        cfg.kind = kind;
        if let Some(o) = &self.out {
            cfg.out = o.clone();
        }
        if let Some(d) = self.precision_digits {
            cfg.precision_digits = d;
        }
        if let Some(b) = self.budget {
            cfg.budget = b;
        }
        set(&mut cfg.threads, self.threads);
        match self.command.as_ref() {
            None => {}
            Some(Command::Cf { number, depth, json, csv }) => {
                set(&mut cfg.number, number.clone());
                set(&mut cfg.depth, *depth);
                match (json, csv) {
                    (true, false) => cfg.emit = Some(Emit::Json),
                    (false, true) => cfg.emit = Some(Emit::Csv),
                    (true, true) => cfg.emit = Some(Emit::Both),
                    _ => {}
                }
            }
            Some(Command::Eval { poly, times }) => {
                set(&mut cfg.inputs.poly, poly.clone());
                set_vec(&mut cfg.times, times.clone());
            }
            Some(Command::Shiftdist { poly, taus, epsilon }) => {
                set(&mut cfg.inputs.poly, poly.clone());
                set_vec(&mut cfg.times, taus.clone());
                set(&mut cfg.epsilon, *epsilon);
            }
            Some(Command::Kron { omega, delta, window, method }) => {
                set(&mut cfg.number, omega.clone());
                match delta.len() {
                    0 => {}
                    1 => {
                        cfg.delta = Some(delta[0]);
                        cfg.delta_ladder.clear();
                    }
                    _ => cfg.delta_ladder = delta.clone(),
                }
                set(&mut cfg.window, *window);
                set(
                    &mut cfg.method,
                    method.map(|m| match m {
                        MethodArg::Convergent => KronMethod::Convergent,
                        MethodArg::Grid => KronMethod::Grid,
                    }),
                );
            }
            Some(Command::Periods { poly, epsilon, epsilon_ladder, window }) => {
                set(&mut cfg.inputs.poly, poly.clone());
                set(&mut cfg.epsilon, *epsilon);
                set_vec(&mut cfg.epsilon_ladder, epsilon_ladder.clone());
                set(&mut cfg.window, *window);
            }
            Some(Command::Dim { input, estimate, d, tail_start }) => {
                set(&mut cfg.inputs.periods, input.clone());
                set(
                    &mut cfg.estimate,
                    estimate.map(|e| match e {
                        EstimateArg::Diophantine => EstimateChoice::Diophantine,
                        EstimateArg::Generalized => EstimateChoice::Generalized,
                    }),
                );
                set(&mut cfg.generalized_d, *d);
                set(&mut cfg.tail_start, *tail_start);
            }
            Some(Command::Evolve { problem, epsilon_ladder }) => {
                set(&mut cfg.inputs.problem, problem.clone());
                set_vec(&mut cfg.epsilon_ladder, epsilon_ladder.clone());
            }
            Some(Command::Liouville { omega, region, horizons, convergent_index, quadrature_step }) => {
                set(&mut cfg.number, omega.clone());
                set(&mut cfg.region, region.clone());
                set_vec(&mut cfg.horizons, horizons.clone());
                set(&mut cfg.convergent_index, *convergent_index);
                set(&mut cfg.quadrature_step, *quadrature_step);
            }
            Some(Command::Pipeline { poly, epsilon_ladder, window }) => {
                set(&mut cfg.inputs.poly, poly.clone());
                set_vec(&mut cfg.epsilon_ladder, epsilon_ladder.clone());
                set(&mut cfg.window, *window);
            }
        }
        Ok(cfg)
    }
}

/// Digest of an input file; problem files include their forcing file.
fn input_digest(kind: &str, path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
    let mut h = Sha256::new();
    h.update(&bytes);
    if kind == "problem" {
        let pf = ProblemFile::parse(&String::from_utf8_lossy(&bytes))?;
        if let ForcingSpec::Path(p) = pf.forcing {
            let full = path.parent().unwrap_or(Path::new("")).join(p);
            h.update(std::fs::read(&full).map_err(|e| Error::Validation(format!("cannot read {}: {e}", full.display())))?);
        }
    }
    Ok(hex::encode(h.finalize()))
}

/// The config with output-only fields dropped and inputs replaced by content digests.
pub fn canonical_config(cfg: &ExperimentConfig) -> Result<String> {
    let mut c = cfg.clone();
    c.out = PathBuf::new();
    c.threads = None;
    let mut inputs = Inputs::default();
    for (kind, p) in cfg.inputs.paths() {
        let d = PathBuf::from(format!("sha256:{}", input_digest(kind, p)?));
        match kind {
            "poly" => inputs.poly = Some(d),
            "problem" => inputs.problem = Some(d),
            _ => inputs.periods = Some(d),
        }
    }
    c.inputs = inputs;
    Ok(c.to_toml())
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub paths: Vec<PathBuf>,
    pub summary: String,
    pub cache_hit: bool,
}

fn write_out(dir: &Path, a: &Artifacts) -> Result<Vec<PathBuf>> {
    a.files()
        .iter()
        .map(|(name, bytes)| {
            let p = dir.join(name);
            cache::write_atomic(&p, bytes)?;
            Ok(p)
        })
        .collect()
}

/// Validates, consults the cache, executes and writes artifacts to `cfg.out`.
pub fn run(cfg: &ExperimentConfig, use_cache: bool) -> Result<RunOutcome> {
    cfg.validate()?;
    let cache = ResultCache::new(cfg.out.join(".cache"));
    let key = cache.key(&canonical_config(cfg)?);
    if use_cache {
        if let Some(a) = cache.get(&key)? {
            return Ok(RunOutcome { paths: write_out(&cfg.out, &a)?, summary: a.summary, cache_hit: true });
        }
    }
    let mut a = Artifacts::default();
    a.line("experiment", cfg.kind.name());
    if let Err(e) = commands::execute(cfg, &mut a) {
        if !a.is_empty() {
            a.add_json("partial.json", &serde_json::json!({ "schema": "apdim.partial.v1", "partial": true, "reason": e.to_string() }));
            write_out(&cfg.out, &a)?;
        }
        return Err(e);
    }
    if use_cache {
        cache.put(&key, &a)?;
    }
    Ok(RunOutcome { paths: write_out(&cfg.out, &a)?, summary: a.summary, cache_hit: false })
}

/// Entry point of the `apdim` binary; returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = cli.to_config().and_then(|cfg| {
        if let Some(n) = cfg.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
        }
        run(&cfg, !cli.no_cache)
    });
    match result {
        Ok(o) => {
            print!("{}", o.summary);
            for p in &o.paths {
                println!("wrote {}", p.display());
            }
            if o.cache_hit {
                eprintln!("cache hit");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
