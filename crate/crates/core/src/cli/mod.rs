//! Command-line front end: argument parsing, dispatch, reports and exit codes.
//!
//! Exit codes: 0 success or proven, 2 input error, 3 non-convergence,
//! 4 refuted, 5 unknown.

mod commands;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::error::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;
pub const EXIT_REFUTED: i32 = 4;
pub const EXIT_UNKNOWN: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "thickgap", version, about = "Thickness, gap-lemma witnesses and potential games for systems of balls")]
pub struct Cli {
    #[command(subcommand)]
    pub command: RunConfig,
}

/// Resolved invocation; embedded verbatim in every JSON report.
#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum RunConfig {
    /// Certified thickness enclosure of a set-spec.
    Thickness(ThicknessArgs),
    /// Check the gap-lemma hypotheses for two sets, optionally building a witness.
    Gapcheck(GapcheckArgs),
    /// Directional distance certificates over a direction sample and a t grid.
    Distances(DistancesArgs),
    /// Batch of seeded matches of the potential game.
    Game(GameArgs),
    /// Closed-form dimension, winning-set and pattern-capacity bounds.
    Dims(DimsArgs),
    /// Grid search for homothetic copies of a finite pattern.
    Pattern(PatternArgs),
    /// CSV dump of every ball down to a depth.
    Render(RenderArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Common {
    /// Seed for every random choice.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; 1 forces the sequential path.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Report path (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ThicknessArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub depth: usize,
    #[arg(long, default_value_t = 0.1)]
    pub tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GapcheckArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub spec2: PathBuf,
    #[arg(long)]
    pub r: f64,
    /// Residual tolerance of the witness.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Build the intersection certificate when every hypothesis is proven.
    #[arg(long)]
    pub intersect: bool,
    /// Depth of the thickness and denseness checks.
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    #[arg(long, default_value_t = 200)]
    pub max_steps: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DistancesArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub r: f64,
    /// Number of directions (d = 1 always uses ±1).
    #[arg(long, default_value_t = 16)]
    pub directions: usize,
    /// Number of t values, `t_j = t_max · j / (steps - 1)`.
    #[arg(long, default_value_t = 8)]
    pub steps: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Upper end of the t grid; defaults to the certified endpoint.
    #[arg(long)]
    pub t_max: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GameArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Thickness used by Alice; defaults to the certified lower end.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Defaults to 1/tau.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Defaults to the contraction ratio of the system.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub c: f64,
    /// Defaults to beta times the root radius.
    #[arg(long)]
    pub rho: Option<f64>,
    /// Number of matches, seeded `seed, seed + 1, …`.
    #[arg(long, default_value_t = 100)]
    pub transcripts: usize,
    #[arg(long, default_value_t = 200)]
    pub max_turns: usize,
    /// Directory receiving one JSONL transcript per match.
    #[arg(long)]
    pub jsonl_dir: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct DimsArgs {
    /// Ambient dimension for the thickness bound.
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// Minimum number of children per ball.
    #[arg(long)]
    pub m0: Option<u64>,
    /// Set-spec whose child ratios feed a Moran solve.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub c: Option<f64>,
    /// Thickness values of the sets to intersect, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub taus: Option<Vec<f64>>,
    /// Exponent for the intersection bound; scanned when absent.
    #[arg(long)]
    pub c0: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub root_radius: f64,
    #[arg(long)]
    pub ball_radius: Option<f64>,
    #[arg(long)]
    pub sup_ratio: Option<f64>,
    #[arg(long = "K1", default_value_t = 1.0)]
    #[serde(rename = "K1")]
    pub k1: f64,
    #[arg(long = "K2", default_value_t = 1.0)]
    #[serde(rename = "K2")]
    pub k2: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PatternArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Points separated by ';', coordinates by ',' (e.g. "0;1;2").
    #[arg(long)]
    pub pattern: String,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub grid_step: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct RenderArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

impl RunConfig {
    pub fn common(&self) -> &Common {
        match self {
            RunConfig::Thickness(a) => &a.common,
            RunConfig::Gapcheck(a) => &a.common,
            RunConfig::Distances(a) => &a.common,
            RunConfig::Game(a) => &a.common,
            RunConfig::Dims(a) => &a.common,
            RunConfig::Pattern(a) => &a.common,
            RunConfig::Render(a) => &a.common,
        }
    }
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Hypothesis(_) => EXIT_REFUTED,
        Error::Exhausted(_) | Error::StepLimit(_) => EXIT_NOT_CONVERGED,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let config = cli.command;
    let pool = match config.common().threads {
        Some(0) => {
            eprintln!("error: --threads must be at least 1");
            return EXIT_INPUT;
        }
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INPUT;
        }
    };
    match pool.install(|| commands::dispatch(&config)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
