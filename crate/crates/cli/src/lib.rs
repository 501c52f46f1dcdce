//! Batch front end: one subcommand per core operation, JSON on stdout (or
//! `--out`), human-readable notes on stderr.

mod commands;
mod figures;
pub mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use output::{to_json, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SINGULAR: i32 = 2;
pub const EXIT_TIMEOUT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "lagstab", version, about = "Graded Lagrangian curves on the flat torus")]
pub struct Cli {
    /// Seed recorded in the manifest; drives every random perturbation.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON result to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Curve-shortening flow of a curve file or a perturbed line.
    Flow(FlowArgs),
    /// Phase and slope of a graded class.
    Phase(ClassArgs),
    /// Graded connect sum of two curve files.
    Surgery(SurgeryArgs),
    /// Destabilizer search for a graded class.
    Stability(StabilityArgs),
    /// Phase tracking along a loop around the degenerate fibre.
    Monodromy(MonodromyArgs),
    /// Normal form of a twist expression such as `(T L1 2 (sum L1 L2))`.
    Twist(TwistArgs),
    /// Mirror sheaf of a graded class.
    Mirror(ClassArgs),
    /// Verdict for the extension across the slope wall.
    Wall(WallArgs),
    /// Data behind the three figures.
    Figures(FiguresArgs),
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["input", "line"]))]
pub struct FlowArgs {
    /// Curve JSON.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Generate a perturbed line in class `p,q` instead.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub line: Option<[i64; 2]>,
    #[arg(long, default_value_t = 0.1)]
    pub perturb: f64,
    #[arg(long, default_value_t = 256)]
    pub points: usize,
    /// Fourier modes in the perturbation.
    #[arg(long, default_value_t = 4)]
    pub modes: u32,
    #[arg(long)]
    pub max_time: Option<f64>,
    /// Phase-spread convergence tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub dt_safety: Option<f64>,
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    #[arg(long)]
    pub out_curve: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassArgs {
    /// Homology class `p,q`.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub class: [i64; 2],
    /// Sheet of the phase lift: principal argument plus `2 pi lift`.
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    pub lift: i64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct SurgeryArgs {
    pub first: PathBuf,
    pub second: PathBuf,
    /// Relative neck sizes, one per intersection point.
    #[arg(long, value_delimiter = ',')]
    pub necks: Option<Vec<f64>>,
    /// Radius of the largest neck.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Write the summed curve (or components) here.
    #[arg(long)]
    pub out_curve: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub class: ClassArgs,
    #[arg(long, default_value_t = 10)]
    pub bound: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Threefold,
    K3,
}

#[derive(Debug, Args)]
pub struct MonodromyArgs {
    #[arg(long, value_enum, default_value_t = Model::Threefold)]
    pub model: Model,
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    /// Steps around the loop.
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    Contract,
    Distribute,
}

#[derive(Debug, Args)]
pub struct TwistArgs {
    pub expression: String,
    /// Fibre dimension, 2 or 3.
    #[arg(long, default_value_t = 2)]
    pub dimension: u32,
    #[arg(long, value_enum, default_value_t = Strategy::Contract)]
    pub strategy: Strategy,
    /// Generator phases for a phase audit of the normal form.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub phases: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct WallArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    All,
}

#[derive(Debug, Args)]
pub struct FiguresArgs {
    #[arg(value_enum)]
    pub which: Figure,
    #[arg(long, default_value = "figures")]
    pub out_dir: PathBuf,
}

fn parse_pair(s: &str) -> Result<[i64; 2], String> {
    let (a, b) = s.split_once(',').ok_or("expected p,q")?;
    let p = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let q = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    Ok([p, q])
}

#[derive(Debug)]
pub enum CliError {
    Core(lagstab::Error),
    Io(std::io::Error),
    Input(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Input(m) => f.write_str(m),
        }
    }
}

impl From<lagstab::Error> for CliError {
    fn from(e: lagstab::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

/// Result of one command: JSON body, notes for the report stream, exit code.
pub struct Outcome {
    pub json: String,
    pub report: Vec<String>,
    pub code: i32,
}

/// Parse `argv` (program name first), run, and return the exit code.
pub fn dispatch<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    dispatch_to(argv, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn dispatch_to<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let args: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(shown.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(shown.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    let flags: Vec<String> = args
        .iter()
        .skip(1)
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match commands::run(&cli, &flags) {
        Ok(o) => {
            for line in &o.report {
                let _ = writeln!(err, "{line}");
            }
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &o.json),
                None => out.write_all(o.json.as_bytes()),
            };
            if let Err(e) = written {
                let _ = writeln!(err, "error: {e}");
                return EXIT_USAGE;
            }
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
