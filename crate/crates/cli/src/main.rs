//! `kcfix`: classify maps on finite metric spaces, run Picard iteration,
//! sweep the fixed-point theorems and check the sequence conditions.
//!
//! Exit codes: 0 success, 1 violation found, 2 usage or input error.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use output::Format;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: kcfix::io::FormatError },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Whether a command found what it was checking for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Violation,
}

#[derive(Parser)]
#[command(name = "kcfix", version, about = "Kannan and Chatterjea type fixed-point checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify every self-map of a space (or the map given in the file).
    Classify(ClassifyArgs),
    /// Picard iteration on a named fixture or a finite instance.
    Iterate(IterateArgs),
    /// Sweep the theorems over finite instances.
    Verify(VerifyArgs),
    /// Conditions (i)-(v) on a family a_n = alpha + c r^n.
    Sequences(SequencesArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MetricKind {
    /// All distances 1.
    Unit,
    /// d(i, j) = |i - j|.
    Path,
    /// Seeded random weights repaired to a metric.
    Random,
}

#[derive(Args)]
pub struct ClassifyArgs {
    /// Instance file, text or JSON. Without a map line every map is classified.
    #[arg(conflicts_with = "metric")]
    pub file: Option<PathBuf>,
    /// Generate the space instead of reading it.
    #[arg(long, value_enum, requires = "points")]
    pub metric: Option<MetricKind>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 6)]
    pub max_value: u32,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Args)]
pub struct IterateArgs {
    /// One of the built-in interval fixtures.
    #[arg(long, conflicts_with = "space", required_unless_present = "space")]
    pub fixture: Option<String>,
    /// Instance file with a map line.
    #[arg(long)]
    pub space: Option<PathBuf>,
    /// Start point: a number for fixtures, a point index for spaces.
    #[arg(long)]
    pub x0: String,
    #[arg(long, default_value_t = kcfix::picard::DEFAULT_TOLERANCE)]
    pub tol: f64,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Demo {
    Completeness,
}

#[derive(Args)]
pub struct VerifyArgs {
    /// all, 2.1, 3.1, 4.1, 4.2 or 5.2 (comma separated).
    #[arg(long, default_value = "all")]
    pub thm: String,
    /// Every map on the unit space (n <= 2) or a seeded pool of spaces.
    #[arg(long, conflicts_with_all = ["random", "demo", "search"])]
    pub exhaustive: bool,
    /// Seeded random instances.
    #[arg(long, conflicts_with_all = ["demo", "search"])]
    pub random: bool,
    /// Randomised search for a violated invariant.
    #[arg(long, conflicts_with = "demo")]
    pub search: bool,
    #[arg(long, value_enum)]
    pub demo: Option<Demo>,
    /// Sizes: for --exhaustive a bound N (sizes 1..=N), otherwise a list.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Spaces per size in the exhaustive pool.
    #[arg(long, default_value_t = 50)]
    pub pool: usize,
    #[arg(long, default_value_t = 6)]
    pub max_value: u32,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Args)]
pub struct SequencesArgs {
    #[arg(long, value_delimiter = ',', default_value = "0,1/2")]
    pub alpha: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "1,1/2")]
    pub c: Vec<String>,
    #[arg(long, value_delimiter = ',', default_value = "1/2,1/4")]
    pub r: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = match cli.command {
        Command::Classify(args) => commands::classify(&args, &mut out),
        Command::Iterate(args) => commands::iterate(&args, &mut out),
        Command::Verify(args) => commands::verify(&args, &mut out),
        Command::Sequences(args) => commands::sequences(&args, &mut out),
    };
    match result {
        Ok(Verdict::Pass) => ExitCode::SUCCESS,
        Ok(Verdict::Violation) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
