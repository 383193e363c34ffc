//! `sftnorm`: shift analysis, sequence generation, normality testing,
//! transducer execution and compression experiments, reported as JSON.

mod commands;
mod io;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "sftnorm", version, about = "Normality and finite-state compression in shifts of finite type")]
struct Cli {
    /// Write the report (or generated sequence) here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Perron eigenvalue and topological entropy of a shift.
    Entropy(EntropyArgs),
    /// Parry measure with an invariance audit.
    Parry(ParryArgs),
    /// Count (and optionally list) the blocks of one length.
    Blocks(BlocksArgs),
    /// Write a sequence sampled from the Parry measure, a skewed chain, or a periodic word.
    Generate(GenerateArgs),
    /// Occurrence and aligned-occurrence counts of all words of one length.
    Occ(OccArgs),
    /// Test a sequence for normality under the aligned, strong and nonaligned definitions.
    Normality(NormalityArgs),
    /// Run a transducer on a word.
    Run(RunArgs),
    /// Exhaustive injectivity check up to a depth.
    Injectivity(InjectivityArgs),
    /// Generalized Kraft inequality audit.
    KraftAudit(KraftArgs),
    /// Build the cross-shift block recoder.
    Recoder(RecoderArgs),
    /// Build the block-code compressor of a sequence and measure its ratio.
    Compress(CompressArgs),
    /// Entropy gap of the empirical chain of a sequence.
    Certificate(CertificateArgs),
    /// Check that a report file is well formed.
    ValidateReport(ValidateArgs),
}

#[derive(Args, Debug, Serialize)]
struct EntropyArgs {
    #[arg(long)]
    shift: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct ParryArgs {
    #[arg(long)]
    shift: PathBuf,
    /// Longest block length in the mass audit.
    #[arg(long, default_value_t = 8)]
    audit_length: usize,
}

#[derive(Args, Debug, Serialize)]
struct BlocksArgs {
    #[arg(long)]
    shift: PathBuf,
    #[arg(long)]
    n: usize,
    /// Also list the blocks.
    #[arg(long)]
    list: bool,
    /// Largest number of blocks listed.
    #[arg(long, default_value_t = 1 << 20)]
    cap: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum GenMode {
    Parry,
    Skewed,
    Periodic,
}

#[derive(Args, Debug, Serialize)]
struct GenerateArgs {
    #[arg(long)]
    shift: PathBuf,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = GenMode::Parry)]
    mode: GenMode,
    /// Stochastic matrix (JSON array of rows) for `--mode skewed`.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Word repeated for `--mode periodic`.
    #[arg(long)]
    word: Option<String>,
    /// Also write a generation report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct OccArgs {
    #[arg(long)]
    seq: PathBuf,
    /// Take the alphabet from a shift file.
    #[arg(long, conflicts_with = "alphabet", required_unless_present = "alphabet")]
    shift: Option<PathBuf>,
    /// Alphabet glyphs, e.g. `01`.
    #[arg(long)]
    alphabet: Option<String>,
    #[arg(long)]
    l: usize,
    #[arg(long, default_value_t = io::DEFAULT_MAX_SYMBOLS)]
    max_symbols: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum DefArg {
    Aligned,
    Strong,
    Nonaligned,
    All,
}

#[derive(Args, Debug, Serialize)]
struct NormalityArgs {
    #[arg(long)]
    shift: PathBuf,
    #[arg(long)]
    seq: PathBuf,
    /// Target measure (JSON); defaults to the Parry measure of the shift.
    #[arg(long)]
    measure: Option<PathBuf>,
    #[arg(long, default_value_t = sftnorm::normality::DEFAULT_L_MAX)]
    lmax: usize,
    #[arg(long, default_value_t = sftnorm::normality::DEFAULT_K_MAX)]
    kmax: usize,
    /// Frequency tolerance; defaults to max(0.01, 3·sqrt(ln n / n)).
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = DefArg::All)]
    def: DefArg,
    /// Minimum expected windows per block, as a multiple of the block length.
    #[arg(long, default_value_t = sftnorm::normality::DEFAULT_MIN_MASS)]
    min_mass: usize,
    #[arg(long, default_value_t = io::DEFAULT_MAX_SYMBOLS)]
    max_symbols: usize,
}

#[derive(Args, Debug, Serialize)]
struct RunArgs {
    #[arg(long)]
    transducer: PathBuf,
    /// Input word given inline.
    #[arg(long, conflicts_with = "seq", required_unless_present = "seq")]
    input: Option<String>,
    /// Input word read from a sequence file.
    #[arg(long)]
    seq: Option<PathBuf>,
    /// Only accept runs ending in a final state.
    #[arg(long)]
    complete: bool,
    /// Include the visited states.
    #[arg(long)]
    trace: bool,
    #[arg(long, default_value_t = sftnorm::transducer::DEFAULT_WIDTH_CAP)]
    width_cap: usize,
    #[arg(long, default_value_t = io::DEFAULT_MAX_SYMBOLS)]
    max_symbols: usize,
}

#[derive(Args, Debug, Serialize)]
struct InjectivityArgs {
    #[arg(long)]
    transducer: PathBuf,
    #[arg(long)]
    depth: usize,
}

#[derive(Args, Debug, Serialize)]
struct KraftArgs {
    #[arg(long)]
    transducer: PathBuf,
    #[arg(long)]
    l: usize,
    /// Claimed bound on preimage multiplicity.
    #[arg(long, default_value_t = 1)]
    k: u64,
}

#[derive(Args, Debug, Serialize)]
struct RecoderArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long)]
    target: PathBuf,
    #[arg(long)]
    epsilon: f64,
    /// Encode this source sequence and measure the ratio.
    #[arg(long)]
    seq: Option<PathBuf>,
    /// Largest number of source blocks materialized as a transducer.
    #[arg(long, default_value_t = 1 << 20)]
    cap: u64,
    #[arg(long)]
    transducer_out: Option<PathBuf>,
    /// Write the encoded sequence here.
    #[arg(long)]
    encoded_out: Option<PathBuf>,
    #[arg(long, default_value_t = io::DEFAULT_MAX_SYMBOLS)]
    max_symbols: usize,
}

#[derive(Args, Debug, Serialize)]
struct CompressArgs {
    #[arg(long)]
    shift: PathBuf,
    #[arg(long)]
    seq: PathBuf,
    #[arg(long, default_value_t = 1)]
    l: usize,
    #[arg(long, default_value_t = 8)]
    k: usize,
    /// Number of evenly spaced prefixes at which the ratio is sampled.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long)]
    transducer_out: Option<PathBuf>,
    /// Write the encoded bitstream here.
    #[arg(long)]
    bits_out: Option<PathBuf>,
    #[arg(long, default_value_t = io::DEFAULT_MAX_SYMBOLS)]
    max_symbols: usize,
}

#[derive(Args, Debug, Serialize)]
struct CertificateArgs {
    #[arg(long)]
    shift: PathBuf,
    #[arg(long)]
    seq: PathBuf,
    #[arg(long, default_value_t = 1)]
    l: usize,
    #[arg(long, default_value_t = io::DEFAULT_MAX_SYMBOLS)]
    max_symbols: usize,
}

#[derive(Args, Debug, Serialize)]
struct ValidateArgs {
    file: PathBuf,
}

/// A failed command: bad input (exit 2) or an internal error (exit 3).
#[derive(Debug)]
pub enum Failure {
    Validation { stage: &'static str, message: String },
    Internal { stage: &'static str, message: String },
}

impl Failure {
    pub fn validation(stage: &'static str, message: impl Into<String>) -> Self {
        Failure::Validation { stage, message: message.into() }
    }

    pub fn internal(stage: &'static str, message: impl Into<String>) -> Self {
        Failure::Internal { stage, message: message.into() }
    }

    pub fn from_lib(stage: &'static str, e: sftnorm::Error) -> Self {
        if e.is_validation() {
            Self::validation(stage, e.to_string())
        } else {
            Self::internal(stage, e.to_string())
        }
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Validation { .. } => 2,
            Failure::Internal { .. } => 3,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Validation { stage, message } | Failure::Internal { stage, message } => {
                write!(f, "{stage}: {message}")
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
