//! `gldpc` command-line front end.

mod commands;
mod grid;
mod sidecar;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gldpc::channels::SnrConvention;
use gldpc::gauss_approx::PhiMode;

/// Environment variable holding the worker-thread count.
pub const THREADS_ENV: &str = "GLDPC_THREADS";

#[derive(Parser, Debug)]
#[command(name = "gldpc", version, about = "Threshold analysis and simulation of GLDPC codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check message invariance of a subcode and print its permutation table
    /// and erasure polynomials.
    VerifySubcode(VerifyArgs),
    /// Decoding thresholds over one GC fraction or a grid of them.
    Threshold(ThresholdArgs),
    /// Thresholds with design rate, capacity at threshold and gap.
    GapCurves(ThresholdArgs),
    /// GA, GMA or DE threshold of an LDPC ensemble with irregular check
    /// degrees on the BI-AWGN channel.
    LdpcThreshold(LdpcArgs),
    /// Block-error-rate simulation of a sampled GLDPC code and its
    /// rate-matched LDPC comparison code.
    Simulate(SimulateArgs),
    /// Re-runs the command recorded in a JSON sidecar.
    Rerun(RerunArgs),
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    /// Built-in name (C1, C2) or parity-check matrix file.
    pub code: String,
    /// CSV with one row per position.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Channel {
    Bec,
    Awgn,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    /// Quantized density evolution; GC densities by Monte Carlo.
    #[value(alias = "de")]
    DeMc,
    Ga,
    Gma,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhiArg {
    Fit,
    Exact,
}

impl From<PhiArg> for PhiMode {
    fn from(p: PhiArg) -> Self {
        match p {
            PhiArg::Fit => PhiMode::Fit,
            PhiArg::Exact => PhiMode::Exact,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConventionArg {
    /// `10 log10(1 / sigma^2)`.
    Es,
    /// `10 log10(1 / (2 R sigma^2))`.
    EbN0,
}

impl From<ConventionArg> for SnrConvention {
    fn from(c: ConventionArg) -> Self {
        match c {
            ConventionArg::Es => SnrConvention::Es,
            ConventionArg::EbN0 => SnrConvention::EbN0,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct ThresholdArgs {
    #[arg(long, value_enum)]
    pub channel: Channel,
    /// Built-in name (C1, C2) or parity-check matrix file.
    #[arg(long, default_value = "C1")]
    pub code: String,
    /// Variable-node degree J.
    #[arg(long, default_value_t = 2)]
    pub j: usize,
    /// Fraction of constraint nodes that are GC nodes.
    #[arg(long, conflicts_with = "t_grid", required_unless_present = "t_grid")]
    pub t: Option<f64>,
    /// GC fractions as `start:stop:step`, both ends included.
    #[arg(long)]
    pub t_grid: Option<String>,
    /// AWGN analysis method [default: gma]. Not accepted for the BEC.
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Bisection tolerance on the channel parameter.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Error-probability target that counts as convergence.
    #[arg(long)]
    pub target_pe: Option<f64>,
    /// Iteration cap for each evolution run.
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// How phi is evaluated (GA and GMA).
    #[arg(long, value_enum, default_value = "fit")]
    pub phi: PhiArg,
    /// GC mean map table (CSV with input_mean,output_mean,sample_count).
    #[arg(long)]
    pub gc_map: Option<PathBuf>,
    /// Fit the GC mean map by Monte Carlo with this many samples per mean.
    #[arg(long)]
    pub fit_gc_map: Option<usize>,
    /// Monte-Carlo samples per GC density (de-mc).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Monte-Carlo samples for the confirmation probes (de-mc).
    #[arg(long)]
    pub confirm_samples: Option<usize>,
    /// Half the number of interior quantization bins (de-mc).
    #[arg(long)]
    pub half_bins: Option<usize>,
    /// Largest finite quantized LLR (de-mc).
    #[arg(long)]
    pub l_max: Option<f64>,
    /// Master seed; required whenever Monte Carlo is involved.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fill the runtime column with wall-clock seconds. Off by default so
    /// that repeated runs produce identical files.
    #[arg(long)]
    pub record_runtime: bool,
    /// Output CSV; a JSON sidecar is written next to it.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct LdpcArgs {
    /// Variable-node degree.
    #[arg(long, default_value_t = 3)]
    pub lambda: usize,
    /// Check-degree edge fractions as `degree:fraction,...`.
    #[arg(long)]
    pub rho: String,
    #[arg(long, value_enum, default_value = "gma")]
    pub method: MethodArg,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub target_pe: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long, value_enum, default_value = "fit")]
    pub phi: PhiArg,
    #[arg(long)]
    pub half_bins: Option<usize>,
    #[arg(long)]
    pub l_max: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct SimulateArgs {
    /// Built-in name (C1, C2) or parity-check matrix file.
    #[arg(long, default_value = "C1")]
    pub code: String,
    /// Variable-node degree J.
    #[arg(long, default_value_t = 2)]
    pub j: usize,
    /// Fraction of constraint nodes that are GC nodes.
    #[arg(long)]
    pub t: f64,
    /// Block length n.
    #[arg(long)]
    pub n: usize,
    /// Noise standard deviations, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "snr_db", required_unless_present = "snr_db")]
    pub sigma: Vec<f64>,
    /// SNR points in dB, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub snr_db: Vec<f64>,
    #[arg(long, value_enum, default_value = "es")]
    pub convention: ConventionArg,
    #[arg(long, default_value_t = 20)]
    pub max_iters: usize,
    /// Maximum trials per point.
    #[arg(long, default_value_t = 100_000)]
    pub trials: usize,
    /// Stop a point after this many block errors.
    #[arg(long, default_value_t = 200)]
    pub max_errors: usize,
    /// Swap budget for removing short cycles.
    #[arg(long, default_value_t = 1_000_000)]
    pub max_swaps: usize,
    /// Skip the rate-matched LDPC comparison.
    #[arg(long)]
    pub no_ldpc: bool,
    /// Redraw each graph until no cycle runs through SPC nodes only. Such
    /// cycles are low-weight codewords that cause an error floor.
    #[arg(long)]
    pub expurgate: bool,
    /// Directory for the sampled graphs in adjacency format.
    #[arg(long)]
    pub graph_dir: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct RerunArgs {
    pub sidecar: PathBuf,
    /// Output CSV for the replay (its own sidecar is written next to it).
    #[arg(long)]
    pub out: PathBuf,
}

/// How a command ended, mapped to the process exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments or unusable input (exit 1).
    Usage(anyhow::Error),
    /// A verification found a negative answer (exit 2).
    Verification(String),
    /// A numerical procedure did not settle (exit 3).
    NonConvergence(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Verification(_) => 2,
            Failure::NonConvergence(_) => 3,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<gldpc::Error>() {
            Some(gldpc::Error::CleaningExhausted { .. } | gldpc::Error::ExpurgationExhausted { .. }) => {
                Failure::NonConvergence(format!("{e:#}"))
            }
            _ => Failure::Usage(e),
        }
    }
}

impl From<gldpc::Error> for Failure {
    fn from(e: gldpc::Error) -> Self {
        Failure::from(anyhow::Error::from(e))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    match commands::dispatch(cli.command, &argv[1..]) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(e) => eprintln!("error: {e:#}"),
                Failure::Verification(msg) => eprintln!("verification failed: {msg}"),
                Failure::NonConvergence(msg) => eprintln!("did not converge: {msg}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let threads: usize = value
            .parse()
            .map_err(|_| anyhow::anyhow!("{THREADS_ENV} must be a positive integer, got `{value}`"))?;
        gldpc::par::set_worker_count(threads)?;
    }
    Ok(())
}
