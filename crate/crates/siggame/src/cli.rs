//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use siggame_core::EncoderMode;

use crate::format::Format;

#[derive(Debug, Clone, Parser)]
#[command(name = "siggame", version, about = "Equilibria and Monte Carlo checks for quadratic Gaussian signaling games")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Single-stage Stackelberg equilibrium (encoder leads).
    SingleStackelberg(SingleArgs),
    /// Multi-stage Stackelberg equilibrium over a Gauss-Markov source.
    MultiStackelberg(MultiArgs),
    /// All affine Nash equilibria of the single-stage game.
    Nash(NashArgs),
    /// Empirical versus analytic costs for a strategy pair.
    Simulate(SimulateArgs),
    /// Stackelberg solution and Nash count along a parameter grid.
    Sweep(SweepArgs),
}

impl Command {
    pub fn output(&self) -> &OutputArgs {
        match self {
            Command::SingleStackelberg(a) => &a.output,
            Command::MultiStackelberg(a) => &a.output,
            Command::Nash(a) => &a.output,
            Command::Simulate(a) => &a.output,
            Command::Sweep(a) => &a.output,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::SingleStackelberg(_) => "single-stackelberg",
            Command::MultiStackelberg(_) => "multi-stackelberg",
            Command::Nash(_) => "nash",
            Command::Simulate(_) => "simulate",
            Command::Sweep(_) => "sweep",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    /// TOML configuration file; flags override its values.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Write the report to a file instead of standard output.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Record wall-clock time in the report provenance.
    #[arg(long)]
    pub timing: bool,
}

/// Game parameters. Per-stage keys accept comma-separated lists for
/// multi-stage runs; a single value applies to every stage.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    /// Source variance.
    #[arg(long, allow_negative_numbers = true)]
    pub sigma_x2: Option<f64>,
    /// Encoder-channel noise variance.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub sigma_v2: Vec<f64>,
    /// Side-channel noise variance.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub sigma_w2: Vec<f64>,
    /// Power weight in the encoder cost.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub theta: Vec<f64>,
    /// Encoder bias (default 0).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub bias: Vec<f64>,
    /// Horizon n (stages 0..=n); selects the multi-stage game in `simulate`.
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Source transition coefficients.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub beta: Vec<f64>,
    /// Process-noise variances.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub sigma_n2: Vec<f64>,
    /// Initial source variance.
    #[arg(long = "sigma-x0-2", allow_negative_numbers = true)]
    pub sigma_x0_2: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct VerifyArgs {
    /// Append Monte Carlo and brute-force oracle cross-checks; exit 4 if any fails.
    #[arg(long)]
    pub verify: bool,
    /// Monte Carlo samples for `--verify`.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    /// Monte Carlo seed for `--verify`.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SingleArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub verify: VerifyArgs,
}

#[derive(Debug, Clone, Args)]
pub struct MultiArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub verify: VerifyArgs,
}

#[derive(Debug, Clone, Args)]
pub struct NashArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StrategySource {
    /// Solve the Stackelberg equilibrium first.
    Equilibrium,
    /// Use the `[strategy]` section and strategy flags.
    Explicit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Memoryless,
    Innovations,
}

impl From<ModeArg> for EncoderMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Memoryless => EncoderMode::Memoryless,
            ModeArg::Innovations => EncoderMode::Innovations,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Number of samples or trajectories [default: 1000000].
    #[arg(long)]
    pub samples: Option<u64>,
    /// RNG seed [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Samples per independently seeded block [default: 65536].
    #[arg(long)]
    pub block_size: Option<u64>,
    /// Encoder form for multi-stage runs.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long, value_enum, default_value_t = StrategySource::Equilibrium)]
    pub strategy: StrategySource,
    /// Encoder slope.
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    /// Encoder offset (default 0).
    #[arg(long, allow_negative_numbers = true)]
    pub c: Option<f64>,
    /// Decoder gain; give `k`, `l` and `alpha` together or not at all.
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Decoder offset.
    #[arg(long, allow_negative_numbers = true)]
    pub l: Option<f64>,
    /// Decoder combining ratio.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Per-stage encoder slopes (multi-stage).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub slopes: Vec<f64>,
    /// Per-stage combining ratios (multi-stage); table-optimal when absent.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub alphas: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepParam {
    #[value(name = "sigma_x2")]
    SigmaX2,
    #[value(name = "sigma_v2")]
    SigmaV2,
    #[value(name = "sigma_w2")]
    SigmaW2,
    #[value(name = "theta")]
    Theta,
    #[value(name = "bias")]
    Bias,
}

impl SweepParam {
    pub fn key(self) -> &'static str {
        match self {
            SweepParam::SigmaX2 => "sigma_x2",
            SweepParam::SigmaV2 => "sigma_v2",
            SweepParam::SigmaW2 => "sigma_w2",
            SweepParam::Theta => "theta",
            SweepParam::Bias => "bias",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Parameter to vary; the others stay fixed.
    #[arg(long, value_enum)]
    pub param: SweepParam,
    /// First grid value.
    #[arg(long, allow_negative_numbers = true)]
    pub from: f64,
    /// Last grid value.
    #[arg(long, allow_negative_numbers = true)]
    pub to: f64,
    /// Number of grid intervals; the sweep has `steps + 1` points.
    #[arg(long)]
    pub steps: u64,
}
