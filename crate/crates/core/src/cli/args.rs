use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "polsar-entropy",
    version,
    about = "Entropy-based inference for multilook PolSAR covariance data"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Report format on stdout.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Write the report to a file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Master seed for every random draw.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Include wall-clock timing in the report.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximum-likelihood fit of (Σ, L) per region, with AIC.
    Estimate(EstimateArgs),
    /// Entropies, asymptotic variances and confidence intervals.
    Entropy(EntropyArgs),
    /// Contrast test of equal entropies across two or more regions.
    Test(TestArgs),
    /// Goodness of fit of one region against a reference entropy.
    Gof(GofArgs),
    /// Monte Carlo size or power campaign from a TOML configuration.
    Simulate(SimulateArgs),
    /// Entropy curves over looks, orders and covariance scales.
    Casestudy(CasestudyArgs),
    /// Draw a synthetic covariance stack.
    Synth(SynthArgs),
    /// Resampling campaign on two observed regions.
    Resample(ResampleArgs),
}

/// Where populations come from: regions of a stack, or published /
/// hand-entered summaries.
#[derive(Debug, Args, Default)]
pub struct SourceArgs {
    /// Covariance stack (PCSK, or CSV with a .csv extension).
    #[arg(long)]
    pub stack: Option<PathBuf>,

    /// Region of the stack: rect:x0,y0,x1,y1 or mask:PATH. Repeatable.
    #[arg(long = "region")]
    pub regions: Vec<String>,

    /// Summary instead of pixels: name=ID,m=3,looks=L,n=N and det=D or lndet=X. Repeatable.
    #[arg(long = "fixture")]
    pub fixtures: Vec<String>,

    /// Published summaries: regions-a (A1-A3) or regions-b (B1-B3).
    #[arg(long)]
    pub preset: Option<String>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub stack: PathBuf,

    #[arg(long = "region", required = true)]
    pub regions: Vec<String>,

    /// Looks value of the fixed-L model in the AIC comparison.
    #[arg(long, default_value_t = 3.2)]
    pub fixed_looks: f64,
}

#[derive(Debug, Args)]
pub struct KindArgs {
    /// Entropy kinds: shannon, renyi:B, tsallis:B.
    #[arg(long, default_value = "shannon,renyi:0.1,renyi:0.8")]
    pub kinds: String,
}

#[derive(Debug, Args)]
pub struct EntropyArgs {
    #[command(flatten)]
    pub source: SourceArgs,

    #[command(flatten)]
    pub kinds: KindArgs,

    /// Confidence level; intervals are reported only when given.
    #[arg(long)]
    pub level: Option<f64>,

    #[arg(long, value_enum, default_value_t = Convention::TwoSided)]
    pub convention: Convention,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Convention {
    TwoSided,
    PaperCompat,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub source: SourceArgs,

    #[command(flatten)]
    pub kinds: KindArgs,

    /// Significance levels for the reject decisions.
    #[arg(long, default_value = "0.01,0.05,0.1", value_delimiter = ',')]
    pub levels: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct GofArgs {
    #[command(flatten)]
    pub source: SourceArgs,

    #[command(flatten)]
    pub kinds: KindArgs,

    /// Reference entropy value.
    #[arg(long, allow_hyphen_values = true)]
    pub value: f64,

    #[arg(long, default_value = "0.01,0.05,0.1", value_delimiter = ',')]
    pub levels: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML campaign configuration.
    #[arg(long)]
    pub config: PathBuf,

    /// Directory receiving report.csv and report.json.
    #[arg(long)]
    pub out_dir: PathBuf,

    /// Worker threads (results do not depend on it).
    #[arg(long)]
    pub threads: Option<usize>,

    /// Overrides the configured number of replicas.
    #[arg(long)]
    pub replicas: Option<usize>,
}

#[derive(Debug, Args)]
pub struct CasestudyArgs {
    /// Looks grid START:END[:STEP].
    #[arg(long, default_value = "3:50")]
    pub looks: String,

    #[arg(long, default_value = "0.1,0.5,0.8", value_delimiter = ',')]
    pub betas: Vec<f64>,

    /// Covariance scales k; curves use (1 + k)·Σ_U.
    #[arg(long, default_value = "0,0.1,0.2", value_delimiter = ',')]
    pub scales: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub looks: f64,

    /// Covariance multiplier applied to the preset.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,

    #[arg(long, default_value = "sigma_u")]
    pub preset: String,

    #[arg(long)]
    pub rows: usize,

    #[arg(long)]
    pub cols: usize,

    #[arg(long, default_value = "auto")]
    pub sampler: String,

    /// Output stack (PCSK, or CSV with a .csv extension).
    #[arg(long)]
    pub stack_out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ResampleArgs {
    #[arg(long)]
    pub stack: PathBuf,

    /// Exactly two regions.
    #[arg(long = "region", num_args = 1, required = true)]
    pub regions: Vec<String>,

    #[arg(long, default_value = "9,49,81,121,400", value_delimiter = ',')]
    pub sizes: Vec<usize>,

    #[arg(long, default_value_t = 5500)]
    pub replicas: usize,

    #[command(flatten)]
    pub kinds: KindArgs,

    #[arg(long, default_value = "0.01,0.05,0.1", value_delimiter = ',')]
    pub levels: Vec<f64>,

    #[arg(long)]
    pub threads: Option<usize>,

    /// Label the campaign as a size study (regions believed equal).
    #[arg(long)]
    pub same_population: bool,

    /// Directory receiving report.csv and report.json.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}
