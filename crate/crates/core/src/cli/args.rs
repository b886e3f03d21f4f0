use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::density::Bandwidth;

#[derive(Debug, Parser)]
#[command(name = "unifilter", version, about = "Uniform filtering of p-values")]
pub struct Cli {
    /// TOML file of key = value defaults; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Directory for outputs without an explicit path [default: $UNIFILTER_OUT_DIR, else .]
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample labelled p-values from a two-group mixture.
    Generate(GenerateArgs),
    /// Filter, estimate the mode and select a rejection region.
    Analyze(AnalyzeArgs),
    /// Bin counts of a p-value file for plotting.
    Explore(ExploreArgs),
    /// Re-run the published experiments.
    Reproduce(ReproduceArgs),
    /// Repeat the run recorded in a manifest.
    Rerun(RerunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Gaussian,
    Cauchy,
    StudentT,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FilterArg {
    Fixed,
    Random,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub family: Option<FamilyArg>,
    /// Degrees of freedom of the Student-t family.
    #[arg(long, value_parser = parse_positive_u32)]
    pub df: Option<u32>,
    /// Probability of a true alternative, in [0, 1).
    #[arg(long, value_parser = parse_epsilon)]
    pub epsilon: Option<f64>,
    /// Shift of the alternative distribution.
    #[arg(long, value_parser = parse_finite, allow_hyphen_values = true)]
    pub mu: Option<f64>,
    /// Number of p-values.
    #[arg(long, value_parser = parse_count)]
    pub m: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output CSV [default: <out-dir>/pvalues.csv]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// CSV with a `p` column and an optional `h` column.
    #[arg(long)]
    pub input: PathBuf,
    /// Retained fraction of the filter [default: 0.15].
    #[arg(long, value_parser = parse_open_unit, conflicts_with = "stabilize")]
    pub xi: Option<f64>,
    /// Choose ξ by lowering it until the mode estimate settles.
    #[arg(long)]
    pub stabilize: bool,
    #[arg(long, value_parser = parse_open_unit)]
    pub alpha: Option<f64>,
    /// Smooth −log p instead of p.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub transform: Option<bool>,
    /// `rule` or a fixed positive bandwidth.
    #[arg(long, value_parser = parse_bandwidth)]
    pub bandwidth: Option<Bandwidth>,
    #[arg(long, value_enum)]
    pub filter: Option<FilterArg>,
    /// Seed of the random filter.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also locate cluster centres from the weighted gaps.
    #[arg(long)]
    pub centers: bool,
    /// Window of the gap discrepancies [default: ⌈√m⌉]
    #[arg(long, value_parser = parse_count)]
    pub window: Option<usize>,
    /// Depth of a gap centre in units of the null weighted-gap mean.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Output JSON [default: <out-dir>/analysis.json]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExploreArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Number of equal bins on (0, 1] [default: number of p-values]
    #[arg(long, value_parser = parse_count)]
    pub nbins: Option<usize>,
    /// Largest bin midpoint written [default: 0.2]
    #[arg(long)]
    pub upto: Option<f64>,
    /// Output CSV [default: <out-dir>/bins.csv]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[command(subcommand)]
    pub target: ReproduceTarget,
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// Replications [defaults: 10, 200, 50, 50]
    #[arg(long, value_parser = parse_count)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads, 0 for all cores; results do not depend on it.
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum ReproduceTarget {
    /// Remaining alternatives after the fixed-length filter.
    Table1(RunArgs),
    /// Full pipeline on the shifted Cauchy model.
    Table2(Table2Args),
    /// Falsely deleted alternatives along ε = m^−γ, μ = m^r.
    Asymptotic(AsymptoticArgs),
    /// Median mode error as m grows.
    ModeConvergence(ModeConvergenceArgs),
}

#[derive(Debug, Args)]
pub struct Table2Args {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_parser = parse_finite)]
    pub mu: Option<f64>,
    #[arg(long, value_parser = parse_open_unit)]
    pub xi: Option<f64>,
    #[arg(long, value_parser = parse_open_unit)]
    pub alpha: Option<f64>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub transform: Option<bool>,
    #[arg(long, value_parser = parse_bandwidth)]
    pub bandwidth: Option<Bandwidth>,
    #[arg(long, value_enum)]
    pub filter: Option<FilterArg>,
}

#[derive(Debug, Args)]
pub struct AsymptoticArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_parser = parse_positive)]
    pub gamma: Option<f64>,
    #[arg(long, value_parser = parse_finite, allow_hyphen_values = true)]
    pub r: Option<f64>,
    /// Comma-separated increasing sample sizes.
    #[arg(long, value_delimiter = ',', value_parser = parse_count)]
    pub m_grid: Option<Vec<usize>>,
    #[arg(long, value_parser = parse_open_unit)]
    pub xi: Option<f64>,
    #[arg(long, value_enum)]
    pub filter: Option<FilterArg>,
}

#[derive(Debug, Args)]
pub struct ModeConvergenceArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_parser = parse_finite)]
    pub mu: Option<f64>,
    #[arg(long, value_parser = parse_epsilon)]
    pub epsilon: Option<f64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_count)]
    pub m_grid: Option<Vec<usize>>,
    #[arg(long, value_parser = parse_open_unit)]
    pub xi: Option<f64>,
}

#[derive(Debug, Args)]
pub struct RerunArgs {
    pub manifest: PathBuf,
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.parse::<f64>().map_err(|e| format!("`{s}` is not a number: {e}"))
}

pub(crate) fn parse_finite(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s} is not finite"))
    }
}

pub(crate) fn parse_positive(s: &str) -> Result<f64, String> {
    let v = parse_finite(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{s} must be positive"))
    }
}

pub(crate) fn parse_epsilon(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if (0.0..1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{s} is outside [0, 1)"))
    }
}

pub(crate) fn parse_open_unit(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{s} is outside (0, 1)"))
    }
}

pub(crate) fn parse_count(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(format!("`{s}` is not a count: {e}")),
    }
}

fn parse_positive_u32(s: &str) -> Result<u32, String> {
    match s.parse::<u32>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(format!("`{s}` is not a positive integer: {e}")),
    }
}

pub(crate) fn parse_bandwidth(s: &str) -> Result<Bandwidth, String> {
    if s == "rule" {
        return Ok(Bandwidth::Rule);
    }
    parse_positive(s).map(Bandwidth::Fixed)
}

pub(crate) fn bandwidth_arg(b: Bandwidth) -> String {
    match b {
        Bandwidth::Rule => "rule".into(),
        Bandwidth::Fixed(h) => h.to_string(),
    }
}
