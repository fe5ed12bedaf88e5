use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use subclust::{InitStrategy, PrototypeMethod};

#[derive(Debug, Parser)]
#[command(
    name = "subclust",
    version,
    about = "Subspace clustering on the Grassmannian"
)]
pub struct Cli {
    /// Worker threads (0 uses every logical core).
    #[arg(long, global = true, env = "SUBCLUST_THREADS", default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a synthetic dataset of subspaces around random lines.
    Generate(GenerateArgs),
    /// Turn labeled vectors into grouped subspace samples.
    #[command(subcommand)]
    Ingest(IngestCommand),
    /// Run one LBG clustering.
    Cluster(ClusterArgs),
    /// Run LBG over a grid of methods, center counts and trials.
    Sweep(SweepArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub prototypes: u64,
    #[arg(long = "per-group", default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub per_group: u64,
    #[arg(long, default_value_t = 25, value_parser = clap::value_parser!(u64).range(1..))]
    pub ambient: u64,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub dim: u64,
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum IngestCommand {
    /// IDX image/label pair (e.g. MNIST).
    Mnist(MnistArgs),
    /// CSV with a `class` column followed by feature columns.
    Csv(CsvArgs),
}

#[derive(Debug, Args)]
pub struct MnistArgs {
    #[arg(long)]
    pub images: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    /// Classes to keep, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub classes: Vec<u32>,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub group: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CsvArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Classes to keep, comma separated (default: all).
    #[arg(long, value_delimiter = ',')]
    pub classes: Option<Vec<u32>>,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub group: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Svbf,
    Flagmean,
    Flagmedian,
}

impl From<MethodArg> for PrototypeMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Svbf => PrototypeMethod::Svbf,
            MethodArg::Flagmean => PrototypeMethod::FlagMean,
            MethodArg::Flagmedian => PrototypeMethod::FlagMedian,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum InitArg {
    /// Seed prototypes from distinct samples.
    Sample,
    /// Random orthonormal prototypes.
    Random,
}

impl From<InitArg> for InitStrategy {
    fn from(i: InitArg) -> Self {
        match i {
            InitArg::Sample => InitStrategy::SampleSeeded,
            InitArg::Random => InitStrategy::RandomOrthonormal,
        }
    }
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub centers: u64,
    #[arg(long = "proto-dim", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub proto_dim: u64,
    /// Maximum number of update/assign passes.
    #[arg(long, default_value_t = 7)]
    pub iters: usize,
    #[arg(long, value_enum, default_value = "sample")]
    pub init: InitArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "out-prefix")]
    pub out_prefix: String,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "svbf,flagmean,flagmedian"
    )]
    pub methods: Vec<MethodArg>,
    /// Center counts: `3,4,5`, `2..15` (inclusive) or a mix of both.
    #[arg(long, value_parser = parse_centers)]
    pub centers: CenterList,
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, default_value_t = 7)]
    pub iters: usize,
    #[arg(long = "proto-dim", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub proto_dim: u64,
    #[arg(long, value_enum, default_value = "sample")]
    pub init: InitArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Fill the `seconds` column with measured wall time. Off by default so
    /// that repeated runs produce identical files.
    #[arg(long)]
    pub record_timing: bool,
    #[arg(long = "out-prefix")]
    pub out_prefix: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CenterList(pub Vec<usize>);

pub fn parse_centers(text: &str) -> Result<CenterList, String> {
    let mut out = Vec::new();
    for token in text.split(',').map(str::trim) {
        if let Some((a, b)) = token.split_once("..") {
            let a = parse_count(a)?;
            let b = parse_count(b)?;
            if a > b {
                return Err(format!("empty range {token}"));
            }
            out.extend(a..=b);
        } else {
            out.push(parse_count(token)?);
        }
    }
    let mut seen = out.clone();
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return Err("center counts must be distinct".into());
    }
    Ok(CenterList(out))
}

fn parse_count(token: &str) -> Result<usize, String> {
    match token.trim().parse::<usize>() {
        Ok(0) => Err("center counts must be positive".into()),
        Ok(v) => Ok(v),
        Err(_) => Err(format!("malformed center count {token:?}")),
    }
}
