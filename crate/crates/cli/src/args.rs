use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use partsort_core::{CorpusFormat, LengthDist};

#[derive(Debug, Parser)]
#[command(
    name = "partsort",
    version,
    about = "Partial-sort batching simulator and padding-cost reports"
)]
pub struct Cli {
    /// Seed for every randomized step of the command.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output format for tables and summaries printed to stdout.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Md)]
    pub format: OutputFormat,

    /// Output file (gen, stats, report) or directory (simulate).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Md,
    Json,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic corpus in lengths-tsv format.
    Gen(GenArgs),
    /// Print length statistics of a corpus.
    Stats(StatsArgs),
    /// Run a batching sweep over look-ahead values and seeds.
    Simulate(SimulateArgs),
    /// Merge run reports from one or more simulate output directories.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    EnKr,
    EnLu,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Start from a corpus-like parameter set; explicit flags override it.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Number of pairs.
    #[arg(long)]
    pub n: Option<usize>,
    /// Mean source length, in tokens.
    #[arg(long)]
    pub mean_src: Option<f64>,
    /// Standard deviation of the source length.
    #[arg(long)]
    pub std_src: Option<f64>,
    /// Longest allowed sentence, in tokens.
    #[arg(long)]
    pub max_len: Option<u32>,
    /// Expected |src_len - tgt_len|.
    #[arg(long)]
    pub pair_diff: Option<f64>,
    /// Length distribution family.
    #[arg(long, value_parser = parse_dist)]
    pub dist: Option<LengthDist>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub synth: SynthArgs,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    pub path: PathBuf,
    /// `lengths-tsv` (two integers per line) or `parallel-tsv` (source and target text).
    #[arg(long, default_value = "lengths-tsv", value_parser = parse_corpus_format)]
    pub input_format: CorpusFormat,
    /// Drop pairs whose source or target exceeds this many tokens.
    #[arg(long)]
    pub max_len: Option<u32>,
    /// Also write the per-length histogram as CSV.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Corpus file; a synthetic corpus is generated when absent.
    #[arg(long, conflicts_with_all = ["preset", "n", "mean_src", "std_src", "max_len", "pair_diff", "dist"])]
    pub corpus: Option<PathBuf>,
    /// `lengths-tsv` (two integers per line) or `parallel-tsv` (source and target text).
    #[arg(long, default_value = "lengths-tsv", value_parser = parse_corpus_format)]
    pub input_format: CorpusFormat,
    /// Drop pairs longer than this before batching.
    #[arg(long)]
    pub filter_max_len: Option<u32>,
    #[command(flatten)]
    pub synth: SynthArgs,
    /// Seed of the synthetic corpus.
    #[arg(long, default_value_t = 0)]
    pub corpus_seed: u64,
    /// Batch size.
    #[arg(short, long, default_value_t = 64)]
    pub m: usize,
    /// Look-ahead values; `1` is unsorted chunking, `all` sorts the whole epoch.
    #[arg(
        short,
        long,
        value_delimiter = ',',
        default_value = "1,100,250,500,all"
    )]
    pub k: Vec<KValue>,
    /// Batching seeds (defaults to 0,1,2, or to --seed when given).
    #[arg(long, value_delimiter = ',')]
    pub seeds: Vec<u64>,
    /// Epochs per run; each epoch reshuffles with a derived seed.
    #[arg(long, default_value_t = 1)]
    pub epochs: usize,
    /// Discard a final batch smaller than m.
    #[arg(long)]
    pub drop_last: bool,
    /// Largest autocorrelation lag (defaults to 2k).
    #[arg(long)]
    pub max_lag: Option<usize>,
    /// Also dump each run's padded source length series as CSV.
    #[arg(long)]
    pub series_csv: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[arg(required = true)]
    pub dirs: Vec<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KValue {
    Finite(usize),
    All,
}

impl FromStr for KValue {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "all" => Ok(KValue::All),
            "unsorted" => Ok(KValue::Finite(1)),
            other => match other.parse::<usize>() {
                Ok(0) | Err(_) => Err(format!(
                    "k must be a positive integer or `all`, got `{other}`"
                )),
                Ok(k) => Ok(KValue::Finite(k)),
            },
        }
    }
}

fn parse_corpus_format(s: &str) -> Result<CorpusFormat, String> {
    s.parse()
}

fn parse_dist(s: &str) -> Result<LengthDist, String> {
    s.parse()
}
