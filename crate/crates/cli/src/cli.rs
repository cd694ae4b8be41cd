use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "bwmd",
    version,
    about = "Burrows-Wheeler sequence similarity toolkit"
)]
pub struct Cli {
    /// Worker threads; 1 runs everything serially. Defaults to all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Embed a corpus and write the embedding cache plus manifests.
    Embed(EmbedArgs),
    /// Write the full pairwise distance matrix as CSV.
    Dist(DistArgs),
    /// Hierarchical or k-means clustering, scored against labels if given.
    Cluster(ClusterArgs),
    /// Nearest-neighbor search and k-NN classification.
    Knn(KnnArgs),
    /// Desk-scale experiments.
    Experiment(ExperimentArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphabetArg {
    Dna,
    Bytes,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum AmbiguityArg {
    Drop,
    MapToA,
    Error,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricArg {
    Bwmd,
    Ebwt,
    Lzjd,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinkageArg {
    Single,
    Average,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodArg {
    Hierarchical,
    Kmeans,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexArg {
    Brute,
    Vp,
    Proj,
}

/// Where a corpus comes from and how to read it.
#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// FASTA file (dna) or directory of files (bytes).
    pub input: PathBuf,

    /// Defaults to dna for a file and bytes for a directory.
    #[arg(long, value_enum)]
    pub alphabet: Option<AlphabetArg>,

    /// FASTA residues other than A, C, G, T.
    #[arg(long, value_enum, default_value = "drop")]
    pub ambiguous: AmbiguityArg,

    /// CSV of `filename,label` rows.
    #[arg(long)]
    pub labels: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct MetricArgs {
    #[arg(long, value_enum, default_value = "bwmd")]
    pub metric: MetricArg,

    /// Divide EBWT by |u| + |v| - 2.
    #[arg(long)]
    pub normalize: bool,

    /// Estimate LZJD with bottom-k sketches of this size.
    #[arg(long)]
    pub sketch: Option<usize>,
}

#[derive(Args, Debug)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,

    /// Leave out sequences too short to embed instead of failing.
    #[arg(long)]
    pub skip_degenerate: bool,
}

#[derive(Args, Debug)]
pub struct DistArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[command(flatten)]
    pub metric: MetricArgs,

    /// Output CSV file.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ClusterArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[command(flatten)]
    pub metric: MetricArgs,

    #[arg(long, value_enum, default_value = "hierarchical")]
    pub method: MethodArg,

    #[arg(long, value_enum, default_value = "single")]
    pub linkage: LinkageArg,

    /// Number of flat clusters.
    #[arg(long, conflicts_with = "k_per_class")]
    pub k: Option<usize>,

    /// Flat clusters as a multiple of the number of label classes.
    #[arg(long)]
    pub k_per_class: Option<usize>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Dataset name recorded in metrics.csv. Defaults to the input file name.
    #[arg(long)]
    pub dataset: Option<String>,

    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct KnnArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Query corpus, read with the same alphabet. Defaults to leave-one-out
    /// over the input corpus.
    #[arg(long)]
    pub queries: Option<PathBuf>,

    #[command(flatten)]
    pub metric: MetricArgs,

    #[arg(long, value_enum, default_value = "brute")]
    pub index: IndexArg,

    #[arg(long, default_value_t = 9)]
    pub k: usize,

    /// Projection directions for the projection index.
    #[arg(long, default_value_t = 8)]
    pub m: usize,

    /// Candidate multiplier for the projection index.
    #[arg(long, default_value_t = 16)]
    pub c: usize,

    /// Label whose neighbor fraction is reported as the score.
    #[arg(long)]
    pub positive: Option<String>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ExperimentArgs {
    #[command(subcommand)]
    pub kind: ExperimentKind,
}

#[derive(Subcommand, Debug)]
pub enum ExperimentKind {
    /// Uniform sequence against sequences of decreasing entropy.
    EntropySweep {
        #[arg(long, default_value_t = 100_000)]
        length: usize,
        /// Comma-separated normalized entropies.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0"
        )]
        targets: Vec<f64>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 32)]
        alphabet_size: u32,
        #[arg(long)]
        sketch: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Distances between uniform random sequences over a grid of lengths.
    RandomGrid {
        /// Comma-separated sequence lengths.
        #[arg(long, value_delimiter = ',', default_value = "100,1000,10000,100000")]
        lengths: Vec<usize>,
        #[arg(long, default_value_t = 30)]
        trials: usize,
        #[arg(long, default_value_t = 32)]
        alphabet_size: u32,
        #[arg(long)]
        sketch: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Randomized property checks; writes a JSON report.
    Theorems {
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        #[arg(long, default_value_t = 500)]
        max_len: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}
