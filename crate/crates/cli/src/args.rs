use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "distlaw", version, about = "Experiments on random graphs with distance-decaying edge probabilities")]
pub struct Cli {
    /// Worker threads for trial loops (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Draw one graph M_n and write it as JSON.
    Sample(SampleArgs),
    /// Evaluate sentences from a file on a graph.
    Eval(EvalArgs),
    /// Estimate Prob(M_n ⊨ φ) across n with convergence diagnostics.
    Series(SeriesArgs),
    /// Classify a pair by the growth of its extension counts.
    Classify(ClassifyArgs),
    /// Closure and family scans.
    Scan(ScanArgs),
    /// Decide rank-d equivalence of two graphs.
    Ef(EfArgs),
    /// Build the addition-theorem composition table over a base.
    Amalgam(AmalgamArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileKind {
    #[value(name = "caseA")]
    #[serde(rename = "caseA")]
    CaseA,
    #[value(name = "caseB")]
    #[serde(rename = "caseB")]
    CaseB,
    Second,
    Custom,
    Sparsified,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ProfileArgs {
    #[arg(long, value_enum, default_value = "caseA")]
    pub profile: ProfileKind,
    /// Decay exponent for caseA, caseB and second.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Probabilities for custom (p_1, p_2, ...) or sparsified profiles.
    #[arg(long, value_delimiter = ',')]
    pub probs: Vec<f64>,
    /// Distances carrying the sparsified probabilities.
    #[arg(long, value_delimiter = ',')]
    pub indices: Vec<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct GridArgs {
    /// Comma-separated sizes n.
    #[arg(long, value_delimiter = ',', required = true)]
    pub ngrid: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SampleArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: u64,
    /// Output directory; the graph is written to `sample.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EvalArgs {
    /// Graph file (JSON or edge list) or a builtin `complete:N`, `path:N`,
    /// `empty:N`.
    #[arg(long)]
    pub graph: String,
    /// One sentence per line; `#` starts a comment.
    #[arg(long)]
    pub formula_file: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BuiltinPair {
    /// Triangle over an edge.
    CommonNeighbor,
    /// One vertex over nothing.
    Vertex,
    /// An edge over nothing.
    Edge,
    /// An edge over one endpoint.
    Pendant,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct PairArgs {
    #[arg(long, value_enum, conflicts_with = "pair_file")]
    pub pair: Option<BuiltinPair>,
    /// JSON `{"graph": {...}, "a": [..]}`.
    #[arg(long)]
    pub pair_file: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SeriesArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// File holding exactly one sentence.
    #[arg(long, required_unless_present = "formula", conflicts_with = "formula")]
    pub formula_file: Option<PathBuf>,
    /// The sentence itself.
    #[arg(long)]
    pub formula: Option<String>,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Growth function for the windowed gap: power, log or scaled:<c>.
    #[arg(long, default_value = "power")]
    pub growth: String,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.05)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.5)]
    pub window_eps: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub pair: PairArgs,
    /// stratified:<k>, random:<k>, grid:<k> or exhaustive.
    #[arg(long, default_value = "stratified:32")]
    pub placement: String,
    #[arg(long, default_value = "power")]
    pub growth: String,
    #[arg(long, default_value_t = 0.15)]
    pub eps_lo: f64,
    #[arg(long, default_value_t = 0.3)]
    pub eps_hi: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanKind {
    /// Sizes of cl^{k,m} of consecutive blocks.
    Closure,
    /// Isomorphism types of cl^{k,m}(∅).
    Empty,
    /// Greedy disjoint extension families.
    Nice,
    /// Local relations s_m and i_{k,m} of a pair.
    Local,
    /// Simply-good conditions of a configuration at one n.
    Good,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    pub kind: ScanKind,
    #[command(flatten)]
    pub profile: ProfileArgs,
    #[arg(long, value_delimiter = ',')]
    pub ngrid: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Catalog JSON file, or `common-neighbor`.
    #[arg(long)]
    pub catalog: Option<String>,
    /// Use the saturated reading of the catalog.
    #[arg(long)]
    pub normalize: bool,
    #[arg(short, long, default_value_t = 3)]
    pub k: usize,
    #[arg(short, long, default_value_t = 1)]
    pub m: usize,
    /// Size of the base block for closure scans.
    #[arg(long, default_value_t = 2)]
    pub l: usize,
    /// Exponent of the n^eps size bound for closure scans.
    #[arg(long, default_value_t = 0.5)]
    pub eps: f64,
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long, default_value = "stratified:32")]
    pub placement: String,
    /// JSON `{"graph": {...}, "b": [..], "b0": [..], "b1": [..]}`.
    #[arg(long)]
    pub good_file: Option<PathBuf>,
    /// Size for the good scan.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct EfArgs {
    /// First graph (file or builtin, as for eval).
    #[arg(long)]
    pub left: String,
    #[arg(long)]
    pub right: String,
    #[arg(long)]
    pub depth: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct AmalgamArgs {
    /// Base graph N0 (file or builtin).
    #[arg(long)]
    pub base: String,
    #[arg(long, default_value_t = 2)]
    pub depth: usize,
    /// Largest side size enumerated.
    #[arg(long, default_value_t = 3)]
    pub max_side: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
