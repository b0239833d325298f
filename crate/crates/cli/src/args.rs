use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "segeval",
    version,
    about = "Score automatic lesion borders against several manual borders"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a manifest and every file it references.
    Validate(ValidateArgs),
    /// Per-rater confusion measures and the probabilistic-border error.
    Evaluate(EvaluateArgs),
    /// Probabilistic Rand index, expected index and normalized index.
    Npri(NpriArgs),
    /// Render a border annotation into a PGM mask.
    RenderBorder(RenderArgs),
    /// Write a deterministic synthetic corpus.
    DemoCorpus(DemoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StddevArg {
    Sample,
    Population,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExpectedIndexArg {
    /// One expected index over the whole corpus; all images must share dimensions.
    Shared,
    /// One expected index per group of same-sized images.
    PerDims,
}

#[derive(Debug, Clone, Args)]
pub struct SplineArgs {
    /// Spline samples per control point when rendering annotations.
    #[arg(long, default_value_t = segeval::border::DEFAULT_SAMPLES_PER_SEGMENT)]
    pub spline_samples: usize,
    /// Make rendered borders pass through the clicked points.
    #[arg(long)]
    pub interpolate_spline: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SelectionArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Comma-separated method ids (default: all).
    #[arg(long, value_delimiter = ',')]
    pub methods: Vec<String>,
    /// Comma-separated rater ids (default: all).
    #[arg(long, value_delimiter = ',')]
    pub raters: Vec<String>,
    /// Output directory. Tables and per-image detail go to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = StddevArg::Sample)]
    pub stddev: StddevArg,
    /// Worker threads (0 = one per core).
    #[arg(long, env = "SEGEVAL_JOBS", default_value_t = 0)]
    pub jobs: usize,
    /// Print aligned text tables instead of CSV on stdout.
    #[arg(long)]
    pub text: bool,
    #[command(flatten)]
    pub spline: SplineArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, value_enum, default_value_t = ExpectedIndexArg::Shared)]
    pub expected_index: ExpectedIndexArg,
    #[command(flatten)]
    pub spline: SplineArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub selection: SelectionArgs,
    /// Comma-separated measures: xor, sensitivity, specificity, precision,
    /// recall, error_probability, guillod.
    #[arg(long, value_delimiter = ',', default_value = "xor")]
    pub measures: Vec<String>,
    /// Count the automatic border as one more observation in the
    /// probability image.
    #[arg(long)]
    pub guillod_include_test: bool,
}

#[derive(Debug, Clone, Args)]
pub struct NpriArgs {
    #[command(flatten)]
    pub selection: SelectionArgs,
    #[arg(long, value_enum, default_value_t = ExpectedIndexArg::Shared)]
    pub expected_index: ExpectedIndexArg,
}

#[derive(Debug, Clone, Args)]
pub struct RenderArgs {
    pub annotation: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub spline: SplineArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DemoArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 6)]
    pub images: usize,
    #[arg(long, default_value_t = 2)]
    pub melanoma: usize,
    #[arg(long, default_value_t = 768)]
    pub width: u32,
    #[arg(long, default_value_t = 512)]
    pub height: u32,
    #[arg(long, default_value_t = 2009)]
    pub seed: u64,
}
