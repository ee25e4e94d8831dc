use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod manifest;

use config::PipelineConfig;

/// A usage or content problem with the inputs (exit code 1).
#[derive(Debug)]
pub struct ValidationError(pub String);

impl fmt::Display for ValidationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ValidationError {}

#[derive(Parser, Debug)]
#[command(
    name = "ci-extractor",
    version,
    about = "Extract contextual-integrity flow parameters from privacy-policy statements"
)]
pub struct Cli {
    /// Pipeline configuration (TOML); flags override its values.
    #[arg(long, global = true, env = "CI_EXTRACTOR_CONFIG")]
    pub config: Option<PathBuf>,

    /// More log output (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Read segment files and write sentence-level statements.
    Ingest(IngestArgs),
    /// Split plain text into sentences, one per line.
    Split(SplitArgs),
    /// Train a trigram tagger on CoNLL-2003 data.
    HmmTrain(HmmTrainArgs),
    /// Tag CoNLL-2003 sentences with a trained model.
    HmmTag(HmmTagArgs),
    /// Grid-search the interpolation weights.
    HmmTune(HmmTuneArgs),
    /// Map dependency trees to CI parameters.
    DpMap(DpMapArgs),
    /// Map SRL frames of tracked verbs to CI parameters.
    SrlMap(SrlMapArgs),
    /// SRL mapping with redundant verbs filtered out.
    CiSrl(CiSrlArgs),
    /// Score predictions against gold.
    Score(ScoreArgs),
    /// Write score tables, tag distributions, histogram and summary.
    Report(ReportArgs),
    /// Run every stage from a configuration file.
    Pipeline(PipelineArgs),
}

#[derive(Args, Debug)]
pub struct SplitOpts {
    /// Treat a colon followed by whitespace as a sentence boundary.
    #[arg(long)]
    pub split_on_colon: bool,
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    /// Directory of segment JSON-lines files.
    #[arg(long)]
    pub segments: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Allowed segment label (repeatable); replaces the configured list.
    #[arg(long = "allowed-label")]
    pub allowed_labels: Vec<String>,
    #[command(flatten)]
    pub split: SplitOpts,
    /// Gold annotations for corpus statistics.
    #[arg(long)]
    pub gold: Option<PathBuf>,
    /// Where to write corpus statistics (JSON); needs --gold.
    #[arg(long, requires = "gold")]
    pub stats_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SplitArgs {
    /// Text file; standard input when absent.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print space-separated tokens instead of sentence text.
    #[arg(long)]
    pub tokens: bool,
    #[command(flatten)]
    pub split: SplitOpts,
}

#[derive(Args, Debug)]
pub struct LambdaOpts {
    #[arg(long)]
    pub lambda1: Option<f64>,
    #[arg(long)]
    pub lambda2: Option<f64>,
}

#[derive(Args, Debug)]
pub struct HmmTrainArgs {
    #[arg(long)]
    pub train: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub lambdas: LambdaOpts,
}

#[derive(Args, Debug)]
pub struct HmmTagArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// CoNLL-2003 file; its tag column is ignored.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the tags as span annotations (JSON-lines).
    #[arg(long)]
    pub annotations_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct HmmTuneArgs {
    #[arg(long)]
    pub train: Option<PathBuf>,
    /// Held-out data; without it a seeded 80/20 split of --train is used.
    #[arg(long)]
    pub validation: Option<PathBuf>,
    #[arg(long)]
    pub grid_step: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tuned weights (JSON).
    #[arg(long)]
    pub out: PathBuf,
    /// Also write a model trained on all of --train with the tuned weights.
    #[arg(long)]
    pub model_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DpMapArgs {
    #[arg(long)]
    pub trees: Option<PathBuf>,
    /// Statements to check tree tokens against.
    #[arg(long)]
    pub statements: Option<PathBuf>,
    #[arg(long)]
    pub dp_rules: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SrlMapArgs {
    #[arg(long)]
    pub frames: Option<PathBuf>,
    /// Statements to annotate; those without frames come out unprocessed.
    #[arg(long)]
    pub statements: Option<PathBuf>,
    #[arg(long)]
    pub verb_lexicon: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ContainmentArg {
    SinglePass,
    Fixpoint,
}

#[derive(Args, Debug)]
pub struct CiSrlArgs {
    #[command(flatten)]
    pub map: SrlMapArgs,
    #[arg(long, value_enum)]
    pub containment: Option<ContainmentArg>,
    /// Per-statement filter decisions (JSON-lines).
    #[arg(long)]
    pub emit_refinement_report: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    PhraseMacro,
    WordLevel,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum CriterionArg {
    Overlap,
    Exact,
}

#[derive(Args, Debug)]
pub struct MatchOpts {
    #[arg(long = "match", value_enum)]
    pub criterion: Option<CriterionArg>,
    #[arg(long)]
    pub overlap_threshold: Option<f64>,
    /// Score only gold statements marked valid.
    #[arg(long)]
    pub valid_only: bool,
}

#[derive(Args, Debug)]
pub struct ScoreArgs {
    /// Predictions: annotations (phrase-macro) or CoNLL-2003 (word-level).
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub gold: PathBuf,
    #[arg(long, value_enum, default_value = "phrase-macro")]
    pub mode: ModeArg,
    #[command(flatten)]
    pub matching: MatchOpts,
    /// Score table (CSV).
    #[arg(long)]
    pub out: PathBuf,
    /// Per-source-tag match percentages (CSV, phrase-macro only).
    #[arg(long)]
    pub tag_dist_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Annotation files, one per method (repeatable).
    #[arg(long, required = true)]
    pub pred: Vec<PathBuf>,
    #[arg(long)]
    pub gold: Option<PathBuf>,
    /// Statements, for grouping by policy.
    #[arg(long)]
    pub statements: PathBuf,
    /// Tagger output and gold tags (CoNLL-2003) for a word-level table.
    #[arg(long, num_args = 2, value_names = ["PRED", "GOLD"])]
    pub word_level: Option<Vec<PathBuf>>,
    #[command(flatten)]
    pub matching: MatchOpts,
    /// Histogram bin edges, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub bins: Option<Vec<f64>>,
    #[arg(long)]
    pub histogram_method: Option<String>,
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Args, Debug)]
pub struct PipelineArgs {
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<ValidationError>().is_some() {
            return 1;
        }
        if let Some(e) = cause.downcast_ref::<ci_extractor::Error>() {
            return if e.is_io() { 2 } else { 1 };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 2;
        }
    }
    1
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();

    let result = cli
        .config
        .as_deref()
        .map(PipelineConfig::load)
        .transpose()
        .and_then(|cfg| commands::run(cli.command, cfg.unwrap_or_default(), cli.config.is_some()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(exit_code(&e))
        }
    }
}
