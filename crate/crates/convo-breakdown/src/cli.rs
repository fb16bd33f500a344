//! Command-line front end: generate, detect, report, compare, model-check.
//!
//! Exit codes: 0 success; 1 breakdowns found (only with
//! `--fail-on-breakdown`); 2 usage or config error; 3 I/O error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::analysis::{
    aggregate_patterns, attribution_counts, compare_iterations, format_iteration_stats,
    render_report, ReportFormat,
};
use crate::corpus::{load_corpus, parse_findings, serialize_findings, write_corpus_dir, CorpusError};
use crate::detectors::{run_detectors, DetectorConfig};
use crate::dialogue::IntentLabel;
use crate::manifest::RunManifest;
use crate::model::{default_model, load_model, InteractionModel, DEFAULT_MODEL_JSON};
use crate::sim::{generate_corpus, load_preset, parse_profile, GenerationProfile};

/// Environment variable overriding the bundled default interaction model.
pub const MODEL_ENV_VAR: &str = "CONVO_BREAKDOWN_MODEL";

pub const EXIT_OK: i32 = 0;
pub const EXIT_BREAKDOWN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) => EXIT_IO,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) => m,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Corpus load problems are config errors naming the file; plain I/O
/// failures (missing files, permissions) map to the I/O exit code.
fn corpus_err(e: CorpusError) -> CliError {
    match e {
        CorpusError::Io { .. } => CliError::Io(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

fn write_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

#[derive(Parser)]
#[command(
    name = "convo-breakdown",
    version,
    about = "Detect and characterize conversational breakdowns in recommender dialogues"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a corpus of simulated conversations
    Generate(GenerateArgs),
    /// Run the three breakdown detectors over a corpus
    Detect(DetectArgs),
    /// Render findings as a pattern-count report
    Report(ReportArgs),
    /// Compare conversational paths across two corpora
    Compare(CompareArgs),
    /// Validate an interaction model, optionally checking one path
    ModelCheck(ModelCheckArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Number of conversations to generate
    #[arg(long)]
    n: usize,
    /// Base seed; dialogue i uses seed + i
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bundled preset name (iteration-1 .. iteration-6) or a profile file
    #[arg(long)]
    profile: String,
    /// Interaction model file (defaults to the bundled model)
    #[arg(long)]
    model: Option<PathBuf>,
    /// Output directory for transcripts and the run manifest
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DetectArgs {
    /// Corpus: a directory of transcripts or a single corpus document
    #[arg(long = "in")]
    input: PathBuf,
    /// Interaction model file (defaults to the bundled model)
    #[arg(long)]
    model: Option<PathBuf>,
    /// Dialogue-of-the-deaf window size
    #[arg(long)]
    window: Option<usize>,
    /// Minimum text similarity within a window
    #[arg(long)]
    similarity_threshold: Option<f64>,
    /// Findings output file (defaults to stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Exit 1 if any breakdown is found (CI usage)
    #[arg(long)]
    fail_on_breakdown: bool,
}

#[derive(Args)]
struct ReportArgs {
    /// Findings document produced by `detect`
    #[arg(long)]
    findings: PathBuf,
    /// table-text, csv, or structured
    #[arg(long, default_value = "table-text")]
    format: String,
    /// Output file (defaults to stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    /// Previous iteration's corpus; omit for first-iteration semantics
    #[arg(long)]
    prev: Option<PathBuf>,
    /// Current iteration's corpus
    #[arg(long)]
    cur: PathBuf,
}

#[derive(Args)]
struct ModelCheckArgs {
    /// Interaction model file (defaults to the bundled model)
    #[arg(long)]
    model: Option<PathBuf>,
    /// Comma-separated intent path to check, e.g. "A_WELCOME,U_REVEAL"
    #[arg(long)]
    path: Option<String>,
}

/// Loads the interaction model from the flag, the `CONVO_BREAKDOWN_MODEL`
/// environment variable, or the bundled default, in that order. Returns the
/// model together with its source text for manifest digests.
fn resolve_model(flag: &Option<PathBuf>) -> Result<(InteractionModel, String), CliError> {
    let path = flag
        .clone()
        .or_else(|| std::env::var_os(MODEL_ENV_VAR).map(PathBuf::from));
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(&p)
                .map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
            let model = load_model(&text).map_err(usage)?;
            Ok((model, text))
        }
        None => Ok((default_model(), DEFAULT_MODEL_JSON.to_string())),
    }
}

fn resolve_profile(spec: &str) -> Result<(GenerationProfile, String), CliError> {
    if let Ok(profile) = load_preset(spec) {
        let text = serde_json::to_string_pretty(&profile).expect("profile serialization");
        return Ok((profile, text));
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(CliError::Usage(format!(
            "`{spec}` is neither a bundled preset nor a profile file"
        )));
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let profile = parse_profile(&text).map_err(usage)?;
    Ok((profile, text))
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content).map_err(|e| write_err(path, e)),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_generate(args: &GenerateArgs) -> Result<i32, CliError> {
    if args.n < 1 {
        return Err(CliError::Usage("--n must be at least 1".to_string()));
    }
    let (model, model_text) = resolve_model(&args.model)?;
    let (profile, profile_text) = resolve_profile(&args.profile)?;
    let catalog = crate::sim::default_catalog();
    let corpus = generate_corpus(args.n, &profile, &model, &catalog, args.seed).map_err(usage)?;
    write_corpus_dir(&args.out, &corpus).map_err(corpus_err)?;

    let mut manifest = RunManifest::new("generate", args.seed);
    manifest.add_config("profile", &profile_text);
    manifest.add_config("model", &model_text);
    manifest.outputs.push(args.out.display().to_string());
    let manifest_path = args.out.join("manifest.json");
    std::fs::write(&manifest_path, manifest.serialize())
        .map_err(|e| write_err(&manifest_path, e))?;
    eprintln!("wrote {} transcripts to {}", corpus.len(), args.out.display());
    Ok(EXIT_OK)
}

fn cmd_detect(args: &DetectArgs) -> Result<i32, CliError> {
    let (model, _) = resolve_model(&args.model)?;
    let mut cfg = DetectorConfig::default();
    if let Some(w) = args.window {
        cfg.dod_window = w;
    }
    if let Some(t) = args.similarity_threshold {
        cfg.text_similarity_threshold = t;
    }
    cfg.validate().map_err(CliError::Usage)?;
    let corpus = load_corpus(&args.input).map_err(corpus_err)?;
    let findings = run_detectors(&corpus, &model, &cfg);

    let mut flagged = std::collections::BTreeMap::new();
    for f in &findings {
        *flagged.entry(f.detector.code()).or_insert(0usize) += usize::from(f.flagged());
    }
    for code in ["B1", "B2", "B3"] {
        eprintln!("{code} flagged: {}", flagged.get(code).copied().unwrap_or(0));
    }
    emit(&args.out, &serialize_findings(&findings))?;

    let any = findings.iter().any(|f| f.flagged());
    if args.fail_on_breakdown && any {
        return Ok(EXIT_BREAKDOWN);
    }
    Ok(EXIT_OK)
}

fn cmd_report(args: &ReportArgs) -> Result<i32, CliError> {
    let format: ReportFormat = args.format.parse().map_err(CliError::Usage)?;
    let text = std::fs::read_to_string(&args.findings)
        .map_err(|e| write_err(&args.findings, e))?;
    let findings = parse_findings(&text).map_err(usage)?;
    let summaries = aggregate_patterns(&findings);
    let attributions = attribution_counts(&findings, &crate::analysis::KindRegistry::default());
    let rendered = render_report(&summaries, &attributions, None, format);
    emit(&args.out, &rendered)?;
    Ok(EXIT_OK)
}

fn cmd_compare(args: &CompareArgs) -> Result<i32, CliError> {
    let prev = match &args.prev {
        Some(p) => load_corpus(p).map_err(corpus_err)?,
        None => Vec::new(),
    };
    let cur = load_corpus(&args.cur).map_err(corpus_err)?;
    let stats = compare_iterations(&prev, &cur).map_err(usage)?;
    print!("{}", format_iteration_stats(&stats));
    Ok(EXIT_OK)
}

fn cmd_model_check(args: &ModelCheckArgs) -> Result<i32, CliError> {
    let (model, _) = resolve_model(&args.model)?;
    println!(
        "model `{}` version {}: {} nodes, {} edges",
        model.name,
        model.version,
        model.nodes().count(),
        model.edges().count()
    );
    if let Some(spec) = &args.path {
        let labels: Result<Vec<IntentLabel>, _> = spec
            .split(',')
            .map(|s| IntentLabel::parse(s.trim()))
            .collect();
        let labels = labels.map_err(usage)?;
        let verdict = model.is_valid_path(&labels);
        if verdict.valid {
            println!("valid");
        } else {
            println!("invalid at index {}", verdict.violation_index.unwrap());
        }
    }
    Ok(EXIT_OK)
}

/// Parses argv and runs one command, returning the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version requests are successful exits; real parse errors
            // are usage errors.
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Detect(args) => cmd_detect(args),
        Command::Report(args) => cmd_report(args),
        Command::Compare(args) => cmd_compare(args),
        Command::ModelCheck(args) => cmd_model_check(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}
