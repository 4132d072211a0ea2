//! The `ara` command-line front end. A thin shell over [`crate::runner`],
//! [`crate::translator`] and [`crate::generate`].

use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::backend::BackendError;
use crate::config::{BackendSpec, ConfigError, RunConfig, TranslatorSpec};
use crate::generate::{generate_episodes, GenerateOptions};
use crate::runner::{
    build_backend, parse_subsets, rerender_report, run_ablation, run_benchmark, write_ablation_dir, write_run_dir,
    RunContext, RunError,
};
use crate::translator::{
    bypass, desk_translate, translate, PrincipleSet, PromptAssets, PromptTemplate, TranslateOptions, TranslatorError,
};
use crate::types::{parse_episode_file, write_episode_file, Episode, Instruction};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_BACKEND: i32 = 3;
pub const EXIT_REPLAY_MISS: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "ara", version, about = "Instruction translation and navigation benchmark harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Translate one instruction and print the reasoning and the translation.
    Translate(TranslateArgs),
    /// Run the benchmark over an episode file.
    Run(RunArgs),
    /// Run a principle ablation: baseline, each subset, then the full set.
    Ablate(AblateArgs),
    /// Write a seeded synthetic episode file.
    Generate(GenerateArgs),
    /// Re-render report.csv and report.txt from a run's results.jsonl.
    Report(ReportArgs),
}

#[derive(Debug, Args, Clone)]
pub struct ConfigArgs {
    /// JSON config file layered over the built-in defaults.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Dotted-key override, e.g. `--set kinematics.success_radius=2.5`.
    /// Repeatable; applied after the config file.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Print the effective configuration as JSON and exit.
    #[arg(long)]
    pub show_config: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendKind {
    Http,
    Replay,
    Record,
}

#[derive(Debug, Args)]
pub struct TranslateArgs {
    /// Instruction text (or use --file).
    pub text: Option<String>,
    /// Read the instruction from a file.
    #[arg(long, value_name = "PATH", conflicts_with = "text")]
    pub file: Option<PathBuf>,
    /// Use the offline rule-based translator.
    #[arg(long, conflicts_with = "backend")]
    pub desk: bool,
    /// Use the prompted model through this backend.
    #[arg(long, value_enum)]
    pub backend: Option<BackendKind>,
    /// Record file read by `--backend replay` or appended by `--backend record`.
    #[arg(long, value_name = "PATH")]
    pub record: Option<PathBuf>,
    /// Principle set: `all`, `none`, or comma-separated ids.
    #[arg(long, value_name = "SET")]
    pub principles: Option<String>,
    /// Model id placed in requests.
    #[arg(long)]
    pub model: Option<String>,
    /// Emit JSON instead of labeled sections.
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub cfg: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Episode file (`{"episodes": [...]}`).
    #[arg(long, value_name = "PATH")]
    pub episodes: PathBuf,
    /// Root directory for run outputs.
    #[arg(long, value_name = "DIR", default_value = "runs")]
    pub runs_dir: PathBuf,
    #[command(flatten)]
    pub cfg: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[arg(long, value_name = "PATH")]
    pub episodes: PathBuf,
    #[arg(long, value_name = "DIR", default_value = "runs")]
    pub runs_dir: PathBuf,
    /// Comma-separated subsets: `singletons`, `full`, `none`, or ids joined by `+`.
    #[arg(long, default_value = "singletons,full")]
    pub subsets: String,
    #[command(flatten)]
    pub cfg: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output file; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub cfg: ConfigArgs,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Run directory containing results.jsonl.
    pub run_dir: PathBuf,
}

/// A failure with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn config(e: impl std::fmt::Display) -> Self {
        CliError {
            code: EXIT_CONFIG,
            message: e.to_string(),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::config(e)
    }
}

impl From<RunError> for CliError {
    fn from(e: RunError) -> Self {
        CliError::config(e)
    }
}

impl From<TranslatorError> for CliError {
    fn from(e: TranslatorError) -> Self {
        let code = match &e {
            TranslatorError::Parse { .. } => EXIT_PARSE,
            TranslatorError::Backend(BackendError::ReplayMiss { .. }) => EXIT_REPLAY_MISS,
            TranslatorError::Backend(_) => EXIT_BACKEND,
            TranslatorError::Config(_) | TranslatorError::NotOriginal => EXIT_CONFIG,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

/// Parses the process arguments, runs, and returns the exit code.
pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    match execute(cli, &mut stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

/// Runs a parsed invocation, writing normal output to `out`.
pub fn execute(cli: Cli, out: &mut dyn std::io::Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Translate(a) => cmd_translate(a, out),
        Command::Run(a) => cmd_run(a, out),
        Command::Ablate(a) => cmd_ablate(a, out),
        Command::Generate(a) => cmd_generate(a, out),
        Command::Report(a) => cmd_report(a, out),
    }
}

fn emit(out: &mut dyn std::io::Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(CliError::config)
}

fn load_config(cfg: &ConfigArgs) -> Result<RunConfig, CliError> {
    Ok(RunConfig::load(cfg.config.as_deref(), &cfg.overrides)?)
}

fn show_config(config: &RunConfig, out: &mut dyn std::io::Write) -> Result<i32, CliError> {
    let text = serde_json::to_string_pretty(config).expect("config serializes");
    emit(out, &format!("{text}\n"))?;
    Ok(EXIT_OK)
}

fn read_episodes(path: &Path) -> Result<Vec<Episode>, CliError> {
    let bytes =
        std::fs::read(path).map_err(|e| CliError::config(format!("reading {}: {e}", path.display())))?;
    parse_episode_file(&bytes).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

fn cmd_translate(a: TranslateArgs, out: &mut dyn std::io::Write) -> Result<i32, CliError> {
    let mut config = load_config(&a.cfg)?;
    if let Some(kind) = a.backend {
        let http = match &config.backend {
            BackendSpec::Http { http } | BackendSpec::Record { http, .. } => http.clone(),
            BackendSpec::Replay { .. } => Default::default(),
        };
        config.backend = match (kind, a.record.clone()) {
            (BackendKind::Http, _) => BackendSpec::Http { http },
            (BackendKind::Replay, Some(path)) => BackendSpec::Replay { path },
            (BackendKind::Record, Some(path)) => BackendSpec::Record { path, http },
            (_, None) => return Err(CliError::config("--backend replay/record needs --record PATH")),
        };
    }
    if let Some(m) = &a.model {
        config.model_id = m.clone();
    }
    let principles = match &a.principles {
        Some(spec) => PrincipleSet::parse(spec)?,
        None => config.translator.principles().cloned().unwrap_or_else(PrincipleSet::all),
    };
    let use_llm = a.backend.is_some() || (!a.desk && matches!(config.translator, TranslatorSpec::Llm { .. }));
    config.translator = if use_llm {
        match &config.translator {
            TranslatorSpec::Llm { .. } => config.translator.with_principles(principles.clone()),
            _ => TranslatorSpec::Llm {
                principles: principles.clone(),
                reasks: 1,
                max_tokens: 1024,
            },
        }
    } else {
        TranslatorSpec::Desk {
            principles: principles.clone(),
        }
    };
    if a.cfg.show_config {
        return show_config(&config, out);
    }

    let text = match (&a.text, &a.file) {
        (Some(t), _) => t.clone(),
        (None, Some(p)) => {
            std::fs::read_to_string(p).map_err(|e| CliError::config(format!("reading {}: {e}", p.display())))?
        }
        (None, None) => return Err(CliError::config("give an instruction or --file PATH")),
    };
    let original = Instruction::original(text.trim_end_matches(['\n', '\r'])).map_err(CliError::config)?;

    let (reasoning, translated) = if principles.is_empty() {
        let b = bypass(&original);
        (String::new(), b.text().to_string())
    } else if let TranslatorSpec::Llm { reasks, max_tokens, .. } = &config.translator {
        let backend = build_backend(&config.backend)?;
        let template = PromptTemplate::from_assets(&PromptAssets::defaults(), &principles);
        let opts = TranslateOptions {
            model_id: config.model_id.clone(),
            decoding: crate::backend::Decoding {
                temperature: 0.0,
                max_tokens: *max_tokens,
            },
            reasks: *reasks,
        };
        let t = translate(&original, &template, backend.as_ref(), &opts)?;
        (t.reasoning, t.translated.text().to_string())
    } else {
        let t = desk_translate(&original, &principles);
        (t.reasoning, t.translated.text().to_string())
    };

    if a.json {
        let doc = json!({
            "original": original.text(),
            "principles": principles,
            "translator": config.translator.label(),
            "reasoning": reasoning,
            "translation": translated,
        });
        emit(out, &format!("{}\n", serde_json::to_string_pretty(&doc).expect("json")))?;
    } else {
        emit(out, &format!("REASONING:\n{reasoning}\n\nTRANSLATION:\n{translated}\n"))?;
    }
    Ok(EXIT_OK)
}

fn run_status(replay_miss: bool, aborted: usize) -> i32 {
    if replay_miss {
        eprintln!("error: replay miss; see aborted.jsonl for the key diff");
        EXIT_REPLAY_MISS
    } else {
        if aborted > 0 {
            eprintln!("warning: {aborted} episode(s) aborted and were excluded from the metrics");
        }
        EXIT_OK
    }
}

fn cmd_run(a: RunArgs, out: &mut dyn std::io::Write) -> Result<i32, CliError> {
    let config = load_config(&a.cfg)?;
    if a.cfg.show_config {
        return show_config(&config, out);
    }
    let episodes = read_episodes(&a.episodes)?;
    let ctx = RunContext::from_config(&config)?;
    let result = run_benchmark(&episodes, &config, &ctx)?;
    let dir = write_run_dir(&a.runs_dir, &result)?;
    let report = std::fs::read_to_string(dir.join("report.txt")).map_err(CliError::config)?;
    emit(out, &report)?;
    emit(out, &format!("run directory: {}\n", dir.display()))?;
    Ok(run_status(result.has_replay_miss(), result.aborted.len()))
}

fn cmd_ablate(a: AblateArgs, out: &mut dyn std::io::Write) -> Result<i32, CliError> {
    let mut config = load_config(&a.cfg)?;
    if matches!(config.translator, TranslatorSpec::None) {
        config.translator = TranslatorSpec::Desk {
            principles: PrincipleSet::all(),
        };
    }
    if a.cfg.show_config {
        return show_config(&config, out);
    }
    let subsets = parse_subsets(&a.subsets)?;
    let episodes = read_episodes(&a.episodes)?;
    let ctx = RunContext::from_config(&config)?;
    let result = run_ablation(&episodes, &config, &subsets, &ctx)?;
    let dir = write_ablation_dir(&a.runs_dir, &result)?;
    let table = std::fs::read_to_string(dir.join("ablation.txt")).map_err(CliError::config)?;
    emit(out, &table)?;
    emit(out, &format!("ablation directory: {}\n", dir.display()))?;
    let miss = result.runs.iter().any(|r| r.has_replay_miss());
    let aborted = result.runs.iter().map(|r| r.aborted.len()).sum();
    Ok(run_status(miss, aborted))
}

fn cmd_generate(a: GenerateArgs, out: &mut dyn std::io::Write) -> Result<i32, CliError> {
    let config = load_config(&a.cfg)?;
    if a.cfg.show_config {
        return show_config(&config, out);
    }
    let episodes = generate_episodes(&GenerateOptions {
        n: a.n,
        seed: a.seed,
        kinematics: config.kinematics,
    });
    let bytes = write_episode_file(&episodes);
    match &a.out {
        Some(path) => {
            std::fs::write(path, &bytes).map_err(|e| CliError::config(format!("writing {}: {e}", path.display())))?
        }
        None => out.write_all(&bytes).map_err(CliError::config)?,
    }
    Ok(EXIT_OK)
}

fn cmd_report(a: ReportArgs, out: &mut dyn std::io::Write) -> Result<i32, CliError> {
    rerender_report(&a.run_dir)?;
    let text = std::fs::read_to_string(a.run_dir.join("report.txt")).map_err(CliError::config)?;
    emit(out, &text)?;
    Ok(EXIT_OK)
}

/// Convenience for embedding: parse `args` (including the program name) and
/// run, capturing stdout.
pub fn run_with_args<I, S>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => return (e.exit_code(), e.to_string()),
    };
    let mut buf = Vec::new();
    let code = match execute(cli, &mut buf) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(buf, "error: {}", e.message);
            e.code
        }
    };
    (code, String::from_utf8_lossy(&buf).into_owned())
}
