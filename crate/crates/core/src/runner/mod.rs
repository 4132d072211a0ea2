//! Benchmark orchestration: translate, loop and score every episode of a set
//! under one configuration, and principle ablations over several.

mod store;

pub use store::{
    read_results_file, rerender_report, results_body, table_row, write_ablation_dir, write_run_dir,
    ResultsHeader, RESULTS_FORMAT,
};

use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::backend::{
    sha256_hex, BackendError, CompletionBackend, Decoding, HttpBackend, RecordingBackend, ReplayBackend,
};
use crate::config::{BackendSpec, RunConfig, TranslatorSpec};
use crate::env::{run_episode_loop, AbortCause, EpisodeAborted, LoopOptions};
use crate::metrics::{instruction_similarity, AblationRow, Embedder, MetricsReport};
use crate::policy::{
    episode_seed, FixedPolicy, LlmPolicy, LlmPolicyConfig, Policy, PolicySpec, RandomPolicy, ScriptedPolicy,
};
use crate::translator::{
    bypass, desk_translate, translate, CacheKey, PrincipleId, PrincipleSet, PromptAssets, PromptTemplate,
    TranslateOptions, TranslationCache, TranslatorError,
};
use crate::types::{write_episode_file, Episode, EpisodeResult, Instruction};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("run configuration: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Format(#[from] crate::types::FormatError),
}

impl RunError {
    pub(crate) fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> RunError {
        let context = context.into();
        move |source| RunError::Io { context, source }
    }
}

/// Shared state for the episodes of a run. Everything here tolerates
/// concurrent use.
#[derive(Clone)]
pub struct RunContext {
    pub backend: Option<Arc<dyn CompletionBackend>>,
    pub cache: Arc<TranslationCache>,
    pub assets: Arc<PromptAssets>,
}

impl RunContext {
    /// No backend, in-memory cache, bundled prompt assets.
    pub fn offline() -> Self {
        RunContext {
            backend: None,
            cache: Arc::new(TranslationCache::in_memory()),
            assets: Arc::new(PromptAssets::defaults()),
        }
    }

    pub fn with_backend(backend: Arc<dyn CompletionBackend>) -> Self {
        RunContext {
            backend: Some(backend),
            ..Self::offline()
        }
    }

    /// Builds the backend and cache a configuration asks for. The backend is
    /// only constructed when some part of the run needs it.
    pub fn from_config(config: &RunConfig) -> Result<Self, RunError> {
        let mut ctx = Self::offline();
        if let Some(path) = &config.cache_path {
            ctx.cache = Arc::new(
                TranslationCache::open(path).map_err(RunError::io(format!("cache {}", path.display())))?,
            );
        }
        if config.uses_backend() {
            ctx.backend = Some(build_backend(&config.backend)?);
        }
        Ok(ctx)
    }
}

pub fn build_backend(spec: &BackendSpec) -> Result<Arc<dyn CompletionBackend>, RunError> {
    Ok(match spec {
        BackendSpec::Http { http } => Arc::new(HttpBackend::new(http.clone().with_env())?),
        BackendSpec::Replay { path } => Arc::new(
            ReplayBackend::load("replay", path).map_err(RunError::io(format!("replay file {}", path.display())))?,
        ),
        BackendSpec::Record { path, http } => Arc::new(
            RecordingBackend::new(HttpBackend::new(http.clone().with_env())?, path)
                .map_err(RunError::io(format!("record file {}", path.display())))?,
        ),
    })
}

/// Model id placed in requests: an HTTP-side model name when configured,
/// otherwise the run's `model_id`.
fn effective_model(config: &RunConfig) -> String {
    match &config.backend {
        BackendSpec::Http { http } | BackendSpec::Record { http, .. } => http
            .clone()
            .with_env()
            .model
            .unwrap_or_else(|| config.model_id.clone()),
        BackendSpec::Replay { .. } => config.model_id.clone(),
    }
}

/// An episode excluded from the metrics, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbortRecord {
    pub episode_id: String,
    pub cause: String,
    pub decisions: usize,
    pub replay_miss: bool,
}

impl From<&EpisodeAborted> for AbortRecord {
    fn from(a: &EpisodeAborted) -> Self {
        AbortRecord {
            episode_id: a.episode_id.clone(),
            cause: a.cause.to_string(),
            decisions: a.trajectory.actions().len(),
            replay_miss: a.is_replay_miss(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: RunConfig,
    pub run_id: String,
    pub episodes_sha256: String,
    pub embedder_id: String,
    /// Completed episodes sorted by id.
    pub results: Vec<EpisodeResult>,
    pub aborted: Vec<AbortRecord>,
    /// LOW, HIGH, ALL.
    pub reports: [MetricsReport; 3],
}

impl RunOutput {
    pub fn has_replay_miss(&self) -> bool {
        self.aborted.iter().any(|a| a.replay_miss)
    }
}

pub fn episodes_hash(episodes: &[Episode]) -> String {
    sha256_hex(&write_episode_file(episodes))
}

/// Content hash of the configuration and the episode set.
pub fn run_id(config: &RunConfig, episodes_sha256: &str) -> String {
    let doc = json!({"config": config, "episodes_sha256": episodes_sha256});
    sha256_hex(&serde_json::to_vec(&doc).expect("config serializes"))[..16].to_string()
}

fn check_deadline(deadline: Option<(Instant, Duration)>) -> Result<(), AbortCause> {
    match deadline {
        Some((at, limit)) if Instant::now() > at => Err(AbortCause::Timeout(limit)),
        _ => Ok(()),
    }
}

struct Prepared<'a> {
    config: &'a RunConfig,
    ctx: &'a RunContext,
    template: Option<PromptTemplate>,
    model_id: String,
    embedder: &'a dyn Embedder,
}

impl Prepared<'_> {
    fn backend(&self) -> Result<&Arc<dyn CompletionBackend>, AbortCause> {
        self.ctx
            .backend
            .as_ref()
            .ok_or_else(|| AbortCause::Precondition("configuration needs a completion backend".into()))
    }

    fn translate(&self, original: &Instruction) -> Result<Option<Instruction>, AbortCause> {
        match &self.config.translator {
            t if t.is_bypass() => Ok(None),
            TranslatorSpec::Desk { principles } => Ok(Some(desk_translate(original, principles).translated)),
            TranslatorSpec::Llm { reasks, max_tokens, .. } => {
                let backend = self.backend()?;
                let template = self.template.as_ref().expect("prepared for llm translator");
                let rendered = template.render();
                let key = CacheKey::new(&rendered, original.text(), backend.id());
                let opts = TranslateOptions {
                    model_id: self.model_id.clone(),
                    decoding: Decoding {
                        temperature: 0.0,
                        max_tokens: *max_tokens,
                    },
                    reasks: *reasks,
                };
                let t = self
                    .ctx
                    .cache
                    .get_or_translate(&key, || translate(original, template, backend.as_ref(), &opts))?;
                Ok(Some(t.translated))
            }
            TranslatorSpec::None => Ok(None),
        }
    }

    fn policy(&self, episode: &Episode) -> Result<Box<dyn Policy>, AbortCause> {
        let seed = episode_seed(self.config.seed, episode.id());
        Ok(match &self.config.policy {
            PolicySpec::Scripted { epsilon } => {
                Box::new(ScriptedPolicy::new(episode.label_actions().to_vec(), *epsilon, seed))
            }
            PolicySpec::Random => Box::new(RandomPolicy::new(seed)),
            PolicySpec::Fixed => Box::new(FixedPolicy),
            PolicySpec::Llm { frame_mode } => Box::new(LlmPolicy::new(
                self.backend()?.clone(),
                LlmPolicyConfig {
                    model_id: self.model_id.clone(),
                    frame_mode: *frame_mode,
                    ..LlmPolicyConfig::default()
                },
            )),
        })
    }

    fn run_one(&self, episode: &Episode) -> Result<EpisodeResult, EpisodeAborted> {
        let started = Instant::now();
        let deadline = self.config.uses_backend().then(|| {
            let limit = Duration::from_secs(self.config.episode_timeout_secs);
            (started + limit, limit)
        });
        let early = |cause: AbortCause| EpisodeAborted {
            episode_id: episode.id().to_string(),
            cause,
            trajectory: crate::env::Trajectory::start(episode.start()),
        };
        let translated = self.translate(episode.instruction()).map_err(early)?;
        check_deadline(deadline).map_err(early)?;
        let mut policy = self.policy(episode).map_err(early)?;
        let fed = translated.clone().unwrap_or_else(|| bypass(episode.instruction()));
        let opts = LoopOptions {
            deadline,
            pose_hints: false,
        };
        let mut result = run_episode_loop(episode, policy.as_mut(), &fed, &self.config.kinematics, opts)?;
        if let Some(t) = translated {
            result.similarity = match instruction_similarity(episode.instruction().text(), t.text(), self.embedder) {
                Ok(s) => Some(s),
                Err(e) => {
                    log::warn!("episode {}: no similarity score: {e}", episode.id());
                    None
                }
            };
            result.translated = Some(t);
        }
        Ok(result)
    }
}

/// Runs every episode under `config`. Aborted episodes are reported and
/// excluded from the metrics; the run itself fails only on configuration
/// errors.
pub fn run_benchmark(episodes: &[Episode], config: &RunConfig, ctx: &RunContext) -> Result<RunOutput, RunError> {
    config.validate().map_err(|e| RunError::Config(e.to_string()))?;
    if config.uses_backend() && ctx.backend.is_none() {
        return Err(RunError::Config("configuration needs a completion backend".into()));
    }
    let embedder = config.embedder.build();
    let template = match &config.translator {
        TranslatorSpec::Llm { principles, .. } if !principles.is_empty() => {
            Some(PromptTemplate::from_assets(&ctx.assets, principles))
        }
        _ => None,
    };
    let prepared = Prepared {
        config,
        ctx,
        template,
        model_id: effective_model(config),
        embedder: &embedder,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| RunError::Config(format!("thread pool: {e}")))?;
    let outcomes: Vec<Result<EpisodeResult, EpisodeAborted>> =
        pool.install(|| episodes.par_iter().map(|e| prepared.run_one(e)).collect());

    let mut results = Vec::new();
    let mut aborted = Vec::new();
    for o in outcomes {
        match o {
            Ok(r) => results.push(r),
            Err(a) => {
                log::warn!("{a}");
                aborted.push(AbortRecord::from(&a));
            }
        }
    }
    results.sort_by(|a, b| a.episode_id.cmp(&b.episode_id));
    aborted.sort_by(|a, b| a.episode_id.cmp(&b.episode_id));
    let episodes_sha256 = episodes_hash(episodes);
    Ok(RunOutput {
        config: config.clone(),
        run_id: run_id(config, &episodes_sha256),
        episodes_sha256,
        embedder_id: embedder.id().to_string(),
        reports: MetricsReport::all_splits(&results),
        results,
        aborted,
    })
}

pub const BASELINE_LABEL: &str = "Baseline";
pub const FULL_SET_LABEL: &str = "All principles";

/// Row label for a principle subset: "+ Inessential Removal" style.
pub fn subset_label(set: &PrincipleSet) -> String {
    if set.is_empty() {
        return format!("{BASELINE_LABEL} (empty set)");
    }
    if set.is_full() {
        return FULL_SET_LABEL.into();
    }
    set.canonical()
        .iter()
        .map(|p| format!("+ {}", p.display_name()))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses a subset list: comma-separated items among `singletons`, `full`,
/// `none`, or a `+`-joined group of principle ids.
pub fn parse_subsets(spec: &str) -> Result<Vec<PrincipleSet>, TranslatorError> {
    let mut out = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.to_ascii_lowercase().as_str() {
            "singletons" => out.extend(PrincipleId::ALL.map(PrincipleSet::single)),
            "full" | "all" => out.push(PrincipleSet::all()),
            "none" | "empty" => out.push(PrincipleSet::empty()),
            _ => out.push(PrincipleSet::new(
                item.split('+').map(|p| p.trim().parse()).collect::<Result<Vec<PrincipleId>, _>>()?,
            )?),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct AblationOutput {
    pub rows: Vec<AblationRow>,
    /// One run per row, in row order.
    pub runs: Vec<RunOutput>,
}

/// Baseline row first, then each subset in the given order, then the full
/// set last (moved there if listed, added if not).
pub fn run_ablation(
    episodes: &[Episode],
    base: &RunConfig,
    subsets: &[PrincipleSet],
    ctx: &RunContext,
) -> Result<AblationOutput, RunError> {
    let mut plan: Vec<(String, TranslatorSpec)> = vec![(BASELINE_LABEL.into(), TranslatorSpec::None)];
    for s in subsets.iter().filter(|s| !s.is_full()) {
        plan.push((subset_label(s), base.translator.with_principles(s.clone())));
    }
    plan.push((FULL_SET_LABEL.into(), base.translator.with_principles(PrincipleSet::all())));

    let mut rows = Vec::new();
    let mut runs = Vec::new();
    for (i, (label, translator)) in plan.into_iter().enumerate() {
        let config = RunConfig {
            translator,
            ..base.clone()
        };
        let out = run_benchmark(episodes, &config, ctx)?;
        rows.push(AblationRow {
            index: i + 1,
            label,
            report: out.reports[2].clone(),
        });
        runs.push(out);
    }
    Ok(AblationOutput { rows, runs })
}

/// Directory for a run: `<root>/<run-id>`.
pub fn run_dir(root: &std::path::Path, out: &RunOutput) -> PathBuf {
    root.join(&out.run_id)
}
