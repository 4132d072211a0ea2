//! Run configuration: one JSON document, layered as built-in defaults, then
//! an optional config file, then dotted `key=value` overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::backend::HttpConfig;
use crate::env::KinematicsConfig;
use crate::metrics::HashEmbedder;
use crate::policy::PolicySpec;
use crate::translator::PrincipleSet;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config `{path}`: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("config is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config field `{path}`: {message}")]
    Field { path: String, message: String },
    #[error("bad override `{0}`: expected dotted.key=value")]
    Override(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Which translator sits in front of the policy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TranslatorSpec {
    /// Baseline: the original instruction passes through unchanged.
    None,
    /// Deterministic offline rewrite rules.
    Desk { principles: PrincipleSet },
    /// Prompted model through the configured backend.
    Llm {
        principles: PrincipleSet,
        #[serde(default = "default_reasks")]
        reasks: u32,
        #[serde(default = "default_translate_tokens")]
        max_tokens: u32,
    },
}

fn default_reasks() -> u32 {
    1
}

fn default_translate_tokens() -> u32 {
    1024
}

impl TranslatorSpec {
    /// The principle set in effect; `None` for the baseline.
    pub fn principles(&self) -> Option<&PrincipleSet> {
        match self {
            TranslatorSpec::None => None,
            TranslatorSpec::Desk { principles } | TranslatorSpec::Llm { principles, .. } => Some(principles),
        }
    }

    /// An empty principle set behaves exactly like the baseline.
    pub fn is_bypass(&self) -> bool {
        self.principles().is_none_or(PrincipleSet::is_empty)
    }

    pub fn label(&self) -> String {
        match self {
            _ if self.is_bypass() => "-".into(),
            TranslatorSpec::Desk { principles } => format!("desk[{}]", short_label(principles)),
            TranslatorSpec::Llm { principles, .. } => format!("llm[{}]", short_label(principles)),
            TranslatorSpec::None => unreachable!(),
        }
    }

    pub fn with_principles(&self, set: PrincipleSet) -> TranslatorSpec {
        match self {
            TranslatorSpec::Llm { reasks, max_tokens, .. } => TranslatorSpec::Llm {
                principles: set,
                reasks: *reasks,
                max_tokens: *max_tokens,
            },
            _ => TranslatorSpec::Desk { principles: set },
        }
    }

    pub fn uses_backend(&self) -> bool {
        matches!(self, TranslatorSpec::Llm { .. }) && !self.is_bypass()
    }
}

fn short_label(set: &PrincipleSet) -> String {
    if set.is_full() {
        "all".into()
    } else {
        set.label()
    }
}

/// Completion service used by model-backed translators and policies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BackendSpec {
    Http {
        #[serde(default, flatten)]
        http: HttpConfig,
    },
    /// Answers only from a record file; unknown requests are REPLAY_MISS.
    Replay { path: PathBuf },
    /// Calls the HTTP service and appends every exchange to a record file.
    Record {
        path: PathBuf,
        #[serde(default, flatten)]
        http: HttpConfig,
    },
}

impl Default for BackendSpec {
    fn default() -> Self {
        BackendSpec::Http {
            http: HttpConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmbedderSpec {
    pub dim: usize,
    pub seed: u64,
}

impl Default for EmbedderSpec {
    fn default() -> Self {
        EmbedderSpec { dim: 64, seed: 0 }
    }
}

impl EmbedderSpec {
    pub fn build(&self) -> HashEmbedder {
        HashEmbedder::new(self.dim, self.seed)
    }
}

/// Everything that determines a run. Serialized in full into every results
/// header, so a results file describes how it was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub translator: TranslatorSpec,
    pub policy: PolicySpec,
    pub kinematics: KinematicsConfig,
    pub seed: u64,
    pub parallelism: usize,
    /// Wall-clock limit for model-backed episodes.
    pub episode_timeout_secs: u64,
    pub model_id: String,
    pub backend: BackendSpec,
    pub embedder: EmbedderSpec,
    /// Persistent translation cache (JSON lines); in-memory when unset.
    pub cache_path: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            translator: TranslatorSpec::Desk {
                principles: PrincipleSet::all(),
            },
            policy: PolicySpec::Scripted { epsilon: 0.0 },
            kinematics: KinematicsConfig::default(),
            seed: 0,
            parallelism: 4,
            episode_timeout_secs: 120,
            model_id: "default".into(),
            backend: BackendSpec::default(),
            embedder: EmbedderSpec::default(),
            cache_path: None,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.kinematics.validate().map_err(ConfigError::Invalid)?;
        self.policy.validate().map_err(ConfigError::Invalid)?;
        if self.parallelism == 0 {
            return Err(ConfigError::Invalid("parallelism must be >= 1".into()));
        }
        if self.embedder.dim == 0 {
            return Err(ConfigError::Invalid("embedder.dim must be >= 1".into()));
        }
        if self.episode_timeout_secs == 0 {
            return Err(ConfigError::Invalid("episode_timeout_secs must be >= 1".into()));
        }
        Ok(())
    }

    /// True when any part of the run talks to the completion backend.
    pub fn uses_backend(&self) -> bool {
        self.translator.uses_backend() || matches!(self.policy, PolicySpec::Llm { .. })
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn from_value(value: Value) -> Result<Self, ConfigError> {
        let config: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| ConfigError::Field {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Defaults, overlaid with the file at `path` (if any), then overrides.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut value = RunConfig::default().to_value();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
                path: path.to_path_buf(),
                source,
            })?;
            merge(&mut value, serde_json::from_str(&text)?);
        }
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        Self::from_value(value)
    }
}

/// Recursive merge: objects merge key by key, anything else replaces.
/// A `"kind"` change replaces the whole object, since variant fields differ.
pub fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            if o.get("kind").is_some_and(|k| b.get("kind") != Some(k)) {
                *b = o;
                return;
            }
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

/// Applies `a.b.c=value`. The value is read as JSON when it parses as JSON,
/// otherwise as a plain string.
pub fn apply_override(value: &mut Value, spec: &str) -> Result<(), ConfigError> {
    let (key, raw) = spec.split_once('=').ok_or_else(|| ConfigError::Override(spec.into()))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(ConfigError::Override(spec.into()));
    }
    let leaf = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut overlay = leaf;
    for part in key.rsplit('.') {
        let mut m = Map::new();
        m.insert(part.to_string(), overlay);
        overlay = Value::Object(m);
    }
    merge(value, overlay);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = RunConfig::default();
        assert_eq!(RunConfig::from_value(c.to_value()).unwrap(), c);
    }

    #[test]
    fn overrides_win_over_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"seed": 5, "kinematics": {"success_radius": 2.0}}"#).unwrap();
        let c = RunConfig::load(Some(&path), &["seed=9".into(), "policy.epsilon=0.2".into()]).unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.kinematics.success_radius, 2.0);
        assert_eq!(c.kinematics.forward_step, 0.5);
        assert_eq!(c.policy, PolicySpec::Scripted { epsilon: 0.2 });
    }

    #[test]
    fn kind_switch_replaces_variant() {
        let c = RunConfig::load(
            None,
            &[r#"translator={"kind":"llm","principles":["INESSENTIAL_REMOVAL"]}"#.into()],
        )
        .unwrap();
        assert!(matches!(c.translator, TranslatorSpec::Llm { reasks: 1, .. }));
        let c = RunConfig::load(None, &["translator.kind=none".into()]).unwrap();
        assert_eq!(c.translator, TranslatorSpec::None);
        assert!(c.translator.is_bypass());
    }

    #[test]
    fn field_errors_carry_paths() {
        let err = RunConfig::load(None, &["kinematics.forward_stp=1".into()]).unwrap_err();
        assert!(err.to_string().contains("kinematics"), "{err}");
        assert!(matches!(RunConfig::load(None, &["seed".into()]), Err(ConfigError::Override(_))));
        assert!(matches!(RunConfig::load(None, &["parallelism=0".into()]), Err(ConfigError::Invalid(_))));
    }
}
