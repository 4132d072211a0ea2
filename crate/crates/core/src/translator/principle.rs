use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::TranslatorError;

/// The five translation principles, in canonical order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PrincipleId {
    InessentialRemoval,
    ErrorsRevision,
    HighLowSeparation,
    RepresentationalRotation,
    RepresentationalMovement,
}

impl PrincipleId {
    pub const ALL: [PrincipleId; 5] = [
        PrincipleId::InessentialRemoval,
        PrincipleId::ErrorsRevision,
        PrincipleId::HighLowSeparation,
        PrincipleId::RepresentationalRotation,
        PrincipleId::RepresentationalMovement,
    ];

    /// Block name used in rendered prompts and config keys.
    pub fn as_str(self) -> &'static str {
        match self {
            PrincipleId::InessentialRemoval => "INESSENTIAL_REMOVAL",
            PrincipleId::ErrorsRevision => "ERRORS_REVISION",
            PrincipleId::HighLowSeparation => "HIGH_LOW_SEPARATION",
            PrincipleId::RepresentationalRotation => "REPRESENTATIONAL_ROTATION",
            PrincipleId::RepresentationalMovement => "REPRESENTATIONAL_MOVEMENT",
        }
    }

    /// Human-readable name, as used in ablation row labels.
    pub fn display_name(self) -> &'static str {
        match self {
            PrincipleId::InessentialRemoval => "Inessential Removal",
            PrincipleId::ErrorsRevision => "Errors Revision",
            PrincipleId::HighLowSeparation => "High-Low Separation",
            PrincipleId::RepresentationalRotation => "Representational Rotation",
            PrincipleId::RepresentationalMovement => "Representational Movement",
        }
    }
}

impl fmt::Display for PrincipleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PrincipleId {
    type Err = TranslatorError;

    /// Accepts the block name (`ERRORS_REVISION`) or a kebab/lower form
    /// (`errors-revision`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_uppercase().replace(['-', ' '], "_");
        PrincipleId::ALL
            .into_iter()
            .find(|p| p.as_str() == norm)
            .ok_or_else(|| TranslatorError::Config(format!("unknown principle `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneShotExample {
    pub input: String,
    pub output: String,
}

/// A principle rule together with its one-shot example.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Principle {
    id: PrincipleId,
    rule_text: String,
    example: OneShotExample,
}

impl Principle {
    pub fn new(
        id: PrincipleId,
        rule_text: impl Into<String>,
        example: OneShotExample,
    ) -> Result<Self, TranslatorError> {
        let rule_text = rule_text.into();
        if rule_text.trim().is_empty()
            || example.input.trim().is_empty()
            || example.output.trim().is_empty()
        {
            return Err(TranslatorError::Config(format!(
                "principle {id} needs a non-empty rule and example"
            )));
        }
        Ok(Principle {
            id,
            rule_text,
            example,
        })
    }

    pub fn id(&self) -> PrincipleId {
        self.id
    }

    pub fn rule_text(&self) -> &str {
        &self.rule_text
    }

    pub fn example(&self) -> &OneShotExample {
        &self.example
    }
}

/// An ordered set of principle ids, each present at most once. Serialized as
/// a list of ids; also read from a spec string such as `"all"` or `"none"`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "RawSet", into = "Vec<PrincipleId>")]
pub struct PrincipleSet(Vec<PrincipleId>);

impl PrincipleSet {
    pub fn empty() -> Self {
        PrincipleSet(Vec::new())
    }

    pub fn all() -> Self {
        PrincipleSet(PrincipleId::ALL.to_vec())
    }

    pub fn single(id: PrincipleId) -> Self {
        PrincipleSet(vec![id])
    }

    pub fn new(ids: impl IntoIterator<Item = PrincipleId>) -> Result<Self, TranslatorError> {
        let mut v: Vec<PrincipleId> = Vec::new();
        for id in ids {
            if v.contains(&id) {
                return Err(TranslatorError::Config(format!("principle {id} listed twice")));
            }
            v.push(id);
        }
        Ok(PrincipleSet(v))
    }

    /// Parses `all`, `none`, or a comma-separated list of principle names.
    pub fn parse(spec: &str) -> Result<Self, TranslatorError> {
        match spec.trim().to_ascii_lowercase().as_str() {
            "all" | "full" => Ok(Self::all()),
            "none" | "" => Ok(Self::empty()),
            _ => Self::new(
                spec.split(',')
                    .map(str::parse)
                    .collect::<Result<Vec<_>, _>>()?,
            ),
        }
    }

    pub fn contains(&self, id: PrincipleId) -> bool {
        self.0.contains(&id)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn ids(&self) -> &[PrincipleId] {
        &self.0
    }

    pub fn is_full(&self) -> bool {
        PrincipleId::ALL.iter().all(|p| self.contains(*p))
    }

    /// Members in canonical principle order.
    pub fn canonical(&self) -> Vec<PrincipleId> {
        PrincipleId::ALL
            .into_iter()
            .filter(|p| self.contains(*p))
            .collect()
    }

    pub fn label(&self) -> String {
        if self.is_empty() {
            "none".into()
        } else {
            self.0.iter().map(|p| p.as_str()).collect::<Vec<_>>().join(",")
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawSet {
    List(Vec<PrincipleId>),
    Spec(String),
}

impl TryFrom<RawSet> for PrincipleSet {
    type Error = TranslatorError;

    fn try_from(raw: RawSet) -> Result<Self, Self::Error> {
        match raw {
            RawSet::List(v) => PrincipleSet::new(v),
            RawSet::Spec(s) => PrincipleSet::parse(&s),
        }
    }
}

impl From<PrincipleSet> for Vec<PrincipleId> {
    fn from(s: PrincipleSet) -> Self {
        s.0
    }
}

/// Editable prompt assets: task description, format restriction and the
/// default wording of each principle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromptAssets {
    pub description: String,
    pub format_restriction: String,
    principles: BTreeMap<PrincipleId, Principle>,
}

#[derive(Deserialize)]
struct RawAssets {
    template: RawTemplate,
    principles: BTreeMap<PrincipleId, RawPrinciple>,
}

#[derive(Deserialize)]
struct RawTemplate {
    description: String,
    format: String,
}

#[derive(Deserialize)]
struct RawPrinciple {
    rule: String,
    example_input: String,
    example_output: String,
}

const DEFAULT_ASSETS: &str = include_str!("../../assets/principles.toml");

impl PromptAssets {
    pub fn defaults() -> Self {
        Self::from_toml(DEFAULT_ASSETS).expect("bundled principle assets are valid")
    }

    pub fn from_toml(text: &str) -> Result<Self, TranslatorError> {
        let raw: RawAssets =
            toml::from_str(text).map_err(|e| TranslatorError::Config(e.to_string()))?;
        let mut principles = BTreeMap::new();
        for id in PrincipleId::ALL {
            let p = raw.principles.get(&id).ok_or_else(|| {
                TranslatorError::Config(format!("principle assets missing {id}"))
            })?;
            principles.insert(
                id,
                Principle::new(
                    id,
                    p.rule.clone(),
                    OneShotExample {
                        input: p.example_input.clone(),
                        output: p.example_output.clone(),
                    },
                )?,
            );
        }
        Ok(PromptAssets {
            description: raw.template.description,
            format_restriction: raw.template.format,
            principles,
        })
    }

    pub fn principle(&self, id: PrincipleId) -> &Principle {
        &self.principles[&id]
    }
}
