use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// The six-section experiment results document.
///
/// Top-level keys are `experiment`, `models`, `metrics`, `documents`, `tasks`
/// and `evaluations`. Every field name is lower_snake_case on the wire.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentFile {
    pub experiment: ExperimentDetails,
    pub models: Vec<ModelMeta>,
    pub metrics: Vec<MetricMeta>,
    pub documents: Vec<Document>,
    pub tasks: Vec<Task>,
    pub evaluations: Vec<Evaluation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentDetails {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// ISO-8601, kept verbatim.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelMeta {
    pub model_id: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuthorType {
    Algorithmic,
    Human,
    LlmJudge,
}

impl fmt::Display for AuthorType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AuthorType::Algorithmic => "algorithmic",
            AuthorType::Human => "human",
            AuthorType::LlmJudge => "llm-judge",
        })
    }
}

fn default_true() -> bool {
    true
}

fn is_true(v: &bool) -> bool {
    *v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricMeta {
    pub metric_id: String,
    pub name: String,
    pub author_type: AuthorType,
    pub scale: ScaleSpec,
    #[serde(default = "default_true", skip_serializing_if = "is_true")]
    pub higher_is_better: bool,
}

impl MetricMeta {
    pub fn is_human(&self) -> bool {
        self.author_type == AuthorType::Human
    }
}

/// One declared value of a categorical scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CategoryValue {
    pub value: String,
    /// Omitted mappings default to the declared position, starting at 0.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub numeric_mapping: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub display: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScaleSpec {
    Categorical { values: Vec<CategoryValue> },
    Numeric { min: f64, max: f64 },
}

impl ScaleSpec {
    /// Numeric value of the categorical entry at `index`.
    pub fn mapping_at(&self, index: usize) -> Option<f64> {
        match self {
            ScaleSpec::Categorical { values } => values
                .get(index)
                .map(|v| v.numeric_mapping.unwrap_or(index as f64)),
            ScaleSpec::Numeric { .. } => None,
        }
    }

    pub fn category_index(&self, label: &str) -> Option<usize> {
        match self {
            ScaleSpec::Categorical { values } => values.iter().position(|v| v.value == label),
            ScaleSpec::Numeric { .. } => None,
        }
    }

    /// Declared labels in order; empty for numeric scales.
    pub fn labels(&self) -> Vec<&str> {
        match self {
            ScaleSpec::Categorical { values } => values.iter().map(|v| v.value.as_str()).collect(),
            ScaleSpec::Numeric { .. } => Vec::new(),
        }
    }

    /// Lowest and highest reachable numeric value after mapping.
    pub fn mapped_range(&self) -> (f64, f64) {
        match self {
            ScaleSpec::Numeric { min, max } => (*min, *max),
            ScaleSpec::Categorical { values } => {
                let mapped: Vec<f64> = (0..values.len())
                    .filter_map(|i| self.mapping_at(i))
                    .collect();
                let lo = mapped.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = mapped.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if mapped.is_empty() {
                    (0.0, 0.0)
                } else {
                    (lo, hi)
                }
            }
        }
    }

    /// Maps a rating onto the real line, or `None` when it does not conform.
    pub fn map_value(&self, value: &RatingValue) -> Option<f64> {
        match (self, value) {
            (ScaleSpec::Categorical { .. }, RatingValue::Label(label)) => {
                self.category_index(label).and_then(|i| self.mapping_at(i))
            }
            (ScaleSpec::Numeric { min, max }, RatingValue::Number(x)) => {
                (x.is_finite() && *x >= *min && *x <= *max).then_some(*x)
            }
            _ => None,
        }
    }

    pub fn is_categorical(&self) -> bool {
        matches!(self, ScaleSpec::Categorical { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub document_id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub url: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Speaker {
    User,
    Agent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Turn {
    pub speaker: Speaker,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Task {
    pub task_id: String,
    pub input: Vec<Turn>,
    #[serde(default)]
    pub contexts: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metadata: BTreeMap<String, String>,
}

impl Task {
    /// Text of the final user turn, which is the question being answered.
    pub fn question(&self) -> &str {
        self.input
            .iter()
            .rev()
            .find(|t| t.speaker == Speaker::User)
            .map(|t| t.text.as_str())
            .unwrap_or("")
    }
}

/// Per-metric, per-annotator ratings of one evaluation.
pub type Annotations = BTreeMap<String, BTreeMap<String, Rating>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Evaluation {
    pub task_id: String,
    pub model_id: String,
    pub model_response: String,
    #[serde(default)]
    pub annotations: Annotations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RatingValue {
    Number(f64),
    Label(String),
}

impl RatingValue {
    /// Identity used when comparing ratings for agreement and kappa.
    ///
    /// Numbers use the shortest round-trip representation so `1` and `1.0`
    /// compare equal.
    pub fn key(&self) -> String {
        match self {
            RatingValue::Label(s) => s.clone(),
            RatingValue::Number(x) => format!("{x}"),
        }
    }
}

impl fmt::Display for RatingValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rating {
    pub value: RatingValue,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_seconds: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

impl Rating {
    pub fn label(value: impl Into<String>) -> Self {
        Rating {
            value: RatingValue::Label(value.into()),
            duration_seconds: None,
            timestamp: None,
        }
    }

    pub fn number(value: f64) -> Self {
        Rating {
            value: RatingValue::Number(value),
            duration_seconds: None,
            timestamp: None,
        }
    }

    pub fn with_duration(mut self, seconds: f64) -> Self {
        self.duration_seconds = Some(seconds);
        self
    }
}

impl ExperimentFile {
    pub fn model(&self, model_id: &str) -> Option<&ModelMeta> {
        self.models.iter().find(|m| m.model_id == model_id)
    }

    pub fn metric(&self, metric_id: &str) -> Option<&MetricMeta> {
        self.metrics.iter().find(|m| m.metric_id == metric_id)
    }

    pub fn task(&self, task_id: &str) -> Option<&Task> {
        self.tasks.iter().find(|t| t.task_id == task_id)
    }

    pub fn document(&self, document_id: &str) -> Option<&Document> {
        self.documents.iter().find(|d| d.document_id == document_id)
    }

    pub fn evaluation(&self, task_id: &str, model_id: &str) -> Option<&Evaluation> {
        self.evaluations
            .iter()
            .find(|e| e.task_id == task_id && e.model_id == model_id)
    }
}
