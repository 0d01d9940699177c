use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::types::{ExperimentFile, ScaleSpec};

/// Every problem `validate` can report. The set is closed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ErrorCode {
    DuplicateId,
    DanglingDocumentRef,
    DanglingTaskRef,
    DanglingModelRef,
    UnknownMetric,
    ScaleViolation,
    MissingEvaluation,
    MissingScore,
    UnevenAnnotators,
    EmptySection,
}

impl ErrorCode {
    pub const ALL: [ErrorCode; 10] = [
        ErrorCode::DuplicateId,
        ErrorCode::DanglingDocumentRef,
        ErrorCode::DanglingTaskRef,
        ErrorCode::DanglingModelRef,
        ErrorCode::UnknownMetric,
        ErrorCode::ScaleViolation,
        ErrorCode::MissingEvaluation,
        ErrorCode::MissingScore,
        ErrorCode::UnevenAnnotators,
        ErrorCode::EmptySection,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ErrorCode::DuplicateId => "DUPLICATE_ID",
            ErrorCode::DanglingDocumentRef => "DANGLING_DOCUMENT_REF",
            ErrorCode::DanglingTaskRef => "DANGLING_TASK_REF",
            ErrorCode::DanglingModelRef => "DANGLING_MODEL_REF",
            ErrorCode::UnknownMetric => "UNKNOWN_METRIC",
            ErrorCode::ScaleViolation => "SCALE_VIOLATION",
            ErrorCode::MissingEvaluation => "MISSING_EVALUATION",
            ErrorCode::MissingScore => "MISSING_SCORE",
            ErrorCode::UnevenAnnotators => "UNEVEN_ANNOTATORS",
            ErrorCode::EmptySection => "EMPTY_SECTION",
        }
    }

    /// Warnings are reported but never make a file invalid.
    pub fn is_warning(&self) -> bool {
        matches!(self, ErrorCode::MissingScore | ErrorCode::UnevenAnnotators)
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub code: ErrorCode,
    pub path: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}: {}", self.code, self.path, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }

    /// Distinct codes across errors and warnings.
    pub fn codes(&self) -> BTreeSet<ErrorCode> {
        self.errors
            .iter()
            .chain(&self.warnings)
            .map(|i| i.code)
            .collect()
    }

    fn push(&mut self, code: ErrorCode, path: impl Into<String>, message: impl Into<String>) {
        let issue = Issue {
            code,
            path: path.into(),
            message: message.into(),
        };
        if code.is_warning() {
            self.warnings.push(issue);
        } else {
            self.errors.push(issue);
        }
    }
}

/// Checks a parsed experiment file against the full error taxonomy.
///
/// Reference checks against an empty section are skipped; the empty section
/// itself is the one error reported for it.
pub fn validate(file: &ExperimentFile) -> ValidationReport {
    let mut report = ValidationReport::default();

    for (section, empty) in [
        ("models", file.models.is_empty()),
        ("metrics", file.metrics.is_empty()),
        ("tasks", file.tasks.is_empty()),
        ("evaluations", file.evaluations.is_empty()),
    ] {
        if empty {
            report.push(
                ErrorCode::EmptySection,
                section,
                format!("section '{section}' is empty"),
            );
        }
    }

    check_ids(
        &mut report,
        "models",
        "model_id",
        file.models.iter().map(|m| m.model_id.as_str()),
    );
    check_ids(
        &mut report,
        "metrics",
        "metric_id",
        file.metrics.iter().map(|m| m.metric_id.as_str()),
    );
    check_ids(
        &mut report,
        "documents",
        "document_id",
        file.documents.iter().map(|d| d.document_id.as_str()),
    );
    check_ids(
        &mut report,
        "tasks",
        "task_id",
        file.tasks.iter().map(|t| t.task_id.as_str()),
    );

    for (i, metric) in file.metrics.iter().enumerate() {
        if let Some(problem) = scale_problem(&metric.scale) {
            report.push(
                ErrorCode::ScaleViolation,
                format!("metrics[{i}].scale"),
                problem,
            );
        }
    }

    for (i, doc) in file.documents.iter().enumerate() {
        if doc.text.is_empty() {
            report.push(
                ErrorCode::EmptySection,
                format!("documents[{i}].text"),
                format!("document '{}' has empty text", doc.document_id),
            );
        }
    }

    let document_ids: HashSet<&str> = file
        .documents
        .iter()
        .map(|d| d.document_id.as_str())
        .collect();
    for (i, task) in file.tasks.iter().enumerate() {
        if task.input.is_empty() {
            report.push(
                ErrorCode::EmptySection,
                format!("tasks[{i}].input"),
                format!("task '{}' has no input turns", task.task_id),
            );
        }
        for (j, doc_id) in task.contexts.iter().enumerate() {
            if !document_ids.contains(doc_id.as_str()) {
                report.push(
                    ErrorCode::DanglingDocumentRef,
                    format!("tasks[{i}].contexts[{j}]"),
                    format!("document '{doc_id}' is not declared"),
                );
            }
        }
    }

    check_evaluations(file, &mut report);
    report
}

fn check_ids<'a>(
    report: &mut ValidationReport,
    section: &str,
    field: &str,
    ids: impl Iterator<Item = &'a str>,
) {
    let mut seen = HashSet::new();
    for (i, id) in ids.enumerate() {
        if id.is_empty() {
            report.push(
                ErrorCode::EmptySection,
                format!("{section}[{i}].{field}"),
                format!("{field} is empty"),
            );
        } else if !seen.insert(id) {
            report.push(
                ErrorCode::DuplicateId,
                format!("{section}[{i}].{field}"),
                format!("{field} '{id}' is declared more than once"),
            );
        }
    }
}

fn scale_problem(scale: &ScaleSpec) -> Option<String> {
    match scale {
        ScaleSpec::Numeric { min, max } => {
            if !(min.is_finite() && max.is_finite()) {
                Some("numeric bounds must be finite".to_string())
            } else if min >= max {
                Some(format!(
                    "numeric scale requires min < max, got [{min}, {max}]"
                ))
            } else {
                None
            }
        }
        ScaleSpec::Categorical { values } => {
            if values.is_empty() {
                return Some("categorical scale declares no values".to_string());
            }
            let mut seen = HashSet::new();
            if let Some(dup) = values.iter().find(|v| !seen.insert(v.value.as_str())) {
                return Some(format!(
                    "categorical value '{}' is declared twice",
                    dup.value
                ));
            }
            let mapped: Vec<f64> = (0..values.len())
                .filter_map(|i| scale.mapping_at(i))
                .collect();
            if mapped.iter().any(|m| !m.is_finite()) {
                return Some("numeric_mapping must be finite".to_string());
            }
            if mapped.windows(2).any(|w| w[0] >= w[1]) {
                return Some(
                    "numeric_mapping must strictly increase in declared order".to_string(),
                );
            }
            None
        }
    }
}

fn check_evaluations(file: &ExperimentFile, report: &mut ValidationReport) {
    let task_ids: HashSet<&str> = file.tasks.iter().map(|t| t.task_id.as_str()).collect();
    let model_ids: HashSet<&str> = file.models.iter().map(|m| m.model_id.as_str()).collect();
    let metrics: BTreeMap<&str, &ScaleSpec> = file
        .metrics
        .iter()
        .map(|m| (m.metric_id.as_str(), &m.scale))
        .collect();

    let mut pairs = HashSet::new();
    for (k, eval) in file.evaluations.iter().enumerate() {
        let at = format!("evaluations[{k}]");
        if !file.tasks.is_empty() && !task_ids.contains(eval.task_id.as_str()) {
            report.push(
                ErrorCode::DanglingTaskRef,
                format!("{at}.task_id"),
                format!("task '{}' is not declared", eval.task_id),
            );
        }
        if !file.models.is_empty() && !model_ids.contains(eval.model_id.as_str()) {
            report.push(
                ErrorCode::DanglingModelRef,
                format!("{at}.model_id"),
                format!("model '{}' is not declared", eval.model_id),
            );
        }
        if !pairs.insert((eval.task_id.as_str(), eval.model_id.as_str())) {
            report.push(
                ErrorCode::DuplicateId,
                at.clone(),
                format!(
                    "more than one evaluation for task '{}' and model '{}'",
                    eval.task_id, eval.model_id
                ),
            );
        }

        for (metric_id, ratings) in &eval.annotations {
            let cell = format!("{at}.annotations.{metric_id}");
            let Some(scale) = metrics.get(metric_id.as_str()) else {
                if !file.metrics.is_empty() {
                    report.push(
                        ErrorCode::UnknownMetric,
                        cell,
                        format!("metric '{metric_id}' is not declared"),
                    );
                }
                continue;
            };
            if ratings.is_empty() {
                report.push(
                    ErrorCode::EmptySection,
                    cell.clone(),
                    "no annotator ratings",
                );
            }
            for (annotator, rating) in ratings {
                let rating_path = format!("{cell}.{annotator}");
                if scale.map_value(&rating.value).is_none() {
                    report.push(
                        ErrorCode::ScaleViolation,
                        format!("{rating_path}.value"),
                        format!(
                            "'{}' does not conform to the scale of '{metric_id}'",
                            rating.value
                        ),
                    );
                }
                if let Some(d) = rating.duration_seconds {
                    if !(d.is_finite() && d >= 0.0) {
                        report.push(
                            ErrorCode::ScaleViolation,
                            format!("{rating_path}.duration_seconds"),
                            format!("duration must be a non-negative number, got {d}"),
                        );
                    }
                }
            }
        }
    }

    if !file.tasks.is_empty() && !file.models.is_empty() && !file.evaluations.is_empty() {
        for task in &file.tasks {
            for model in &file.models {
                if !pairs.contains(&(task.task_id.as_str(), model.model_id.as_str())) {
                    report.push(
                        ErrorCode::MissingEvaluation,
                        "evaluations",
                        format!(
                            "no evaluation for task '{}' and model '{}'",
                            task.task_id, model.model_id
                        ),
                    );
                }
            }
        }
    }

    let scored: BTreeSet<&str> = file
        .evaluations
        .iter()
        .flat_map(|e| e.annotations.keys().map(String::as_str))
        .filter(|m| metrics.contains_key(m))
        .collect();
    for (k, eval) in file.evaluations.iter().enumerate() {
        for metric_id in &scored {
            if !eval.annotations.contains_key(*metric_id) {
                report.push(
                    ErrorCode::MissingScore,
                    format!("evaluations[{k}]"),
                    format!("no score for metric '{metric_id}'"),
                );
            }
        }
    }

    for (i, metric) in file.metrics.iter().enumerate() {
        if !metric.is_human() {
            continue;
        }
        let counts: BTreeSet<usize> = file
            .evaluations
            .iter()
            .filter_map(|e| e.annotations.get(&metric.metric_id))
            .map(|r| r.len())
            .collect();
        if counts.len() > 1 {
            let listed: Vec<String> = counts.iter().map(|c| c.to_string()).collect();
            report.push(
                ErrorCode::UnevenAnnotators,
                format!("metrics[{i}]"),
                format!(
                    "human metric '{}' has differing annotator counts across instances: {}",
                    metric.metric_id,
                    listed.join(", ")
                ),
            );
        }
    }
}
