use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::augment::AugmentedExperiment;
use crate::error::{CoreError, Result};
use crate::stats::AgreementLevel;

/// One condition on an instance. An instance is a (task, model) pair seen
/// through the metric of the current view.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Predicate {
    Metadata {
        key: String,
        value: String,
    },
    /// Inclusive score range. `model_id` defaults to the viewed model.
    Score {
        #[serde(default)]
        model_id: Option<String>,
        metric_id: String,
        lo: f64,
        hi: f64,
    },
    /// `metric_id` defaults to the viewed metric.
    Agreement {
        #[serde(default)]
        metric_id: Option<String>,
        levels: BTreeSet<AgreementLevel>,
    },
    Models {
        model_ids: BTreeSet<String>,
    },
}

/// Conjunction of predicates; the empty filter matches everything.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct InstanceFilter {
    predicates: Vec<Predicate>,
}

impl InstanceFilter {
    /// Builds a filter, rejecting keys and ids the experiment does not declare.
    pub fn new(aug: &AugmentedExperiment, predicates: Vec<Predicate>) -> Result<Self> {
        let file = &aug.experiment;
        let check_model = |id: &str| {
            file.model(id)
                .map(|_| ())
                .ok_or_else(|| CoreError::UnknownModel(id.to_string()))
        };
        let check_metric = |id: &str| {
            file.metric(id)
                .map(|_| ())
                .ok_or_else(|| CoreError::UnknownMetric(id.to_string()))
        };
        for p in &predicates {
            match p {
                Predicate::Metadata { key, .. } => {
                    if !file.tasks.iter().any(|t| t.metadata.contains_key(key)) {
                        return Err(CoreError::UnknownMetadataKey(key.clone()));
                    }
                }
                Predicate::Score {
                    model_id,
                    metric_id,
                    lo,
                    hi,
                } => {
                    if let Some(m) = model_id {
                        check_model(m)?;
                    }
                    check_metric(metric_id)?;
                    if lo.is_nan() || hi.is_nan() {
                        return Err(CoreError::InvalidArgument(
                            "score bounds must be numbers".into(),
                        ));
                    }
                }
                Predicate::Agreement { metric_id, .. } => {
                    if let Some(m) = metric_id {
                        check_metric(m)?;
                    }
                }
                Predicate::Models { model_ids } => {
                    for m in model_ids {
                        check_model(m)?;
                    }
                }
            }
        }
        Ok(InstanceFilter { predicates })
    }

    pub fn predicates(&self) -> &[Predicate] {
        &self.predicates
    }

    pub fn matches(
        &self,
        aug: &AugmentedExperiment,
        task_id: &str,
        model_id: &str,
        metric_id: &str,
    ) -> bool {
        let Some(task) = aug.experiment.task(task_id) else {
            return false;
        };
        self.predicates.iter().all(|p| match p {
            Predicate::Metadata { key, value } => task.metadata.get(key) == Some(value),
            Predicate::Score {
                model_id: m,
                metric_id: x,
                lo,
                hi,
            } => aug
                .cell(task_id, m.as_deref().unwrap_or(model_id), x)
                .is_some_and(|c| c.value >= *lo && c.value <= *hi),
            Predicate::Agreement {
                metric_id: x,
                levels,
            } => aug
                .cell(task_id, model_id, x.as_deref().unwrap_or(metric_id))
                .and_then(|c| c.agreement)
                .is_some_and(|l| levels.contains(&l)),
            Predicate::Models { model_ids } => model_ids.contains(model_id),
        })
    }
}
