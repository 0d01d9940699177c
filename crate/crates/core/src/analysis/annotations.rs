use std::collections::BTreeMap;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::augment::AugmentedExperiment;
use crate::error::{CoreError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnnotationKind {
    Flag,
    Comment,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceAnnotation {
    pub task_id: String,
    pub kind: AnnotationKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author: Option<String>,
    pub created_at: DateTime<Utc>,
}

/// Flags and comments made during one session. Never written back into the
/// experiment.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct AnnotationStore {
    by_task: BTreeMap<String, Vec<InstanceAnnotation>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationExport {
    pub experiment: String,
    pub annotations: BTreeMap<String, Vec<InstanceAnnotation>>,
}

impl AnnotationStore {
    pub fn annotate(
        &mut self,
        aug: &AugmentedExperiment,
        annotation: InstanceAnnotation,
    ) -> Result<()> {
        if aug.experiment.task(&annotation.task_id).is_none() {
            return Err(CoreError::UnknownTask(annotation.task_id));
        }
        if annotation.kind == AnnotationKind::Comment
            && annotation
                .text
                .as_deref()
                .is_none_or(|t| t.trim().is_empty())
        {
            return Err(CoreError::InvalidArgument(
                "a comment needs non-empty text".into(),
            ));
        }
        self.by_task
            .entry(annotation.task_id.clone())
            .or_default()
            .push(annotation);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.by_task.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_task.is_empty()
    }

    pub fn export(&self, aug: &AugmentedExperiment) -> AnnotationExport {
        AnnotationExport {
            experiment: aug.experiment.experiment.name.clone(),
            annotations: self.by_task.clone(),
        }
    }
}
