use serde::Serialize;

use super::types::{Annotations, Document, ExperimentFile, Task};
use crate::error::{CoreError, Result};

/// A task with everything needed to inspect it in isolation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolvedTask {
    pub task: Task,
    /// Context documents in the order the task lists them.
    pub documents: Vec<Document>,
    pub responses: Vec<ModelResponse>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelResponse {
    pub model_id: String,
    pub model_response: String,
    pub annotations: Annotations,
}

/// Collects a task's documents, responses and scores.
///
/// Responses follow the declaration order of `models`.
pub fn resolve_task(file: &ExperimentFile, task_id: &str) -> Result<ResolvedTask> {
    let task = file
        .task(task_id)
        .ok_or_else(|| CoreError::UnknownTask(task_id.to_string()))?;
    let documents = task
        .contexts
        .iter()
        .filter_map(|id| file.document(id).cloned())
        .collect();
    let responses = file
        .models
        .iter()
        .filter_map(|m| file.evaluation(task_id, &m.model_id))
        .map(|e| ModelResponse {
            model_id: e.model_id.clone(),
            model_response: e.model_response.clone(),
            annotations: e.annotations.clone(),
        })
        .collect();
    Ok(ResolvedTask {
        task: task.clone(),
        documents,
        responses,
    })
}
