#![allow(dead_code)]

use std::collections::BTreeMap;

use ragscope_core::model::{
    AuthorType, CategoryValue, Evaluation, ExperimentDetails, ExperimentFile, MetricMeta,
    ModelMeta, Rating, ScaleSpec, Speaker, Task, Turn,
};
use ragscope_core::{augment, AugmentConfig, AugmentedExperiment};

/// Hand-sized experiments for pinning exact expected values.
pub struct Tiny {
    file: ExperimentFile,
}

impl Tiny {
    pub fn new(models: &[&str], n_tasks: usize) -> Self {
        let tasks: Vec<Task> = (1..=n_tasks)
            .map(|i| Task {
                task_id: format!("t-{i:02}"),
                input: vec![Turn {
                    speaker: Speaker::User,
                    text: format!("question number {i}"),
                }],
                contexts: vec![],
                targets: None,
                metadata: BTreeMap::new(),
            })
            .collect();
        let evaluations = tasks
            .iter()
            .flat_map(|t| {
                models.iter().map(move |m| Evaluation {
                    task_id: t.task_id.clone(),
                    model_id: m.to_string(),
                    model_response: format!("{m} answers {}", t.task_id),
                    annotations: BTreeMap::new(),
                })
            })
            .collect();
        Tiny {
            file: ExperimentFile {
                experiment: ExperimentDetails {
                    name: "tiny".into(),
                    description: None,
                    timestamp: None,
                },
                models: models
                    .iter()
                    .map(|m| ModelMeta {
                        model_id: m.to_string(),
                        name: m.to_uppercase(),
                        description: None,
                    })
                    .collect(),
                metrics: vec![],
                documents: vec![],
                tasks,
                evaluations,
            },
        }
    }

    pub fn numeric_metric(mut self, id: &str, author: AuthorType) -> Self {
        self.file.metrics.push(MetricMeta {
            metric_id: id.into(),
            name: id.into(),
            author_type: author,
            scale: ScaleSpec::Numeric { min: 0.0, max: 1.0 },
            higher_is_better: true,
        });
        self
    }

    pub fn categorical_metric(mut self, id: &str, author: AuthorType, labels: &[&str]) -> Self {
        self.file.metrics.push(MetricMeta {
            metric_id: id.into(),
            name: id.into(),
            author_type: author,
            scale: ScaleSpec::Categorical {
                values: labels
                    .iter()
                    .map(|l| CategoryValue {
                        value: l.to_string(),
                        numeric_mapping: None,
                        display: None,
                    })
                    .collect(),
            },
            higher_is_better: true,
        });
        self
    }

    pub fn rate(
        mut self,
        task: usize,
        model: &str,
        metric: &str,
        annotator: &str,
        rating: Rating,
    ) -> Self {
        let task_id = format!("t-{:02}", task + 1);
        let eval = self
            .file
            .evaluations
            .iter_mut()
            .find(|e| e.task_id == task_id && e.model_id == model)
            .expect("evaluation exists");
        eval.annotations
            .entry(metric.to_string())
            .or_default()
            .insert(annotator.to_string(), rating);
        self
    }

    /// One numeric rating per task, in task order.
    pub fn scores(mut self, model: &str, metric: &str, annotator: &str, values: &[f64]) -> Self {
        for (i, v) in values.iter().enumerate() {
            self = self.rate(i, model, metric, annotator, Rating::number(*v));
        }
        self
    }

    /// One categorical rating per task, in task order.
    pub fn labels(mut self, model: &str, metric: &str, annotator: &str, labels: &[&str]) -> Self {
        for (i, l) in labels.iter().enumerate() {
            self = self.rate(i, model, metric, annotator, Rating::label(*l));
        }
        self
    }

    pub fn meta(mut self, task: usize, key: &str, value: &str) -> Self {
        self.file.tasks[task]
            .metadata
            .insert(key.into(), value.into());
        self
    }

    pub fn drop_evaluation(mut self, task: usize, model: &str) -> Self {
        let task_id = format!("t-{:02}", task + 1);
        self.file
            .evaluations
            .retain(|e| !(e.task_id == task_id && e.model_id == model));
        self
    }

    pub fn build(self) -> ExperimentFile {
        self.file
    }

    pub fn augment(self) -> AugmentedExperiment {
        augment(self.file, AugmentConfig::default()).expect("tiny experiment is valid")
    }
}
