//! One-time derivation of every statistic the views need.
//!
//! [`augment`] validates the experiment, then computes per-cell aggregates,
//! per-model aggregates and ranks, kappa matrices, annotator profiles, the
//! metric correlation matrix and dataset characteristics. The result is
//! immutable; views only read it.

mod annotators;
mod dataset;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::model::{validate, ExperimentFile, Issue, MetricMeta};
use crate::stats::{
    aggregate_numeric, agreement_level, majority_label, spearman, AgreementCounts, AgreementLevel,
    RandomizationConfig,
};

pub use annotators::{AnnotatorProfile, KappaMatrices};
pub use dataset::{compute_dataset_characteristics, DatasetCharacteristics, LengthSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentConfig {
    /// Seed for any randomized statistic; also the default for comparisons.
    pub seed: u64,
    pub iterations: usize,
    pub exhaustive_threshold: usize,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        let r = RandomizationConfig::default();
        AugmentConfig {
            seed: r.seed,
            iterations: r.iterations,
            exhaustive_threshold: r.exhaustive_threshold,
        }
    }
}

impl AugmentConfig {
    pub fn randomization(&self) -> RandomizationConfig {
        RandomizationConfig {
            iterations: self.iterations,
            seed: self.seed,
            exhaustive_threshold: self.exhaustive_threshold,
        }
    }
}

/// Aggregate of all ratings one evaluation received for one metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellAggregate {
    pub task_id: String,
    pub model_id: String,
    pub metric_id: String,
    /// Mean of the numeric-mapped ratings.
    pub value: f64,
    pub n_annotators: usize,
    /// Human metrics with at least two annotators only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agreement: Option<AgreementLevel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub majority_value: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMetricAggregate {
    pub model_id: String,
    pub metric_id: String,
    pub mean: f64,
    /// Spread of per-instance values across the dataset.
    pub std: f64,
    pub n_instances: usize,
    pub rank: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agreement_distribution: Option<AgreementCounts>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEntry {
    /// `None` when undefined (a constant side, or fewer than two pairs).
    pub rho: Option<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub metric_ids: Vec<String>,
    pub entries: Vec<Vec<CorrelationEntry>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<CorrelationEntry> {
        let i = self.metric_ids.iter().position(|m| m == a)?;
        let j = self.metric_ids.iter().position(|m| m == b)?;
        Some(self.entries[i][j])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Derived {
    pub config: AugmentConfig,
    pub validation_warnings: Vec<Issue>,
    pub cell_aggregates: Vec<CellAggregate>,
    pub model_metric_aggregates: Vec<ModelMetricAggregate>,
    pub kappa_matrices: KappaMatrices,
    pub annotator_profiles: Vec<AnnotatorProfile>,
    pub metric_correlations: CorrelationMatrix,
    pub dataset_characteristics: DatasetCharacteristics,
}

/// An experiment together with its derived statistics.
///
/// Serializes as the experiment document plus a top-level `derived` section.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AugmentedExperiment {
    #[serde(flatten)]
    pub experiment: ExperimentFile,
    pub derived: Derived,
    #[serde(skip)]
    cell_index: BTreeMap<(String, String, String), usize>,
}

impl AugmentedExperiment {
    pub fn cell(&self, task_id: &str, model_id: &str, metric_id: &str) -> Option<&CellAggregate> {
        self.cell_index
            .get(&(
                task_id.to_string(),
                model_id.to_string(),
                metric_id.to_string(),
            ))
            .map(|&i| &self.derived.cell_aggregates[i])
    }

    pub fn model_metric(&self, model_id: &str, metric_id: &str) -> Option<&ModelMetricAggregate> {
        self.derived
            .model_metric_aggregates
            .iter()
            .find(|a| a.model_id == model_id && a.metric_id == metric_id)
    }

    /// Cells of one model and metric, in task declaration order.
    pub fn cells_for(&self, model_id: &str, metric_id: &str) -> Vec<&CellAggregate> {
        self.experiment
            .tasks
            .iter()
            .filter_map(|t| self.cell(&t.task_id, model_id, metric_id))
            .collect()
    }

    pub fn human_metrics(&self) -> impl Iterator<Item = &MetricMeta> {
        self.experiment.metrics.iter().filter(|m| m.is_human())
    }
}

/// Validates `file` and derives all statistics from it.
pub fn augment(file: ExperimentFile, config: AugmentConfig) -> Result<AugmentedExperiment> {
    let report = validate(&file);
    if !report.is_valid() {
        return Err(CoreError::Invalid(report));
    }

    let cell_aggregates = cell_aggregates(&file)?;
    let cell_index = cell_aggregates
        .iter()
        .enumerate()
        .map(|(i, c)| {
            (
                (c.task_id.clone(), c.model_id.clone(), c.metric_id.clone()),
                i,
            )
        })
        .collect();
    let model_metric_aggregates = model_metric_aggregates(&file, &cell_aggregates)?;
    let kappa_matrices = annotators::kappa_matrices(&file)?;
    let annotator_profiles = annotators::annotator_profiles(&file, kappa_matrices.global.as_ref())?;
    let metric_correlations = metric_correlations(&file, &cell_aggregates)?;
    let dataset_characteristics = compute_dataset_characteristics(&file);

    Ok(AugmentedExperiment {
        derived: Derived {
            config,
            validation_warnings: report.warnings,
            cell_aggregates,
            model_metric_aggregates,
            kappa_matrices,
            annotator_profiles,
            metric_correlations,
            dataset_characteristics,
        },
        experiment: file,
        cell_index,
    })
}

fn cell_aggregates(file: &ExperimentFile) -> Result<Vec<CellAggregate>> {
    let mut cells = Vec::new();
    for eval in &file.evaluations {
        for metric in &file.metrics {
            let Some(ratings) = eval.annotations.get(&metric.metric_id) else {
                continue;
            };
            let mapped: Vec<f64> = ratings
                .values()
                .map(|r| metric.scale.map_value(&r.value).expect("validated rating"))
                .collect();
            let summary = aggregate_numeric(&mapped)?;
            let labels: Vec<String> = ratings.values().map(|r| r.value.key()).collect();
            let agreement = if metric.is_human() && labels.len() >= 2 {
                Some(agreement_level(&labels)?)
            } else {
                None
            };
            let majority_value = if metric.scale.is_categorical() {
                majority_label(&labels)?
            } else {
                None
            };
            cells.push(CellAggregate {
                task_id: eval.task_id.clone(),
                model_id: eval.model_id.clone(),
                metric_id: metric.metric_id.clone(),
                value: summary.mean,
                n_annotators: summary.n,
                agreement,
                majority_value,
            });
        }
    }
    Ok(cells)
}

/// Competition ranks: ties share the smaller rank ("1, 1, 3").
pub(crate) fn competition_ranks(means: &[f64], higher_is_better: bool) -> Vec<usize> {
    means
        .iter()
        .map(|m| {
            1 + means
                .iter()
                .filter(|o| if higher_is_better { *o > m } else { *o < m })
                .count()
        })
        .collect()
}

fn model_metric_aggregates(
    file: &ExperimentFile,
    cells: &[CellAggregate],
) -> Result<Vec<ModelMetricAggregate>> {
    let mut out = Vec::new();
    for metric in &file.metrics {
        let mut rows = Vec::new();
        for model in &file.models {
            let model_cells: Vec<&CellAggregate> = cells
                .iter()
                .filter(|c| c.model_id == model.model_id && c.metric_id == metric.metric_id)
                .collect();
            if model_cells.is_empty() {
                continue;
            }
            let values: Vec<f64> = model_cells.iter().map(|c| c.value).collect();
            let summary = aggregate_numeric(&values)?;
            let agreement_distribution = metric.is_human().then(|| {
                let mut counts = AgreementCounts::default();
                model_cells
                    .iter()
                    .filter_map(|c| c.agreement)
                    .for_each(|l| counts.add(l));
                counts
            });
            rows.push(ModelMetricAggregate {
                model_id: model.model_id.clone(),
                metric_id: metric.metric_id.clone(),
                mean: summary.mean,
                std: summary.std,
                n_instances: summary.n,
                rank: 0,
                agreement_distribution,
            });
        }
        let means: Vec<f64> = rows.iter().map(|r| r.mean).collect();
        for (row, rank) in rows
            .iter_mut()
            .zip(competition_ranks(&means, metric.higher_is_better))
        {
            row.rank = rank;
        }
        out.extend(rows);
    }
    Ok(out)
}

fn metric_correlations(
    file: &ExperimentFile,
    cells: &[CellAggregate],
) -> Result<CorrelationMatrix> {
    let per_metric: Vec<BTreeMap<(&str, &str), f64>> = file
        .metrics
        .iter()
        .map(|m| {
            cells
                .iter()
                .filter(|c| c.metric_id == m.metric_id)
                .map(|c| ((c.task_id.as_str(), c.model_id.as_str()), c.value))
                .collect()
        })
        .collect();
    let k = file.metrics.len();
    let mut entries = vec![vec![CorrelationEntry { rho: None, n: 0 }; k]; k];
    for i in 0..k {
        for j in i..k {
            let (x, y): (Vec<f64>, Vec<f64>) = per_metric[i]
                .iter()
                .filter_map(|(key, a)| per_metric[j].get(key).map(|b| (*a, *b)))
                .unzip();
            let rho = if x.len() >= 2 {
                spearman(&x, &y)?
            } else {
                None
            };
            let entry = CorrelationEntry { rho, n: x.len() };
            entries[i][j] = entry;
            entries[j][i] = entry;
        }
    }
    Ok(CorrelationMatrix {
        metric_ids: file.metrics.iter().map(|m| m.metric_id.clone()).collect(),
        entries,
    })
}
