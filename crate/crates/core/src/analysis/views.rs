use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::filter::InstanceFilter;
use crate::augment::{
    AugmentedExperiment, CellAggregate, CorrelationMatrix, DatasetCharacteristics,
    ModelMetricAggregate,
};
use crate::error::{CoreError, Result};
use crate::model::{resolve_task, AuthorType, Document, MetricMeta, Rating, ScaleSpec, Task, Turn};
use crate::stats::{
    categorical_histogram, fisher_randomization_test, numeric_histogram, AgreementLevel,
    ComparisonResult, Histogram, RandomizationConfig,
};

pub const DEFAULT_HISTOGRAM_BINS: usize = 10;
pub const DEFAULT_EXTREMES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricType {
    Human,
    /// Every automatic metric, LLM judges included.
    Algorithmic,
    All,
}

impl MetricType {
    pub fn includes(&self, author: AuthorType) -> bool {
        match self {
            MetricType::All => true,
            MetricType::Human => author == AuthorType::Human,
            MetricType::Algorithmic => author != AuthorType::Human,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RadarSeries {
    pub model_id: String,
    /// Aligned with `Overview::metric_ids`; 1 is the best end of the scale.
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Overview {
    pub metric_type: MetricType,
    pub metric_ids: Vec<String>,
    pub rows: Vec<ModelMetricAggregate>,
    pub radar: Vec<RadarSeries>,
}

/// Position of `value` on the metric's scale, flipped so 1 is always best.
fn normalized(metric: &MetricMeta, value: f64) -> f64 {
    let (lo, hi) = metric.scale.mapped_range();
    let x = if hi > lo {
        (value - lo) / (hi - lo)
    } else {
        0.0
    };
    if metric.higher_is_better {
        x
    } else {
        1.0 - x
    }
}

pub fn overview(aug: &AugmentedExperiment, metric_type: MetricType) -> Overview {
    let metrics: Vec<&MetricMeta> = aug
        .experiment
        .metrics
        .iter()
        .filter(|m| metric_type.includes(m.author_type))
        .collect();
    let rows = metrics
        .iter()
        .flat_map(|m| {
            aug.derived
                .model_metric_aggregates
                .iter()
                .filter(|a| a.metric_id == m.metric_id)
                .cloned()
        })
        .collect();
    let radar = aug
        .experiment
        .models
        .iter()
        .map(|model| RadarSeries {
            model_id: model.model_id.clone(),
            values: metrics
                .iter()
                .map(|m| {
                    aug.model_metric(&model.model_id, &m.metric_id)
                        .map(|a| normalized(m, a.mean))
                })
                .collect(),
        })
        .collect();
    Overview {
        metric_type,
        metric_ids: metrics.iter().map(|m| m.metric_id.clone()).collect(),
        rows,
        radar,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortOrder {
    #[default]
    Asc,
    Desc,
}

impl SortOrder {
    fn apply(self, ord: Ordering) -> Ordering {
        match self {
            SortOrder::Asc => ord,
            SortOrder::Desc => ord.reverse(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "by", rename_all = "snake_case")]
pub enum PredictionSort {
    #[default]
    TaskId,
    /// Character count of one model's response.
    ResponseLength { model_id: String },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionResponse {
    pub model_id: String,
    pub model_response: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionRow {
    pub task_id: String,
    pub input: Vec<Turn>,
    pub responses: Vec<PredictionResponse>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredictionsPage {
    pub page: usize,
    pub page_size: usize,
    pub total: usize,
    pub rows: Vec<PredictionRow>,
}

/// One page of the task × model response table. Pages are 1-based; ties in
/// the sort key fall back to ascending task id.
pub fn list_predictions(
    aug: &AugmentedExperiment,
    page: usize,
    page_size: usize,
    sort: &PredictionSort,
    order: SortOrder,
) -> Result<PredictionsPage> {
    if page < 1 || page_size < 1 {
        return Err(CoreError::InvalidArgument(
            "page and page_size start at 1".into(),
        ));
    }
    let file = &aug.experiment;
    let mut tasks: Vec<&Task> = file.tasks.iter().collect();
    match sort {
        PredictionSort::TaskId => {
            tasks.sort_by(|a, b| order.apply(a.task_id.cmp(&b.task_id)));
        }
        PredictionSort::ResponseLength { model_id } => {
            if file.model(model_id).is_none() {
                return Err(CoreError::UnknownModel(model_id.clone()));
            }
            let len = |t: &Task| {
                file.evaluation(&t.task_id, model_id)
                    .map(|e| e.model_response.chars().count())
            };
            tasks.sort_by(|a, b| {
                order
                    .apply(len(a).cmp(&len(b)))
                    .then_with(|| a.task_id.cmp(&b.task_id))
            });
        }
    }
    let total = tasks.len();
    let rows = tasks
        .into_iter()
        .skip((page - 1).saturating_mul(page_size))
        .take(page_size)
        .map(|t| PredictionRow {
            task_id: t.task_id.clone(),
            input: t.input.clone(),
            responses: file
                .models
                .iter()
                .filter_map(|m| file.evaluation(&t.task_id, &m.model_id))
                .map(|e| PredictionResponse {
                    model_id: e.model_id.clone(),
                    model_response: e.model_response.clone(),
                })
                .collect(),
        })
        .collect();
    Ok(PredictionsPage {
        page,
        page_size,
        total,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BehaviorSort {
    #[default]
    TaskId,
    Score,
    Agreement,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BehaviorRow {
    pub task_id: String,
    pub value: f64,
    pub n_annotators: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agreement: Option<AgreementLevel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub majority_value: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelBehavior {
    pub model_id: String,
    pub metric_id: String,
    pub filter: InstanceFilter,
    pub histogram: Histogram,
    pub instances: Vec<BehaviorRow>,
}

/// Declared label a categorical cell is binned under: its majority label,
/// otherwise the label whose mapping is closest to the cell mean.
fn display_label(scale: &ScaleSpec, cell: &CellAggregate) -> Option<String> {
    if let Some(m) = &cell.majority_value {
        return Some(m.clone());
    }
    let labels = scale.labels();
    (0..labels.len())
        .filter_map(|i| scale.mapping_at(i).map(|m| (i, (m - cell.value).abs())))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(i, _)| labels[i].to_string())
}

/// Score histogram and instance table for one model and metric.
pub fn model_behavior(
    aug: &AugmentedExperiment,
    model_id: &str,
    metric_id: &str,
    filter: &InstanceFilter,
    sort: BehaviorSort,
    order: SortOrder,
) -> Result<ModelBehavior> {
    aug.experiment
        .model(model_id)
        .ok_or_else(|| CoreError::UnknownModel(model_id.to_string()))?;
    let metric = aug
        .experiment
        .metric(metric_id)
        .ok_or_else(|| CoreError::UnknownMetric(metric_id.to_string()))?;

    let cells: Vec<&CellAggregate> = aug
        .cells_for(model_id, metric_id)
        .into_iter()
        .filter(|c| filter.matches(aug, &c.task_id, model_id, metric_id))
        .collect();

    let histogram = match &metric.scale {
        ScaleSpec::Categorical { .. } => {
            let labels: Vec<String> = metric
                .scale
                .labels()
                .into_iter()
                .map(String::from)
                .collect();
            let values: Vec<String> = cells
                .iter()
                .filter_map(|c| display_label(&metric.scale, c))
                .collect();
            categorical_histogram(&values, &labels)
        }
        ScaleSpec::Numeric { min, max } => {
            let values: Vec<f64> = cells.iter().map(|c| c.value).collect();
            numeric_histogram(&values, DEFAULT_HISTOGRAM_BINS, *min, *max)?
        }
    };

    let mut instances: Vec<BehaviorRow> = cells
        .iter()
        .map(|c| BehaviorRow {
            task_id: c.task_id.clone(),
            value: c.value,
            n_annotators: c.n_annotators,
            agreement: c.agreement,
            majority_value: c.majority_value.clone(),
        })
        .collect();
    instances.sort_by(|a, b| {
        let primary = match sort {
            BehaviorSort::TaskId => a.task_id.cmp(&b.task_id),
            BehaviorSort::Score => a.value.total_cmp(&b.value),
            BehaviorSort::Agreement => a.agreement.cmp(&b.agreement),
        };
        order.apply(primary).then_with(|| a.task_id.cmp(&b.task_id))
    });

    Ok(ModelBehavior {
        model_id: model_id.to_string(),
        metric_id: metric_id.to_string(),
        filter: filter.clone(),
        histogram,
        instances,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricEntry {
    pub metric_id: String,
    pub value: f64,
    pub n_annotators: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agreement: Option<AgreementLevel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub majority_value: Option<String>,
    pub ratings: BTreeMap<String, Rating>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelDetail {
    pub model_id: String,
    pub model_response: String,
    pub metrics: Vec<MetricEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceDetail {
    pub task: Task,
    pub documents: Vec<Document>,
    pub models: Vec<ModelDetail>,
}

pub fn instance_detail(aug: &AugmentedExperiment, task_id: &str) -> Result<InstanceDetail> {
    let resolved = resolve_task(&aug.experiment, task_id)?;
    let models = resolved
        .responses
        .into_iter()
        .map(|r| {
            let metrics = aug
                .experiment
                .metrics
                .iter()
                .filter_map(|m| {
                    let cell = aug.cell(task_id, &r.model_id, &m.metric_id)?;
                    Some(MetricEntry {
                        metric_id: m.metric_id.clone(),
                        value: cell.value,
                        n_annotators: cell.n_annotators,
                        agreement: cell.agreement,
                        majority_value: cell.majority_value.clone(),
                        ratings: r.annotations.get(&m.metric_id).cloned().unwrap_or_default(),
                    })
                })
                .collect();
            ModelDetail {
                model_id: r.model_id,
                model_response: r.model_response,
                metrics,
            }
        })
        .collect();
    Ok(InstanceDetail {
        task: resolved.task,
        documents: resolved.documents,
        models,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareConfig {
    pub randomization: RandomizationConfig,
    /// How many instances to list as most similar and most dissimilar.
    pub extremes: usize,
}

impl Default for CompareConfig {
    fn default() -> Self {
        CompareConfig {
            randomization: RandomizationConfig::default(),
            extremes: DEFAULT_EXTREMES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScatterPoint {
    pub task_id: String,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceDiff {
    pub task_id: String,
    pub a: f64,
    pub b: f64,
    pub abs_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelComparison {
    pub model_a: String,
    pub model_b: String,
    pub metric_id: String,
    pub points: Vec<ScatterPoint>,
    pub result: ComparisonResult,
    pub similar: Vec<InstanceDiff>,
    pub dissimilar: Vec<InstanceDiff>,
}

/// Paired comparison of two models on one metric over their shared instances.
pub fn compare_models(
    aug: &AugmentedExperiment,
    model_a: &str,
    model_b: &str,
    metric_id: &str,
    config: &CompareConfig,
) -> Result<ModelComparison> {
    for m in [model_a, model_b] {
        aug.experiment
            .model(m)
            .ok_or_else(|| CoreError::UnknownModel(m.to_string()))?;
    }
    aug.experiment
        .metric(metric_id)
        .ok_or_else(|| CoreError::UnknownMetric(metric_id.to_string()))?;

    let points: Vec<ScatterPoint> = aug
        .experiment
        .tasks
        .iter()
        .filter_map(|t| {
            let a = aug.cell(&t.task_id, model_a, metric_id)?;
            let b = aug.cell(&t.task_id, model_b, metric_id)?;
            Some(ScatterPoint {
                task_id: t.task_id.clone(),
                a: a.value,
                b: b.value,
            })
        })
        .collect();
    if points.len() < 2 {
        return Err(CoreError::TooFew {
            needed: 2,
            got: points.len(),
        });
    }
    let a: Vec<f64> = points.iter().map(|p| p.a).collect();
    let b: Vec<f64> = points.iter().map(|p| p.b).collect();
    let result = fisher_randomization_test(&a, &b, &config.randomization)?;

    let mut diffs: Vec<InstanceDiff> = points
        .iter()
        .map(|p| InstanceDiff {
            task_id: p.task_id.clone(),
            a: p.a,
            b: p.b,
            abs_diff: (p.a - p.b).abs(),
        })
        .collect();
    diffs.sort_by(|x, y| {
        x.abs_diff
            .total_cmp(&y.abs_diff)
            .then_with(|| x.task_id.cmp(&y.task_id))
    });
    let similar = diffs.iter().take(config.extremes).cloned().collect();
    diffs.sort_by(|x, y| {
        y.abs_diff
            .total_cmp(&x.abs_diff)
            .then_with(|| x.task_id.cmp(&y.task_id))
    });
    let dissimilar = diffs.into_iter().take(config.extremes).collect();

    Ok(ModelComparison {
        model_a: model_a.to_string(),
        model_b: model_b.to_string(),
        metric_id: metric_id.to_string(),
        points,
        result,
        similar,
        dissimilar,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricBehavior {
    pub metric_names: Vec<String>,
    #[serde(flatten)]
    pub correlations: CorrelationMatrix,
}

pub fn metric_behavior(aug: &AugmentedExperiment) -> Result<MetricBehavior> {
    if aug.experiment.metrics.len() < 2 {
        return Err(CoreError::TooFew {
            needed: 2,
            got: aug.experiment.metrics.len(),
        });
    }
    Ok(MetricBehavior {
        metric_names: aug
            .experiment
            .metrics
            .iter()
            .map(|m| m.name.clone())
            .collect(),
        correlations: aug.derived.metric_correlations.clone(),
    })
}

pub fn dataset_view(aug: &AugmentedExperiment) -> DatasetCharacteristics {
    aug.derived.dataset_characteristics.clone()
}
