use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::ExperimentFile;
use crate::stats::{majority_label, pairwise_kappa_matrix, KappaMatrix};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct KappaMatrices {
    /// All human metrics pooled; each cell is one (metric, task, model) triple.
    pub global: Option<KappaMatrix>,
    pub per_metric: BTreeMap<String, KappaMatrix>,
    /// model_id -> metric_id -> matrix
    pub per_model_metric: BTreeMap<String, BTreeMap<String, KappaMatrix>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatorProfile {
    pub annotator_id: String,
    pub n_ratings: usize,
    /// Share of strict-majority cells where this annotator matched the majority.
    pub contribution: Option<f64>,
    pub n_majority_cells: usize,
    pub mean_pairwise_kappa: Option<f64>,
    pub mean_duration_seconds: Option<f64>,
    pub median_duration_seconds: Option<f64>,
}

type Cells = BTreeMap<String, BTreeMap<String, String>>;

/// annotator -> cell -> label for human ratings passing `keep(model, metric)`.
fn human_cells(file: &ExperimentFile, keep: impl Fn(&str, &str) -> bool, pooled: bool) -> Cells {
    let mut cells: Cells = BTreeMap::new();
    for eval in &file.evaluations {
        for metric in file.metrics.iter().filter(|m| m.is_human()) {
            if !keep(&eval.model_id, &metric.metric_id) {
                continue;
            }
            let Some(ratings) = eval.annotations.get(&metric.metric_id) else {
                continue;
            };
            for (annotator, rating) in ratings {
                let (cell, label) = if pooled {
                    (
                        format!(
                            "{}\u{1f}{}\u{1f}{}",
                            metric.metric_id, eval.task_id, eval.model_id
                        ),
                        format!("{}\u{1f}{}", metric.metric_id, rating.value.key()),
                    )
                } else {
                    (
                        format!("{}\u{1f}{}", eval.task_id, eval.model_id),
                        rating.value.key(),
                    )
                };
                cells
                    .entry(annotator.clone())
                    .or_default()
                    .insert(cell, label);
            }
        }
    }
    cells
}

fn matrix(cells: &Cells) -> Result<Option<KappaMatrix>> {
    if cells.len() < 2 {
        return Ok(None);
    }
    pairwise_kappa_matrix(cells).map(Some)
}

pub(super) fn kappa_matrices(file: &ExperimentFile) -> Result<KappaMatrices> {
    let mut out = KappaMatrices {
        global: matrix(&human_cells(file, |_, _| true, true))?,
        ..Default::default()
    };
    for metric in file.metrics.iter().filter(|m| m.is_human()) {
        let id = metric.metric_id.as_str();
        if let Some(m) = matrix(&human_cells(file, |_, x| x == id, false))? {
            out.per_metric.insert(id.to_string(), m);
        }
        for model in &file.models {
            let mid = model.model_id.as_str();
            if let Some(m) = matrix(&human_cells(file, |mo, x| mo == mid && x == id, false))? {
                out.per_model_metric
                    .entry(mid.to_string())
                    .or_default()
                    .insert(id.to_string(), m);
            }
        }
    }
    Ok(out)
}

fn median(sorted: &[f64]) -> Option<f64> {
    let n = sorted.len();
    match n {
        0 => None,
        _ if n % 2 == 1 => Some(sorted[n / 2]),
        _ => Some((sorted[n / 2 - 1] + sorted[n / 2]) / 2.0),
    }
}

pub(super) fn annotator_profiles(
    file: &ExperimentFile,
    global: Option<&KappaMatrix>,
) -> Result<Vec<AnnotatorProfile>> {
    #[derive(Default)]
    struct Tally {
        n_ratings: usize,
        majority_cells: usize,
        agreed: usize,
        durations: Vec<f64>,
    }
    let mut tallies: BTreeMap<&str, Tally> = BTreeMap::new();

    for eval in &file.evaluations {
        for metric in file.metrics.iter().filter(|m| m.is_human()) {
            let Some(ratings) = eval.annotations.get(&metric.metric_id) else {
                continue;
            };
            let labels: Vec<String> = ratings.values().map(|r| r.value.key()).collect();
            let majority = if labels.len() >= 2 {
                majority_label(&labels)?
            } else {
                None
            };
            for (annotator, rating) in ratings {
                let t = tallies.entry(annotator.as_str()).or_default();
                t.n_ratings += 1;
                if let Some(d) = rating.duration_seconds {
                    t.durations.push(d);
                }
                if let Some(m) = &majority {
                    t.majority_cells += 1;
                    if rating.value.key() == *m {
                        t.agreed += 1;
                    }
                }
            }
        }
    }

    Ok(tallies
        .into_iter()
        .map(|(id, mut t)| {
            t.durations.sort_by(f64::total_cmp);
            let mean_pairwise_kappa = global.and_then(|g| {
                g.annotators
                    .iter()
                    .position(|a| a == id)
                    .and_then(|i| g.mean_off_diagonal(i))
            });
            AnnotatorProfile {
                annotator_id: id.to_string(),
                n_ratings: t.n_ratings,
                contribution: (t.majority_cells > 0)
                    .then(|| t.agreed as f64 / t.majority_cells as f64),
                n_majority_cells: t.majority_cells,
                mean_pairwise_kappa,
                mean_duration_seconds: (!t.durations.is_empty())
                    .then(|| t.durations.iter().sum::<f64>() / t.durations.len() as f64),
                median_duration_seconds: median(&t.durations),
            }
        })
        .collect())
}
