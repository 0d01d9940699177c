use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::model::ExperimentFile;
use crate::stats::{numeric_histogram, Histogram};

/// Bucket for tasks that lack a metadata key other tasks carry.
pub const MISSING_VALUE: &str = "(missing)";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthSummary {
    pub min: usize,
    pub mean: f64,
    pub max: usize,
    pub histogram: Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetCharacteristics {
    pub n_tasks: usize,
    /// metadata key -> value -> task count
    pub metadata: BTreeMap<String, BTreeMap<String, usize>>,
    /// Whitespace tokens in the final user turn.
    pub question_length: Option<LengthSummary>,
}

pub fn compute_dataset_characteristics(file: &ExperimentFile) -> DatasetCharacteristics {
    let keys: BTreeSet<&String> = file.tasks.iter().flat_map(|t| t.metadata.keys()).collect();
    let metadata = keys
        .into_iter()
        .map(|key| {
            let mut counts: BTreeMap<String, usize> = BTreeMap::new();
            for task in &file.tasks {
                let value = task.metadata.get(key).map_or(MISSING_VALUE, String::as_str);
                *counts.entry(value.to_string()).or_insert(0) += 1;
            }
            (key.clone(), counts)
        })
        .collect();

    let lengths: Vec<usize> = file
        .tasks
        .iter()
        .map(|t| t.question().split_whitespace().count())
        .collect();
    let question_length = match (lengths.iter().min(), lengths.iter().max()) {
        (Some(&min), Some(&max)) => {
            let values: Vec<f64> = lengths.iter().map(|&l| l as f64).collect();
            let upper = if max > min {
                max as f64
            } else {
                min as f64 + 1.0
            };
            Some(LengthSummary {
                min,
                mean: values.iter().sum::<f64>() / values.len() as f64,
                max,
                histogram: numeric_histogram(&values, 10, min as f64, upper)
                    .expect("bounds are finite and ordered"),
            })
        }
        _ => None,
    };

    DatasetCharacteristics {
        n_tasks: file.tasks.len(),
        metadata,
        question_length,
    }
}
