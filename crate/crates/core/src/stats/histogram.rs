use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bin {
    Numeric {
        lower: f64,
        upper: f64,
        count: usize,
    },
    Category {
        label: String,
        count: usize,
    },
}

impl Bin {
    pub fn count(&self) -> usize {
        match self {
            Bin::Numeric { count, .. } | Bin::Category { count, .. } => *count,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub bins: Vec<Bin>,
    pub total: usize,
}

impl Histogram {
    pub fn counts(&self) -> Vec<usize> {
        self.bins.iter().map(Bin::count).collect()
    }
}

/// Equal-width bins over `[min, max]`; the last bin includes `max`.
///
/// Values outside the range are clamped into the edge bins.
pub fn numeric_histogram(values: &[f64], n_bins: usize, min: f64, max: f64) -> Result<Histogram> {
    if n_bins < 1 {
        return Err(CoreError::InvalidArgument(
            "n_bins must be at least 1".to_string(),
        ));
    }
    if !(min.is_finite() && max.is_finite() && min < max) {
        return Err(CoreError::InvalidArgument(format!(
            "invalid range [{min}, {max}]"
        )));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(CoreError::InvalidArgument("non-finite value".to_string()));
    }
    let width = (max - min) / n_bins as f64;
    let mut counts = vec![0usize; n_bins];
    for &v in values {
        let idx = ((v - min) / (max - min) * n_bins as f64).floor();
        let idx = if idx < 0.0 {
            0
        } else {
            (idx as usize).min(n_bins - 1)
        };
        counts[idx] += 1;
    }
    let bins = counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| Bin::Numeric {
            lower: min + width * i as f64,
            upper: if i + 1 == n_bins {
                max
            } else {
                min + width * (i + 1) as f64
            },
            count,
        })
        .collect();
    Ok(Histogram {
        bins,
        total: values.len(),
    })
}

/// One bin per declared label, in declared order. Unknown values are ignored.
pub fn categorical_histogram<S: AsRef<str>>(values: &[S], labels: &[S]) -> Histogram {
    let mut counts = vec![0usize; labels.len()];
    for v in values {
        if let Some(i) = labels.iter().position(|l| l.as_ref() == v.as_ref()) {
            counts[i] += 1;
        }
    }
    let total = counts.iter().sum();
    Histogram {
        bins: labels
            .iter()
            .zip(counts)
            .map(|(l, count)| Bin::Category {
                label: l.as_ref().to_string(),
                count,
            })
            .collect(),
        total,
    }
}
