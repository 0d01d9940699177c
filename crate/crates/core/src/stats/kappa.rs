use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Below this, `1 - p_e` is treated as zero and kappa is defined as 1.
pub const KAPPA_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaResult {
    pub kappa: f64,
    pub observed_agreement: f64,
    pub expected_agreement: f64,
    pub n_items: usize,
}

/// Cohen's kappa between two raters over the same items.
///
/// Items missing a rating on either side must be dropped by the caller.
pub fn cohens_kappa<T: Ord>(
    ratings_a: &[T],
    ratings_b: &[T],
    categories: &[T],
) -> Result<KappaResult> {
    if ratings_a.len() != ratings_b.len() {
        return Err(CoreError::LengthMismatch {
            left: ratings_a.len(),
            right: ratings_b.len(),
        });
    }
    if ratings_a.is_empty() {
        return Err(CoreError::EmptyInput);
    }
    let n = ratings_a.len() as f64;

    let mut marginal_a: BTreeMap<&T, usize> = categories.iter().map(|c| (c, 0)).collect();
    let mut marginal_b = marginal_a.clone();
    let mut agree = 0usize;
    for (a, b) in ratings_a.iter().zip(ratings_b) {
        match (marginal_a.get_mut(a), marginal_b.get_mut(b)) {
            (Some(ca), Some(cb)) => {
                *ca += 1;
                *cb += 1;
            }
            _ => {
                return Err(CoreError::InvalidArgument(
                    "rating outside the declared categories".to_string(),
                ))
            }
        }
        if a == b {
            agree += 1;
        }
    }

    let p_o = agree as f64 / n;
    let p_e: f64 = marginal_a
        .iter()
        .map(|(c, &ca)| (ca as f64 / n) * (marginal_b[c] as f64 / n))
        .sum();
    let kappa = if 1.0 - p_e < KAPPA_EPSILON {
        1.0
    } else {
        ((p_o - p_e) / (1.0 - p_e)).clamp(-1.0, 1.0)
    };
    Ok(KappaResult {
        kappa,
        observed_agreement: p_o,
        expected_agreement: p_e,
        n_items: ratings_a.len(),
    })
}

/// Symmetric annotator × annotator kappa table.
///
/// `entries[i][j]` is `None` when annotators `i` and `j` share no rated cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaMatrix {
    pub annotators: Vec<String>,
    pub entries: Vec<Vec<Option<KappaResult>>>,
}

impl KappaMatrix {
    /// Mean kappa of one annotator against every other annotator it overlaps with.
    pub fn mean_off_diagonal(&self, index: usize) -> Option<f64> {
        let others: Vec<f64> = self.entries[index]
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != index)
            .filter_map(|(_, e)| e.map(|k| k.kappa))
            .collect();
        (!others.is_empty()).then(|| others.iter().sum::<f64>() / others.len() as f64)
    }

    pub fn get(&self, a: &str, b: &str) -> Option<KappaResult> {
        let i = self.annotators.iter().position(|x| x == a)?;
        let j = self.annotators.iter().position(|x| x == b)?;
        self.entries[i][j]
    }
}

/// Pairwise kappa over `annotator -> cell -> label`.
///
/// Each pair is scored on the cells both annotators rated; categories are
/// the union of all labels seen.
pub fn pairwise_kappa_matrix(
    cells: &BTreeMap<String, BTreeMap<String, String>>,
) -> Result<KappaMatrix> {
    if cells.len() < 2 {
        return Err(CoreError::TooFew {
            needed: 2,
            got: cells.len(),
        });
    }
    let categories: Vec<&String> = cells
        .values()
        .flat_map(|m| m.values())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let annotators: Vec<&String> = cells.keys().collect();
    let k = annotators.len();
    let mut entries = vec![vec![None; k]; k];

    for i in 0..k {
        let own = &cells[annotators[i]];
        let labels: Vec<&String> = own.values().collect();
        entries[i][i] = Some(match cohens_kappa(&labels, &labels, &categories) {
            Ok(r) => KappaResult { kappa: 1.0, ..r },
            Err(_) => KappaResult {
                kappa: 1.0,
                observed_agreement: 1.0,
                expected_agreement: 0.0,
                n_items: 0,
            },
        });
        for j in (i + 1)..k {
            let other = &cells[annotators[j]];
            let (a, b): (Vec<&String>, Vec<&String>) = own
                .iter()
                .filter_map(|(cell, la)| other.get(cell).map(|lb| (la, lb)))
                .unzip();
            if a.is_empty() {
                continue;
            }
            let result = cohens_kappa(&a, &b, &categories)?;
            entries[i][j] = Some(result);
            entries[j][i] = Some(result);
        }
    }

    Ok(KappaMatrix {
        annotators: annotators.into_iter().cloned().collect(),
        entries,
    })
}
