use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgreementLevel {
    Unanimous,
    Majority,
    Split,
}

impl AgreementLevel {
    pub const ALL: [AgreementLevel; 3] = [
        AgreementLevel::Unanimous,
        AgreementLevel::Majority,
        AgreementLevel::Split,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            AgreementLevel::Unanimous => "unanimous",
            AgreementLevel::Majority => "majority",
            AgreementLevel::Split => "split",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|l| l.as_str() == s)
    }
}

/// Tally of cells per agreement level.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementCounts {
    pub unanimous: usize,
    pub majority: usize,
    pub split: usize,
}

impl AgreementCounts {
    pub fn add(&mut self, level: AgreementLevel) {
        match level {
            AgreementLevel::Unanimous => self.unanimous += 1,
            AgreementLevel::Majority => self.majority += 1,
            AgreementLevel::Split => self.split += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.unanimous + self.majority + self.split
    }
}

fn tally<T: Ord + Clone>(labels: &[T]) -> BTreeMap<T, usize> {
    let mut counts = BTreeMap::new();
    for l in labels {
        *counts.entry(l.clone()).or_insert(0) += 1;
    }
    counts
}

/// The label held by strictly more than half of `labels`, if any.
pub fn majority_label<T: Ord + Clone>(labels: &[T]) -> Result<Option<T>> {
    if labels.is_empty() {
        return Err(CoreError::EmptyInput);
    }
    let n = labels.len();
    Ok(tally(labels)
        .into_iter()
        .find(|(_, c)| 2 * c > n)
        .map(|(l, _)| l))
}

pub fn agreement_level<T: Ord + Clone>(labels: &[T]) -> Result<AgreementLevel> {
    if labels.is_empty() {
        return Err(CoreError::EmptyInput);
    }
    let counts = tally(labels);
    Ok(if counts.len() == 1 {
        AgreementLevel::Unanimous
    } else if counts.values().any(|c| 2 * c > labels.len()) {
        AgreementLevel::Majority
    } else {
        AgreementLevel::Split
    })
}
