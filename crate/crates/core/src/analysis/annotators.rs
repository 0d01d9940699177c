use std::collections::BTreeMap;

use serde::Serialize;

use crate::augment::{AnnotatorProfile, AugmentedExperiment, KappaMatrices};
use crate::stats::AgreementCounts;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnotatorReport {
    /// Set when no human metric has a cell rated by two or more annotators.
    pub empty: bool,
    /// Agreement levels per model across all instances and human metrics.
    pub per_model_agreement: BTreeMap<String, AgreementCounts>,
    pub kappa: KappaMatrices,
    pub profiles: Vec<AnnotatorProfile>,
}

pub fn annotator_report(aug: &AugmentedExperiment) -> AnnotatorReport {
    let human: Vec<&str> = aug.human_metrics().map(|m| m.metric_id.as_str()).collect();
    let has_agreement = aug
        .derived
        .cell_aggregates
        .iter()
        .any(|c| c.agreement.is_some() && human.contains(&c.metric_id.as_str()));
    if !has_agreement {
        return AnnotatorReport {
            empty: true,
            per_model_agreement: BTreeMap::new(),
            kappa: KappaMatrices::default(),
            profiles: Vec::new(),
        };
    }

    let per_model_agreement = aug
        .experiment
        .models
        .iter()
        .map(|m| {
            let mut counts = AgreementCounts::default();
            aug.derived
                .cell_aggregates
                .iter()
                .filter(|c| c.model_id == m.model_id)
                .filter_map(|c| c.agreement)
                .for_each(|l| counts.add(l));
            (m.model_id.clone(), counts)
        })
        .collect();

    AnnotatorReport {
        empty: false,
        per_model_agreement,
        kappa: aug.derived.kappa_matrices.clone(),
        profiles: aug.derived.annotator_profiles.clone(),
    }
}
