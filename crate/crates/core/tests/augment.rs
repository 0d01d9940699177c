mod common;

use std::collections::BTreeMap;

use common::Tiny;
use proptest::prelude::*;
use ragscope_core::augment::compute_dataset_characteristics;
use ragscope_core::model::{to_document, AuthorType, ErrorCode};
use ragscope_core::stats::AgreementLevel;
use ragscope_core::synth::{
    planted_fixture, standard_fixture, NOISY_ANNOTATOR, VERBOSE_LOSER, WIN_RATE,
};
use ragscope_core::{augment, AugmentConfig, CoreError, ExperimentFile};

fn fixture() -> ragscope_core::AugmentedExperiment {
    augment(standard_fixture(), AugmentConfig::default()).unwrap()
}

#[test]
fn fixture_counts() {
    let aug = fixture();
    let human = aug
        .derived
        .cell_aggregates
        .iter()
        .filter(|c| aug.experiment.metric(&c.metric_id).unwrap().is_human())
        .count();
    let total = aug.derived.cell_aggregates.len();
    // one aggregate per (evaluation, metric): 60 evaluations x 2 metrics each
    assert_eq!((human, total - human), (120, 120));
    assert_eq!(aug.derived.model_metric_aggregates.len(), 12);
    for metric in ["faithfulness", "win_rate"] {
        let m = &aug.derived.kappa_matrices.per_metric[metric];
        assert_eq!(m.annotators, vec!["ann-1", "ann-2", "ann-3"]);
        assert_eq!(m.entries.len(), 3);
        assert!(m.entries.iter().all(|row| row.len() == 3));
    }
    assert_eq!(aug.derived.kappa_matrices.per_model_metric.len(), 3);
}

#[test]
fn every_cell_appears_once() {
    let aug = fixture();
    let mut seen = BTreeMap::new();
    for c in &aug.derived.cell_aggregates {
        *seen
            .entry((&c.task_id, &c.model_id, &c.metric_id))
            .or_insert(0) += 1;
    }
    let expected: usize = aug
        .experiment
        .evaluations
        .iter()
        .map(|e| e.annotations.len())
        .sum();
    assert_eq!(seen.len(), expected);
    assert!(seen.values().all(|&n| n == 1));
}

#[test]
fn cell_values_stay_in_mapped_range() {
    let aug = fixture();
    for c in &aug.derived.cell_aggregates {
        let (lo, hi) = aug
            .experiment
            .metric(&c.metric_id)
            .unwrap()
            .scale
            .mapped_range();
        assert!(c.value >= lo && c.value <= hi);
        assert!(c.n_annotators >= 1);
    }
}

fn unanimous(mut file: ExperimentFile) -> ExperimentFile {
    for eval in &mut file.evaluations {
        for ratings in eval.annotations.values_mut() {
            if let Some(first) = ratings.values().next().cloned() {
                for r in ratings.values_mut() {
                    r.value = first.value.clone();
                }
            }
        }
    }
    file
}

#[test]
fn identical_annotators_are_unanimous() {
    let aug = augment(unanimous(standard_fixture()), AugmentConfig::default()).unwrap();
    for c in &aug.derived.cell_aggregates {
        if aug.experiment.metric(&c.metric_id).unwrap().is_human() {
            assert_eq!(c.agreement, Some(AgreementLevel::Unanimous));
        }
    }
    for p in &aug.derived.annotator_profiles {
        assert_eq!(p.contribution, Some(1.0));
    }
    for m in aug.derived.kappa_matrices.per_metric.values() {
        for row in &m.entries {
            for e in row {
                assert_eq!(e.unwrap().kappa, 1.0);
            }
        }
    }
}

#[test]
fn duplicated_metric_correlates_perfectly() {
    let mut file = standard_fixture();
    let mut copy = file.metric("rouge_l").unwrap().clone();
    copy.metric_id = "rouge_copy".into();
    file.metrics.push(copy);
    for e in &mut file.evaluations {
        let r = e.annotations["rouge_l"].clone();
        e.annotations.insert("rouge_copy".into(), r);
    }
    let aug = augment(file, AugmentConfig::default()).unwrap();
    let entry = aug
        .derived
        .metric_correlations
        .get("rouge_l", "rouge_copy")
        .unwrap();
    assert_eq!(entry.rho, Some(1.0));
    assert_eq!(entry.n, 60);
}

#[test]
fn invalid_file_is_rejected_with_report() {
    let mut file = standard_fixture();
    file.tasks[0].contexts[0] = "doc-999".into();
    match augment(file, AugmentConfig::default()) {
        Err(CoreError::Invalid(report)) => {
            assert_eq!(report.errors[0].code, ErrorCode::DanglingDocumentRef);
        }
        other => panic!("expected rejection, got {other:?}"),
    }
}

#[test]
fn warnings_are_carried_not_fatal() {
    let mut file = standard_fixture();
    file.evaluations[0].annotations.remove("faithfulness");
    let aug = augment(file, AugmentConfig::default()).unwrap();
    assert_eq!(aug.derived.validation_warnings.len(), 1);
    assert_eq!(
        aug.model_metric("model-a", "faithfulness")
            .unwrap()
            .n_instances,
        19
    );
}

#[test]
fn augmented_document_is_deterministic() {
    let a = to_document(&fixture());
    let b = to_document(&fixture());
    assert_eq!(a, b);
    let value: serde_json::Value = serde_json::from_str(&a).unwrap();
    for key in [
        "experiment",
        "models",
        "metrics",
        "documents",
        "tasks",
        "evaluations",
        "derived",
    ] {
        assert!(value.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn dataset_characteristics_examples() {
    let file = Tiny::new(&["m"], 3)
        .numeric_metric("x", AuthorType::Algorithmic)
        .scores("m", "x", "sys", &[0.1, 0.2, 0.3])
        .meta(0, "answerability", "answerable")
        .meta(1, "answerability", "answerable")
        .meta(2, "answerability", "unanswerable")
        .meta(0, "question_type", "factoid")
        .meta(1, "question_type", "descriptive")
        .build();
    let d = compute_dataset_characteristics(&file);
    assert_eq!(
        d.metadata["answerability"],
        BTreeMap::from([
            ("answerable".to_string(), 2),
            ("unanswerable".to_string(), 1)
        ])
    );
    assert_eq!(d.metadata["question_type"]["(missing)"], 1);
    let lengths = d.question_length.unwrap();
    assert_eq!((lengths.min, lengths.max), (3, 3));
    assert_eq!(lengths.histogram.total, 3);
}

#[test]
fn question_length_counts_whitespace_tokens() {
    let mut file = standard_fixture();
    assert_eq!(
        compute_dataset_characteristics(&file)
            .question_length
            .unwrap()
            .histogram
            .total,
        20
    );
    file.tasks.truncate(1);
    assert_eq!(file.tasks[0].question(), "where is the red sea");
    let lengths = compute_dataset_characteristics(&file)
        .question_length
        .unwrap();
    assert_eq!((lengths.min, lengths.max), (5, 5));
}

#[test]
fn no_metadata_means_empty_distribution() {
    let file = Tiny::new(&["m"], 2)
        .numeric_metric("x", AuthorType::Algorithmic)
        .scores("m", "x", "sys", &[0.1, 0.2])
        .build();
    assert!(compute_dataset_characteristics(&file).metadata.is_empty());
}

#[test]
fn ranking_flips_with_direction() {
    let aug = fixture();
    let mut flipped = standard_fixture();
    for m in &mut flipped.metrics {
        m.higher_is_better = false;
    }
    let flipped = augment(flipped, AugmentConfig::default()).unwrap();
    for metric in &aug.experiment.metrics {
        let up: Vec<usize> = aug
            .experiment
            .models
            .iter()
            .map(|m| {
                aug.model_metric(&m.model_id, &metric.metric_id)
                    .unwrap()
                    .rank
            })
            .collect();
        let down: Vec<usize> = aug
            .experiment
            .models
            .iter()
            .map(|m| {
                flipped
                    .model_metric(&m.model_id, &metric.metric_id)
                    .unwrap()
                    .rank
            })
            .collect();
        for i in 0..up.len() {
            for j in 0..up.len() {
                assert_eq!(up[i] < up[j], down[i] > down[j], "{}", metric.metric_id);
            }
        }
    }
}

#[test]
fn planted_model_and_annotator_surface() {
    let aug = augment(planted_fixture(11), AugmentConfig::default()).unwrap();
    let worst = aug
        .derived
        .model_metric_aggregates
        .iter()
        .filter(|a| a.metric_id == WIN_RATE)
        .max_by_key(|a| a.rank)
        .unwrap();
    assert_eq!(worst.model_id, VERBOSE_LOSER);
    let lowest = aug
        .derived
        .annotator_profiles
        .iter()
        .min_by(|a, b| a.contribution.unwrap().total_cmp(&b.contribution.unwrap()))
        .unwrap();
    assert_eq!(lowest.annotator_id, NOISY_ANNOTATOR);
}

#[test]
fn missing_durations_stay_absent() {
    let aug = Tiny::new(&["m"], 2)
        .categorical_metric("f", AuthorType::Human, &["no", "yes"])
        .labels("m", "f", "a", &["yes", "no"])
        .labels("m", "f", "b", &["yes", "yes"])
        .augment();
    for p in &aug.derived.annotator_profiles {
        assert_eq!(p.mean_duration_seconds, None);
        assert_eq!(p.median_duration_seconds, None);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn model_mean_is_mean_of_cells(seed in any::<u64>()) {
        let aug = augment(planted_fixture(seed), AugmentConfig::default()).unwrap();
        for agg in &aug.derived.model_metric_aggregates {
            let cells = aug.cells_for(&agg.model_id, &agg.metric_id);
            let mean = cells.iter().map(|c| c.value).sum::<f64>() / cells.len() as f64;
            prop_assert!((agg.mean - mean).abs() < 1e-12);
            prop_assert_eq!(agg.n_instances, cells.len());
            if let Some(dist) = agg.agreement_distribution {
                prop_assert_eq!(dist.total(), cells.iter().filter(|c| c.agreement.is_some()).count());
            }
        }
    }

    #[test]
    fn subset_of_tasks_gives_subset_of_cells(seed in any::<u64>(), keep in 2usize..40) {
        let full_file = planted_fixture(seed);
        let full = augment(full_file.clone(), AugmentConfig::default()).unwrap();
        let mut sub = full_file;
        sub.tasks.truncate(keep);
        let kept: Vec<String> = sub.tasks.iter().map(|t| t.task_id.clone()).collect();
        sub.evaluations.retain(|e| kept.contains(&e.task_id));
        let sub = augment(sub, AugmentConfig::default()).unwrap();
        let expected: Vec<_> = full
            .derived
            .cell_aggregates
            .iter()
            .filter(|c| kept.contains(&c.task_id))
            .cloned()
            .collect();
        prop_assert_eq!(&sub.derived.cell_aggregates, &expected);
    }
}
