use std::collections::BTreeSet;

use proptest::prelude::*;
use ragscope_core::model::{
    parse_experiment, resolve_task, to_document, validate, ErrorCode, ExperimentFile,
};
use ragscope_core::synth::{planted_fixture, standard_fixture};
use ragscope_core::CoreError;
use serde_json::{json, Value};

enum Op {
    Replace(String, Value),
    Append(String, Value),
    Insert(String, &'static str, Value),
    Remove(String),
}

fn fixture_value() -> Value {
    serde_json::to_value(standard_fixture()).unwrap()
}

fn apply(mut doc: Value, op: &Op) -> ExperimentFile {
    match op {
        Op::Replace(ptr, v) => *doc.pointer_mut(ptr.as_str()).unwrap() = v.clone(),
        Op::Append(ptr, v) => doc
            .pointer_mut(ptr.as_str())
            .unwrap()
            .as_array_mut()
            .unwrap()
            .push(v.clone()),
        Op::Insert(ptr, key, v) => {
            doc.pointer_mut(ptr.as_str())
                .unwrap()
                .as_object_mut()
                .unwrap()
                .insert(key.to_string(), v.clone());
        }
        Op::Remove(ptr) => {
            let (parent, last) = ptr.rsplit_once('/').unwrap();
            match doc.pointer_mut(parent).unwrap() {
                Value::Array(a) => {
                    a.remove(last.parse::<usize>().unwrap());
                }
                Value::Object(o) => {
                    o.remove(last).unwrap();
                }
                _ => panic!("cannot remove from scalar"),
            }
        }
    }
    serde_json::from_value(doc).unwrap()
}

/// One single-field mutation of the valid fixture per taxonomy code.
fn mutations() -> Vec<(ErrorCode, Op)> {
    let doc = fixture_value();
    let last_doc = doc["documents"].as_array().unwrap().len() - 1;
    let mut stray_task = doc["evaluations"][0].clone();
    stray_task["task_id"] = json!("t-999");
    let mut stray_model = doc["evaluations"][0].clone();
    stray_model["model_id"] = json!("model-zzz");
    vec![
        (
            ErrorCode::DuplicateId,
            Op::Replace(
                format!("/documents/{last_doc}/document_id"),
                json!("doc-01-0"),
            ),
        ),
        (
            ErrorCode::DanglingDocumentRef,
            Op::Replace("/tasks/0/contexts/0".into(), json!("doc-999")),
        ),
        (
            ErrorCode::DanglingTaskRef,
            Op::Append("/evaluations".into(), stray_task),
        ),
        (
            ErrorCode::DanglingModelRef,
            Op::Append("/evaluations".into(), stray_model),
        ),
        (
            ErrorCode::UnknownMetric,
            Op::Insert(
                "/evaluations/0/annotations".into(),
                "bogus",
                json!({"x": {"value": 1.0}}),
            ),
        ),
        (
            ErrorCode::ScaleViolation,
            Op::Replace(
                "/evaluations/0/annotations/faithfulness/ann-1/value".into(),
                json!("maybe"),
            ),
        ),
        (
            ErrorCode::MissingEvaluation,
            Op::Remove("/evaluations/0".into()),
        ),
        (
            ErrorCode::MissingScore,
            Op::Remove("/evaluations/0/annotations/faithfulness".into()),
        ),
        (
            ErrorCode::UnevenAnnotators,
            Op::Remove("/evaluations/0/annotations/faithfulness/ann-3".into()),
        ),
        (
            ErrorCode::EmptySection,
            Op::Replace("/evaluations".into(), json!([])),
        ),
    ]
}

#[test]
fn unmutated_fixture_is_clean() {
    let report = validate(&standard_fixture());
    assert!(report.errors.is_empty(), "{:?}", report.errors);
    assert!(report.warnings.is_empty(), "{:?}", report.warnings);
}

#[test]
fn every_code_has_a_mutation_producing_exactly_it() {
    let muts = mutations();
    let covered: BTreeSet<ErrorCode> = muts.iter().map(|(c, _)| *c).collect();
    assert_eq!(covered, ErrorCode::ALL.into_iter().collect());
    for (code, op) in &muts {
        let report = validate(&apply(fixture_value(), op));
        assert_eq!(
            report.codes(),
            BTreeSet::from([*code]),
            "mutation for {code}: {report:?}"
        );
        assert_eq!(report.is_valid(), code.is_warning(), "{code}");
    }
}

#[test]
fn missing_score_points_at_the_evaluation() {
    let report = validate(&apply(
        fixture_value(),
        &Op::Remove("/evaluations/0/annotations/faithfulness".into()),
    ));
    assert_eq!(report.warnings.len(), 1);
    assert_eq!(report.warnings[0].path, "evaluations[0]");
    assert!(report.warnings[0].message.contains("faithfulness"));
}

#[test]
fn dangling_document_points_at_the_context() {
    let report = validate(&apply(
        fixture_value(),
        &Op::Replace("/tasks/0/contexts/0".into(), json!("doc-999")),
    ));
    assert_eq!(report.errors[0].path, "tasks[0].contexts[0]");
    assert!(report.errors[0].message.contains("doc-999"));
}

#[test]
fn malformed_scales_are_scale_violations() {
    let cases = [
        json!({"kind": "numeric", "min": 1.0, "max": 1.0}),
        json!({"kind": "categorical", "values": []}),
        json!({"kind": "categorical", "values": [{"value": "a"}, {"value": "a"}]}),
        json!({"kind": "categorical", "values": [
            {"value": "a", "numeric_mapping": 1.0}, {"value": "b", "numeric_mapping": 0.5}]}),
    ];
    for scale in cases {
        let file = apply(
            fixture_value(),
            &Op::Replace("/metrics/2/scale".into(), scale.clone()),
        );
        let report = validate(&file);
        assert!(
            report
                .errors
                .iter()
                .any(|e| e.code == ErrorCode::ScaleViolation && e.path == "metrics[2].scale"),
            "{scale}: {report:?}"
        );
    }
}

#[test]
fn numeric_rating_outside_range_is_rejected() {
    let file = apply(
        fixture_value(),
        &Op::Replace(
            "/evaluations/0/annotations/rouge_l/system/value".into(),
            json!(1.5),
        ),
    );
    assert_eq!(
        validate(&file).codes(),
        BTreeSet::from([ErrorCode::ScaleViolation])
    );
}

#[test]
fn duplicate_evaluation_pair_is_duplicate_id() {
    let doc = fixture_value();
    let copy = doc["evaluations"][0].clone();
    let file = apply(doc, &Op::Append("/evaluations".into(), copy));
    assert_eq!(
        validate(&file).codes(),
        BTreeSet::from([ErrorCode::DuplicateId])
    );
}

#[test]
fn validate_is_deterministic() {
    let file = apply(fixture_value(), &Op::Remove("/evaluations/3".into()));
    assert_eq!(validate(&file), validate(&file));
}

#[test]
fn resolve_known_task() {
    let file = standard_fixture();
    let r = resolve_task(&file, "t-01").unwrap();
    assert_eq!(r.task.task_id, "t-01");
    assert_eq!(r.documents.len(), 2);
    assert_eq!(r.responses.len(), 3);
    assert!(r.task.targets.is_some());
}

#[test]
fn resolve_task_without_targets() {
    let r = resolve_task(&standard_fixture(), "t-05").unwrap();
    assert!(r.task.targets.is_none());
}

#[test]
fn resolve_unknown_task() {
    assert!(matches!(
        resolve_task(&standard_fixture(), "t-404"),
        Err(CoreError::UnknownTask(id)) if id == "t-404"
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn documents_round_trip(seed in any::<u64>()) {
        let file = planted_fixture(seed);
        let text = to_document(&file);
        let back = parse_experiment(&text).unwrap();
        prop_assert_eq!(&back, &file);
        prop_assert_eq!(to_document(&back), text);
    }

    #[test]
    fn resolve_returns_requested_task(index in 0usize..20) {
        let file = standard_fixture();
        let id = file.tasks[index].task_id.clone();
        prop_assert_eq!(resolve_task(&file, &id).unwrap().task.task_id, id);
    }
}
