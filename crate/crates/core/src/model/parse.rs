use serde::Serialize;

use super::types::{ExperimentFile, Speaker};

/// Locator used for errors that concern the whole document.
pub const ROOT_PATH: &str = "$";

/// A shape error found while reading an experiment file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

/// Reads an experiment file from UTF-8 text.
///
/// Only the document's shape is checked here: syntax, primitive types,
/// required fields, and that every conversation ends with a user turn.
/// Cross-references and scale conformance are left to [`crate::validate`].
pub fn parse_experiment(raw: &str) -> Result<ExperimentFile, Vec<ParseError>> {
    let mut de = serde_json::Deserializer::from_str(raw);
    let file: ExperimentFile = match serde_path_to_error::deserialize(&mut de) {
        Ok(file) => file,
        Err(err) => {
            let path = err.path().to_string();
            let path = if path.is_empty() || path == "." {
                ROOT_PATH.to_string()
            } else {
                path
            };
            return Err(vec![ParseError {
                path,
                message: err.into_inner().to_string(),
            }]);
        }
    };
    if let Err(err) = de.end() {
        return Err(vec![ParseError {
            path: ROOT_PATH.to_string(),
            message: err.to_string(),
        }]);
    }

    let errors: Vec<ParseError> = file
        .tasks
        .iter()
        .enumerate()
        .filter(|(_, t)| {
            t.input
                .last()
                .is_some_and(|turn| turn.speaker != Speaker::User)
        })
        .map(|(i, _)| ParseError {
            path: format!("tasks[{i}].input"),
            message: "conversation must end with a user turn".to_string(),
        })
        .collect();
    if errors.is_empty() {
        Ok(file)
    } else {
        Err(errors)
    }
}

/// Serializes an experiment file (or augmented experiment) in the interchange format.
pub fn to_document<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("experiment types always serialize");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "experiment": {"name": "x"},
        "models": [{"model_id": "m", "name": "M"}],
        "metrics": [{"metric_id": "f", "name": "F", "author_type": "human",
                     "scale": {"kind": "categorical", "values": [{"value": "no"}, {"value": "yes"}]}}],
        "documents": [],
        "tasks": [{"task_id": "t", "input": [{"speaker": "user", "text": "q?"}]}],
        "evaluations": [{"task_id": "t", "model_id": "m", "model_response": "a",
                         "annotations": {"f": {"a1": {"value": "yes"}}}}]
    }"#;

    #[test]
    fn parses_minimal_document() {
        let file = parse_experiment(MINIMAL).unwrap();
        assert_eq!(file.models.len(), 1);
        assert!(file.metrics[0].higher_is_better);
        assert_eq!(file.metrics[0].scale.mapping_at(1), Some(1.0));
    }

    #[test]
    fn garbage_fails_at_root() {
        let errs = parse_experiment("not-a-document").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].path, ROOT_PATH);
    }

    #[test]
    fn scalar_models_fail_at_models() {
        let raw = MINIMAL.replace(
            r#""models": [{"model_id": "m", "name": "M"}]"#,
            r#""models": 3"#,
        );
        let errs = parse_experiment(&raw).unwrap_err();
        assert_eq!(errs[0].path, "models");
    }

    #[test]
    fn missing_required_field_is_located() {
        let raw = MINIMAL.replace(r#""model_response": "a","#, "");
        let errs = parse_experiment(&raw).unwrap_err();
        assert_eq!(errs[0].path, "evaluations[0]");
        assert!(errs[0].message.contains("model_response"));
    }

    #[test]
    fn wrong_primitive_type_is_located() {
        let raw = MINIMAL.replace(r#""text": "q?""#, r#""text": 7"#);
        let errs = parse_experiment(&raw).unwrap_err();
        assert_eq!(errs[0].path, "tasks[0].input[0].text");
    }

    #[test]
    fn agent_final_turn_rejected() {
        let raw = MINIMAL.replace(r#""speaker": "user""#, r#""speaker": "agent""#);
        let errs = parse_experiment(&raw).unwrap_err();
        assert_eq!(errs[0].path, "tasks[0].input");
    }

    #[test]
    fn trailing_content_rejected() {
        let raw = format!("{MINIMAL} {{}}");
        assert!(parse_experiment(&raw).is_err());
    }
}
