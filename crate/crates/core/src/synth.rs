//! Deterministic synthetic experiments.
//!
//! `standard_fixture` is the bundled example file (`fixtures/experiment.json`).
//! `planted_fixture` builds an experiment with a known weak model and a known
//! careless annotator, used to check that the views surface both.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    AuthorType, CategoryValue, Document, Evaluation, ExperimentDetails, ExperimentFile, MetricMeta,
    ModelMeta, Rating, ScaleSpec, Speaker, Task, Turn,
};

pub const FAITHFULNESS: &str = "faithfulness";
pub const WIN_RATE: &str = "win_rate";
pub const ROUGE_L: &str = "rouge_l";
pub const EXTRACTIVENESS: &str = "extractiveness";

const FAITH_LABELS: [&str; 3] = ["no", "partial", "yes"];
const WIN_LABELS: [&str; 3] = ["lose", "tie", "win"];

const TOPICS: [&str; 10] = [
    "the red sea",
    "photosynthesis",
    "the treaty of westphalia",
    "lithium batteries",
    "the great barrier reef",
    "jazz improvisation",
    "the mariana trench",
    "vaccination schedules",
    "roman aqueducts",
    "solar eclipses",
];

const WORDS: [&str; 16] = [
    "the", "passage", "states", "that", "this", "is", "located", "between", "regions", "and",
    "was", "first", "recorded", "in", "several", "sources",
];

fn round_to(x: f64, decimals: i32) -> f64 {
    let f = 10f64.powi(decimals);
    (x * f).round() / f
}

fn categorical(labels: &[&str]) -> ScaleSpec {
    let step = 1.0 / (labels.len() - 1) as f64;
    ScaleSpec::Categorical {
        values: labels
            .iter()
            .enumerate()
            .map(|(i, l)| CategoryValue {
                value: l.to_string(),
                numeric_mapping: Some(step * i as f64),
                display: None,
            })
            .collect(),
    }
}

fn standard_metrics() -> Vec<MetricMeta> {
    vec![
        MetricMeta {
            metric_id: FAITHFULNESS.into(),
            name: "Faithfulness".into(),
            author_type: AuthorType::Human,
            scale: categorical(&FAITH_LABELS),
            higher_is_better: true,
        },
        MetricMeta {
            metric_id: WIN_RATE.into(),
            name: "Win rate".into(),
            author_type: AuthorType::Human,
            scale: categorical(&WIN_LABELS),
            higher_is_better: true,
        },
        MetricMeta {
            metric_id: ROUGE_L.into(),
            name: "ROUGE-L".into(),
            author_type: AuthorType::Algorithmic,
            scale: ScaleSpec::Numeric { min: 0.0, max: 1.0 },
            higher_is_better: true,
        },
        MetricMeta {
            metric_id: EXTRACTIVENESS.into(),
            name: "Extractiveness".into(),
            author_type: AuthorType::Algorithmic,
            scale: ScaleSpec::Numeric { min: 0.0, max: 1.0 },
            higher_is_better: true,
        },
    ]
}

fn sentence(rng: &mut ChaCha8Rng, words: usize) -> String {
    (0..words)
        .map(|_| WORDS[rng.random_range(0..WORDS.len())])
        .collect::<Vec<_>>()
        .join(" ")
}

/// Label index drawn around a latent quality in [0, 1].
fn latent_label(rng: &mut ChaCha8Rng, quality: f64, n_labels: usize) -> usize {
    let noisy = (quality + rng.random_range(-0.25..0.25)).clamp(0.0, 0.999);
    (noisy * n_labels as f64) as usize
}

/// With probability `flip`, replaces `label` by a different label chosen uniformly.
fn maybe_flip(rng: &mut ChaCha8Rng, label: usize, n_labels: usize, flip: f64) -> usize {
    if rng.random_bool(flip) {
        (label + rng.random_range(1..n_labels)) % n_labels
    } else {
        label
    }
}

struct Layout<'a> {
    name: &'a str,
    models: &'a [(&'a str, &'a str, f64, usize)],
    annotators: &'a [(&'a str, f64)],
    n_tasks: usize,
    seed: u64,
}

fn build(layout: &Layout<'_>) -> ExperimentFile {
    let mut rng = ChaCha8Rng::seed_from_u64(layout.seed);
    let mut documents = Vec::new();
    let mut tasks = Vec::new();

    for t in 1..=layout.n_tasks {
        let task_id = format!("t-{t:02}");
        let topic = TOPICS[(t - 1) % TOPICS.len()];
        let n_contexts = if t == 1 {
            2
        } else {
            1 + usize::from(t % 3 == 0)
        };
        let mut contexts = Vec::new();
        for c in 0..n_contexts {
            let document_id = format!("doc-{t:02}-{c}");
            documents.push(Document {
                document_id: document_id.clone(),
                text: format!("About {topic}: {}.", sentence(&mut rng, 24)),
                title: Some(format!("{topic} ({})", c + 1)),
                url: None,
            });
            contexts.push(document_id);
        }

        let question = match t % 4 {
            0 => format!("what is known about {topic}"),
            1 => format!("where is {topic}"),
            2 => format!("why does {topic} matter to historians and scientists alike"),
            _ => format!("how would you describe {topic}"),
        };
        let input = if t % 5 == 0 {
            vec![
                Turn {
                    speaker: Speaker::User,
                    text: format!("tell me about {topic}"),
                },
                Turn {
                    speaker: Speaker::Agent,
                    text: sentence(&mut rng, 10),
                },
                Turn {
                    speaker: Speaker::User,
                    text: question,
                },
            ]
        } else {
            vec![Turn {
                speaker: Speaker::User,
                text: question,
            }]
        };

        let mut metadata = BTreeMap::new();
        let unanswerable = t > layout.n_tasks * 3 / 5;
        metadata.insert(
            "answerability".to_string(),
            if unanswerable {
                "unanswerable"
            } else {
                "answerable"
            }
            .to_string(),
        );
        metadata.insert(
            "question_type".to_string(),
            ["factoid", "descriptive", "explanatory", "comparative"][t % 4].to_string(),
        );
        metadata.insert(
            "domain".to_string(),
            ["science", "history", "geography"][t % 3].to_string(),
        );

        tasks.push(Task {
            task_id,
            input,
            contexts,
            targets: (t != 5).then(|| vec![format!("{topic} {}", sentence(&mut rng, 8))]),
            metadata,
        });
    }
    documents.push(Document {
        document_id: "doc-unused".into(),
        text: "A passage that no task cites.".into(),
        title: None,
        url: None,
    });

    let mut evaluations = Vec::new();
    for task in &tasks {
        for &(model_id, _, quality, verbosity) in layout.models {
            let mut annotations = BTreeMap::new();
            for (metric_id, labels) in [(FAITHFULNESS, &FAITH_LABELS), (WIN_RATE, &WIN_LABELS)] {
                let truth = latent_label(&mut rng, quality, labels.len());
                let ratings = layout
                    .annotators
                    .iter()
                    .map(|&(annotator, flip)| {
                        let label = maybe_flip(&mut rng, truth, labels.len(), flip);
                        let duration = round_to(rng.random_range(20.0..120.0), 1);
                        (
                            annotator.to_string(),
                            Rating::label(labels[label]).with_duration(duration),
                        )
                    })
                    .collect();
                annotations.insert(metric_id.to_string(), ratings);
            }
            let rouge = round_to(
                (quality * 0.7 + rng.random_range(0.0..0.3)).clamp(0.0, 1.0),
                3,
            );
            let extractive = round_to(
                (0.3 + 0.5 * quality + rng.random_range(-0.2..0.2)).clamp(0.0, 1.0),
                3,
            );
            for (metric_id, v) in [(ROUGE_L, rouge), (EXTRACTIVENESS, extractive)] {
                annotations.insert(
                    metric_id.to_string(),
                    BTreeMap::from([("system".to_string(), Rating::number(v))]),
                );
            }
            let words = verbosity + rng.random_range(0..verbosity / 2 + 1);
            evaluations.push(Evaluation {
                task_id: task.task_id.clone(),
                model_id: model_id.to_string(),
                model_response: sentence(&mut rng, words),
                annotations,
            });
        }
    }

    ExperimentFile {
        experiment: ExperimentDetails {
            name: layout.name.to_string(),
            description: Some("Synthetic RAG evaluation experiment".into()),
            timestamp: Some("2024-05-01T12:00:00Z".into()),
        },
        models: layout
            .models
            .iter()
            .map(|&(id, name, _, _)| ModelMeta {
                model_id: id.to_string(),
                name: name.to_string(),
                description: None,
            })
            .collect(),
        metrics: standard_metrics(),
        documents,
        tasks,
        evaluations,
    }
}

/// The bundled example: 3 models, 20 tasks, 2 human metrics rated by 3
/// annotators and 2 algorithmic metrics. 12 tasks are answerable, 8 are not.
pub fn standard_fixture() -> ExperimentFile {
    build(&Layout {
        name: "synthetic-clinic",
        models: &[
            ("model-a", "Model A", 0.75, 30),
            ("model-b", "Model B", 0.55, 20),
            ("model-c", "Model C", 0.35, 45),
        ],
        annotators: &[("ann-1", 0.1), ("ann-2", 0.1), ("ann-3", 0.15)],
        n_tasks: 20,
        seed: 2024,
    })
}

pub const VERBOSE_LOSER: &str = "verbose-loser";
pub const NOISY_ANNOTATOR: &str = "ann-noisy";

/// An experiment with a planted weak model and a planted careless annotator.
///
/// `verbose-loser` gives long, mostly unfaithful answers that lose
/// head-to-head comparisons. `ann-noisy` replaces 30% of its labels with a
/// different label chosen at random; the other annotators flip 5%.
pub fn planted_fixture(seed: u64) -> ExperimentFile {
    build(&Layout {
        name: "planted-insights",
        models: &[
            ("concise-a", "Concise A", 0.8, 25),
            ("concise-b", "Concise B", 0.65, 30),
            (VERBOSE_LOSER, "Verbose Loser", 0.15, 120),
        ],
        annotators: &[
            ("ann-1", 0.05),
            ("ann-2", 0.05),
            ("ann-3", 0.05),
            (NOISY_ANNOTATOR, 0.3),
        ],
        n_tasks: 40,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;

    #[test]
    fn standard_fixture_shape() {
        let f = standard_fixture();
        assert_eq!((f.models.len(), f.metrics.len(), f.tasks.len()), (3, 4, 20));
        assert_eq!(f.evaluations.len(), 60);
        let unanswerable = f
            .tasks
            .iter()
            .filter(|t| t.metadata["answerability"] == "unanswerable")
            .count();
        assert_eq!(unanswerable, 8);
        assert_eq!(f.tasks[0].contexts.len(), 2);
        assert!(f.tasks[4].targets.is_none());
        assert!(validate(&f).errors.is_empty());
        assert!(validate(&f).warnings.is_empty());
    }

    #[test]
    fn planted_fixture_is_valid() {
        let f = planted_fixture(7);
        let report = validate(&f);
        assert!(report.errors.is_empty() && report.warnings.is_empty());
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(planted_fixture(3), planted_fixture(3));
        assert_ne!(planted_fixture(3), planted_fixture(4));
    }
}
