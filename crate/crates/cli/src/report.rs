use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use ragscope_core::analysis::{
    annotator_report, dataset_view, metric_behavior, overview, AnnotatorReport, MetricBehavior,
    MetricType, Overview,
};
use ragscope_core::augment::DatasetCharacteristics;
use ragscope_core::AugmentedExperiment;
use serde::Serialize;

use crate::{load_augmented, write, Cli, CmdResult, Format};

/// Static report. Each section is exactly the payload of the matching HTTP
/// view: `overview`, `metrics`, `annotators`, `dataset`.
#[derive(Debug, Serialize)]
pub struct Report {
    pub experiment: String,
    pub seed: u64,
    pub overview: Overview,
    /// Absent when the experiment declares fewer than two metrics.
    pub metrics: Option<MetricBehavior>,
    pub annotators: AnnotatorReport,
    pub dataset: DatasetCharacteristics,
}

pub fn build(aug: &AugmentedExperiment) -> Report {
    Report {
        experiment: aug.experiment.experiment.name.clone(),
        seed: aug.derived.config.seed,
        overview: overview(aug, MetricType::All),
        metrics: metric_behavior(aug).ok(),
        annotators: annotator_report(aug),
        dataset: dataset_view(aug),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"))
}

fn table(out: &mut String, header: &[&str], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    writeln!(out, "{}", line(header.to_vec())).unwrap();
    writeln!(
        out,
        "{}",
        widths
            .iter()
            .map(|w| "-".repeat(*w))
            .collect::<Vec<_>>()
            .join("  ")
    )
    .unwrap();
    for row in rows {
        writeln!(out, "{}", line(row.iter().map(String::as_str).collect())).unwrap();
    }
    out.push('\n');
}

pub fn render_text(r: &Report) -> String {
    let mut out = String::new();
    writeln!(out, "Experiment: {}  (seed {})\n", r.experiment, r.seed).unwrap();

    out.push_str("== Overview ==\n");
    let rows: Vec<Vec<String>> = r
        .overview
        .rows
        .iter()
        .map(|a| {
            let agreement = a.agreement_distribution.map_or_else(
                || "-".to_string(),
                |d| format!("{}/{}/{}", d.unanimous, d.majority, d.split),
            );
            vec![
                a.metric_id.clone(),
                a.model_id.clone(),
                a.rank.to_string(),
                format!("{:.3}", a.mean),
                format!("{:.3}", a.std),
                a.n_instances.to_string(),
                agreement,
            ]
        })
        .collect();
    table(
        &mut out,
        &[
            "metric",
            "model",
            "rank",
            "mean",
            "std",
            "n",
            "unan/maj/split",
        ],
        &rows,
    );

    out.push_str("== Metric correlations (Spearman) ==\n");
    match &r.metrics {
        Some(m) => {
            let ids = &m.correlations.metric_ids;
            let mut header = vec![""];
            header.extend(ids.iter().map(String::as_str));
            let rows: Vec<Vec<String>> = ids
                .iter()
                .zip(&m.correlations.entries)
                .map(|(id, row)| {
                    let mut cells = vec![id.clone()];
                    cells.extend(row.iter().map(|e| opt(e.rho)));
                    cells
                })
                .collect();
            table(&mut out, &header, &rows);
        }
        None => out.push_str("(fewer than two metrics)\n\n"),
    }

    out.push_str("== Annotators ==\n");
    if r.annotators.empty {
        out.push_str("(empty: no human metric rated by two or more annotators)\n\n");
    } else {
        let rows: Vec<Vec<String>> = r
            .annotators
            .profiles
            .iter()
            .map(|p| {
                vec![
                    p.annotator_id.clone(),
                    p.n_ratings.to_string(),
                    opt(p.contribution),
                    opt(p.mean_pairwise_kappa),
                    opt(p.mean_duration_seconds),
                    opt(p.median_duration_seconds),
                ]
            })
            .collect();
        table(
            &mut out,
            &[
                "annotator",
                "ratings",
                "contribution",
                "mean kappa",
                "mean secs",
                "median secs",
            ],
            &rows,
        );
    }

    out.push_str("== Dataset ==\n");
    writeln!(out, "tasks: {}", r.dataset.n_tasks).unwrap();
    if let Some(q) = &r.dataset.question_length {
        writeln!(
            out,
            "question length (tokens): min {} mean {:.2} max {}",
            q.min, q.mean, q.max
        )
        .unwrap();
    }
    for (key, values) in &r.dataset.metadata {
        let parts: Vec<String> = values.iter().map(|(v, n)| format!("{v}={n}")).collect();
        writeln!(out, "{key}: {}", parts.join(", ")).unwrap();
    }
    out
}

pub fn cmd_report(cli: &Cli, path: &Path) -> CmdResult {
    let aug = load_augmented(cli, path)?;
    let report = build(&aug);
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("report"));
    fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let json = serde_json::to_string_pretty(&report).unwrap() + "\n";
    let text = render_text(&report);
    write(&dir.join("report.json"), &json)?;
    write(&dir.join("report.txt"), &text)?;
    match cli.format {
        Format::Text => print!("{text}"),
        Format::Structured => print!("{json}"),
    }
    Ok(())
}
