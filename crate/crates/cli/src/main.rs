mod report;
mod serve;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use ragscope_core::model::{parse_experiment, to_document, ParseError};
use ragscope_core::{
    augment, validate, AugmentConfig, CoreError, ExperimentFile, ValidationReport,
};
use serde_json::json;

/// Analyze evaluation results of LLM and RAG experiments.
#[derive(Debug, Parser)]
#[command(name = "ragscope", version)]
struct Cli {
    /// Seed for randomized statistics.
    #[arg(long, global = true, env = "RAGSCOPE_SEED", default_value_t = 0)]
    seed: u64,
    /// Output file (validate, augment) or directory (report).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check an experiment file and print its validation report.
    Validate {
        path: PathBuf,
        /// Treat warnings as failures.
        #[arg(long)]
        strict: bool,
    },
    /// Write the experiment with its derived statistics.
    Augment { path: PathBuf },
    /// Write report.json and report.txt summarizing the experiment.
    Report { path: PathBuf },
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    #[arg(long, env = "RAGSCOPE_HOST", default_value = "127.0.0.1")]
    host: String,
    #[arg(long, env = "RAGSCOPE_PORT", default_value_t = 8080)]
    port: u16,
    #[arg(long, env = "RAGSCOPE_MAX_UPLOAD_BYTES", default_value_t = ragscope_service::DEFAULT_MAX_UPLOAD_BYTES)]
    max_upload_bytes: usize,
    #[arg(long, env = "RAGSCOPE_SESSION_TTL_SECS", default_value_t = ragscope_service::DEFAULT_SESSION_TTL.as_secs())]
    session_ttl_secs: u64,
    #[arg(long, env = "RAGSCOPE_MEMORY_BUDGET_BYTES", default_value_t = ragscope_service::DEFAULT_MEMORY_BUDGET_BYTES)]
    memory_budget_bytes: usize,
    /// Default Monte Carlo iterations for comparisons.
    #[arg(long, env = "RAGSCOPE_ITERATIONS", default_value_t = 10_000)]
    iterations: usize,
    /// Allow cross-origin requests from any origin.
    #[arg(long, env = "RAGSCOPE_CORS")]
    cors: bool,
}

const EXIT_INVALID: u8 = 1;
const EXIT_USAGE: u8 = 2;

/// Failure carrying its exit status.
#[derive(Debug)]
enum Failure {
    Invalid,
    Io(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Io(e)
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate { path, strict } => cmd_validate(&cli, path, *strict),
        Command::Augment { path } => cmd_augment(&cli, path),
        Command::Report { path } => report::cmd_report(&cli, path),
        Command::Serve(args) => serve::cmd_serve(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid) => ExitCode::from(EXIT_INVALID),
        Err(Failure::Io(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

/// Outcome of checking a file, before any statistics are computed.
enum Checked {
    Parsed(Box<ExperimentFile>, ValidationReport),
    Unparsable(Vec<ParseError>),
}

fn check(path: &Path) -> anyhow::Result<Checked> {
    let raw = read(path)?;
    Ok(match parse_experiment(&raw) {
        Ok(file) => {
            let report = validate(&file);
            Checked::Parsed(Box::new(file), report)
        }
        Err(errors) => Checked::Unparsable(errors),
    })
}

fn structured_report(checked: &Checked) -> serde_json::Value {
    match checked {
        Checked::Parsed(_, r) => {
            json!({"valid": r.is_valid(), "errors": r.errors, "warnings": r.warnings})
        }
        Checked::Unparsable(errors) => json!({"valid": false, "parse_errors": errors}),
    }
}

fn print_text_report(checked: &Checked) {
    match checked {
        Checked::Parsed(_, r) => {
            for i in &r.errors {
                println!("error   {} at {}: {}", i.code.as_str(), i.path, i.message);
            }
            for i in &r.warnings {
                println!("warning {} at {}: {}", i.code.as_str(), i.path, i.message);
            }
            println!(
                "{} error(s), {} warning(s)",
                r.errors.len(),
                r.warnings.len()
            );
        }
        Checked::Unparsable(errors) => {
            for e in errors {
                println!("error   PARSE at {}: {}", e.path, e.message);
            }
            println!("{} parse error(s)", errors.len());
        }
    }
}

fn emit_report(cli: &Cli, checked: &Checked) {
    match cli.format {
        Format::Text => print_text_report(checked),
        Format::Structured => println!(
            "{}",
            serde_json::to_string_pretty(&structured_report(checked)).unwrap()
        ),
    }
}

fn cmd_validate(cli: &Cli, path: &Path, strict: bool) -> CmdResult {
    let checked = check(path)?;
    emit_report(cli, &checked);
    if let Some(out) = &cli.out {
        let doc = serde_json::to_string_pretty(&structured_report(&checked)).unwrap() + "\n";
        write(out, &doc)?;
    }
    match checked {
        Checked::Parsed(_, r) if r.is_valid() && !(strict && !r.warnings.is_empty()) => Ok(()),
        _ => Err(Failure::Invalid),
    }
}

/// Parses, validates and augments; on any validation problem prints the
/// report to stderr and fails with the invalid status.
fn load_augmented(cli: &Cli, path: &Path) -> Result<ragscope_core::AugmentedExperiment, Failure> {
    let checked = check(path)?;
    let file = match checked {
        Checked::Parsed(file, ref r) if r.is_valid() => *file,
        other => {
            eprintln!(
                "{}",
                serde_json::to_string_pretty(&structured_report(&other)).unwrap()
            );
            return Err(Failure::Invalid);
        }
    };
    let config = AugmentConfig {
        seed: cli.seed,
        ..AugmentConfig::default()
    };
    match augment(file, config) {
        Ok(aug) => Ok(aug),
        Err(CoreError::Invalid(_)) => Err(Failure::Invalid),
        Err(e) => Err(Failure::Io(e.into())),
    }
}

fn cmd_augment(cli: &Cli, path: &Path) -> CmdResult {
    let aug = load_augmented(cli, path)?;
    let doc = to_document(&aug);
    match &cli.out {
        Some(out) => write(out, &doc)?,
        None => print!("{doc}"),
    }
    Ok(())
}
