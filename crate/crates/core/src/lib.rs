//! Core of ragscope: the experiment results model, the statistical kernel,
//! augmentation of experiments with derived statistics, and the view queries
//! built on top of them.

pub mod analysis;
pub mod augment;
pub mod error;
pub mod model;
pub mod stats;
pub mod synth;

pub use augment::{augment, AugmentConfig, AugmentedExperiment};
pub use error::{CoreError, Result};
pub use model::{parse_experiment, resolve_task, validate, ExperimentFile, ValidationReport};
