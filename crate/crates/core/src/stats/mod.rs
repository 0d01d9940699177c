//! Statistical kernel: aggregation, agreement, correlation and significance testing.
//!
//! Every function here is pure. Missing data is the caller's concern: inputs
//! are expected to be pairwise-complete, and results report the effective `n`.

mod aggregate;
mod agreement;
mod histogram;
mod kappa;
mod randomization;
mod spearman;

pub use aggregate::{aggregate_numeric, Summary};
pub use agreement::{agreement_level, majority_label, AgreementCounts, AgreementLevel};
pub use histogram::{categorical_histogram, numeric_histogram, Bin, Histogram};
pub use kappa::{cohens_kappa, pairwise_kappa_matrix, KappaMatrix, KappaResult, KAPPA_EPSILON};
pub use randomization::{
    fisher_randomization_test, ComparisonResult, RandomizationConfig, TestMethod, RNG_NAME,
};
pub use spearman::{average_ranks, spearman};
