use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};

/// Generator behind the Monte Carlo path. Changing it changes every p-value,
/// so the name is part of the output contract.
pub const RNG_NAME: &str = "chacha8-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RandomizationConfig {
    pub iterations: usize,
    pub seed: u64,
    /// Enumerate all sign assignments when `n <= exhaustive_threshold`.
    pub exhaustive_threshold: usize,
}

impl Default for RandomizationConfig {
    fn default() -> Self {
        RandomizationConfig {
            iterations: 10_000,
            seed: 0,
            exhaustive_threshold: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    Exhaustive,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    /// Mean of `a_i - b_i` over the paired instances.
    pub observed_diff: f64,
    /// Two-sided, always in (0, 1].
    pub p_value: f64,
    pub method: TestMethod,
    /// Sign assignments evaluated: `2^n` when exhaustive.
    pub iterations: u64,
    pub seed: u64,
    pub n_pairs: usize,
    pub rng: String,
}

/// Paired two-sided sign-flip test on the mean difference.
pub fn fisher_randomization_test(
    scores_a: &[f64],
    scores_b: &[f64],
    config: &RandomizationConfig,
) -> Result<ComparisonResult> {
    if scores_a.len() != scores_b.len() {
        return Err(CoreError::LengthMismatch {
            left: scores_a.len(),
            right: scores_b.len(),
        });
    }
    let n = scores_a.len();
    if n < 2 {
        return Err(CoreError::TooFew { needed: 2, got: n });
    }
    if config.exhaustive_threshold >= 63 {
        return Err(CoreError::InvalidArgument(
            "exhaustive_threshold must be below 63".to_string(),
        ));
    }
    let diffs: Vec<f64> = scores_a.iter().zip(scores_b).map(|(a, b)| a - b).collect();
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(CoreError::InvalidArgument("non-finite score".to_string()));
    }
    let observed_sum: f64 = diffs.iter().sum();
    // Sums that match the observed one up to rounding must count as "as extreme".
    let scale: f64 = diffs.iter().map(|d| d.abs()).sum();
    let threshold = observed_sum.abs() - 1e-9 * scale;

    let (method, iterations, p_value) = if n <= config.exhaustive_threshold {
        let hits = exhaustive_hits(&diffs, threshold);
        let total = 1u64 << n;
        (TestMethod::Exhaustive, total, hits as f64 / total as f64)
    } else {
        if config.iterations == 0 {
            return Err(CoreError::InvalidArgument(
                "iterations must be positive".to_string(),
            ));
        }
        let hits = monte_carlo_hits(&diffs, threshold, config.iterations, config.seed);
        (
            TestMethod::MonteCarlo,
            config.iterations as u64,
            (1 + hits) as f64 / (config.iterations + 1) as f64,
        )
    };

    Ok(ComparisonResult {
        observed_diff: observed_sum / n as f64,
        p_value,
        method,
        iterations,
        seed: config.seed,
        n_pairs: n,
        rng: RNG_NAME.to_string(),
    })
}

/// Signed subset sums of `part`: entry `mask` flips the elements whose bit is set.
fn signed_sums(part: &[f64]) -> Vec<f64> {
    let base: f64 = part.iter().sum();
    let mut sums = vec![base; 1 << part.len()];
    for mask in 1usize..sums.len() {
        let low = mask.trailing_zeros() as usize;
        sums[mask] = sums[mask & (mask - 1)] - 2.0 * part[low];
    }
    sums
}

fn exhaustive_hits(diffs: &[f64], threshold: f64) -> u64 {
    // Meet in the middle keeps every sum within a dozen additions of exact.
    let (left, right) = diffs.split_at(diffs.len() / 2);
    let left = signed_sums(left);
    let right = signed_sums(right);
    let mut hits = 0u64;
    for l in &left {
        hits += right.iter().filter(|r| (l + *r).abs() >= threshold).count() as u64;
    }
    hits
}

fn monte_carlo_hits(diffs: &[f64], threshold: f64, iterations: usize, seed: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0u64;
    for _ in 0..iterations {
        let mut sum = 0.0;
        let mut bits = 0u64;
        for (i, d) in diffs.iter().enumerate() {
            if i % 64 == 0 {
                bits = rng.next_u64();
            }
            sum += if bits & 1 == 1 { -d } else { *d };
            bits >>= 1;
        }
        if sum.abs() >= threshold {
            hits += 1;
        }
    }
    hits
}
