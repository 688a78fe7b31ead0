//! Test outcome and the finite-sample threshold / p-value conventions.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: String,
    pub statistic: f64,
    pub null_samples: Vec<f64>,
    /// `+inf` when the requested quantile is beyond the largest null sample.
    pub threshold: f64,
    pub p_value: f64,
    pub reject: bool,
    pub alpha: f64,
    pub seed: u64,
    pub n: usize,
    pub block_length: Option<f64>,
    pub factor_applied: bool,
    pub notes: Vec<String>,
}

impl TestResult {
    pub(crate) fn from_null(
        method: &str,
        statistic: f64,
        null_samples: Vec<f64>,
        alpha: f64,
        seed: u64,
        n: usize,
    ) -> Self {
        let threshold = order_statistic_threshold(&null_samples, 1.0 - alpha);
        let p_value = p_value(&null_samples, statistic);
        Self {
            method: method.to_string(),
            statistic,
            reject: exceeds(statistic, threshold, &null_samples),
            threshold,
            p_value,
            null_samples,
            alpha,
            seed,
            n,
            block_length: None,
            factor_applied: false,
            notes: Vec::new(),
        }
    }

    pub fn replicates(&self) -> usize {
        self.null_samples.len()
    }
}

/// 1-based index `ceil(level (B + 1))` of the order statistic used as threshold.
pub fn order_statistic_index(b: usize, level: f64) -> usize {
    let x = level * (b as f64 + 1.0);
    (x - 1e-9).ceil().max(1.0) as usize
}

/// Order statistic `ceil(level (B + 1))` of `samples`; `+inf` if that index exceeds `B`.
pub fn order_statistic_threshold(samples: &[f64], level: f64) -> f64 {
    let k = order_statistic_index(samples.len(), level);
    if k > samples.len() {
        return f64::INFINITY;
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted[k - 1]
}

fn tie_tolerance(null_samples: &[f64], statistic: f64) -> f64 {
    let scale = null_samples
        .iter()
        .fold(statistic.abs(), |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    1e-12 * scale
}

/// `statistic > threshold`, treating differences within the tie tolerance as ties.
pub fn exceeds(statistic: f64, threshold: f64, null_samples: &[f64]) -> bool {
    statistic > threshold + tie_tolerance(null_samples, statistic)
}

/// `(1 + #{null >= statistic}) / (B + 1)`.
///
/// Null samples within `1e-12` (relative to the largest magnitude involved)
/// below the statistic count as ties, so rounding noise cannot turn an exact
/// tie into a rejection.
pub fn p_value(null_samples: &[f64], statistic: f64) -> f64 {
    let tol = tie_tolerance(null_samples, statistic);
    let count = null_samples
        .iter()
        .filter(|&&v| v >= statistic - tol)
        .count();
    (1 + count) as f64 / (null_samples.len() + 1) as f64
}
