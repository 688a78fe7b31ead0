//! Single test runs and Monte Carlo rejection-rate experiments.

use super::io::load_csv;
use crate::error::{Error, Result};
use crate::generators::{Generated, ProcessSpec};
use crate::hsic::{instantaneous_independence_test, shift_hsic_test};
use crate::kernels::KernelSpec;
use crate::lag_hsic::{lag_hsic_test, LagHsicConfig, LagRadius};
use crate::mmd::{mmd_paired_test, mmd_permutation_test, mmd_test, TwoSampleInput};
use crate::result::{p_value, TestResult};
use crate::rng::derive_seed;
use crate::series::{PairedSeries, TimeSeries};
use crate::wild_bootstrap::BootstrapConfig;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestKind {
    MmdWild,
    MmdPaired,
    MmdPermutation,
    HsicWild,
    HsicShift,
    LagHsic,
}

impl TestKind {
    pub fn name(self) -> &'static str {
        match self {
            TestKind::MmdWild => "mmd-wild",
            TestKind::MmdPaired => "mmd-paired",
            TestKind::MmdPermutation => "mmd-permutation",
            TestKind::HsicWild => "hsic-wild",
            TestKind::HsicShift => "hsic-shift",
            TestKind::LagHsic => "lag-hsic",
        }
    }

    fn is_two_sample(self) -> bool {
        matches!(self, TestKind::MmdWild | TestKind::MmdPaired | TestKind::MmdPermutation)
    }
}

impl FromStr for TestKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            TestKind::MmdWild,
            TestKind::MmdPaired,
            TestKind::MmdPermutation,
            TestKind::HsicWild,
            TestKind::HsicShift,
            TestKind::LagHsic,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| Error::InvalidConfig(format!("unknown test {s:?}")))
    }
}

/// Where the two series of an experiment come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DataSource {
    /// Fixed data; every trial sees the same series.
    Files { x: PathBuf, y: PathBuf, has_header: bool },
    /// Two independently seeded single-series processes.
    TwoSample { x: ProcessSpec, y: ProcessSpec, nx: usize, ny: usize },
    /// `(X, Y)` from one run of a paired process.
    Paired { process: ProcessSpec, n: usize },
    /// `X` from one run and `Y` from an independent run of a paired process,
    /// which makes them independent while keeping the marginal dynamics.
    Surrogate { process: ProcessSpec, n: usize },
}

impl DataSource {
    /// Draws the `(x, y)` series for one trial.
    pub fn draw(&self, seed: u64) -> Result<(TimeSeries, TimeSeries)> {
        let single = |p: &ProcessSpec, n, s| match p.generate(n, s)? {
            Generated::Single(ts) => Ok(ts),
            Generated::Pair(_) => Err(Error::InvalidConfig("expected a single-series process".into())),
        };
        let pair = |p: &ProcessSpec, n, s| match p.generate(n, s)? {
            Generated::Pair(z) => Ok(z),
            Generated::Single(_) => Err(Error::InvalidConfig("expected a paired process".into())),
        };
        match self {
            DataSource::Files { x, y, has_header } => Ok((load_csv(x, *has_header)?, load_csv(y, *has_header)?)),
            DataSource::TwoSample { x, y, nx, ny } => Ok((
                single(x, *nx, derive_seed(seed, 0))?,
                single(y, *ny, derive_seed(seed, 1))?,
            )),
            DataSource::Paired { process, n } => {
                let z = pair(process, *n, derive_seed(seed, 0))?;
                Ok((z.x, z.y))
            }
            DataSource::Surrogate { process, n } => {
                let a = pair(process, *n, derive_seed(seed, 0))?;
                let b = pair(process, *n, derive_seed(seed, 1))?;
                Ok((a.x, b.y))
            }
        }
    }

    fn is_fixed(&self) -> bool {
        matches!(self, DataSource::Files { .. })
    }
}

/// Settings shared by all tests. `bootstrap.seed` is overwritten per run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    pub kernel: KernelSpec,
    pub bootstrap: BootstrapConfig,
    pub alpha: f64,
    /// Permutations (MMD) or circular shifts (Shift-HSIC).
    pub permutations: usize,
    pub lags: LagRadius,
    pub gpd: bool,
    pub gpd_tail_fraction: f64,
}

impl Default for TestConfig {
    fn default() -> Self {
        Self {
            kernel: KernelSpec::gaussian_median(),
            bootstrap: BootstrapConfig::default(),
            alpha: 0.05,
            permutations: 300,
            lags: LagRadius::Auto,
            gpd: true,
            gpd_tail_fraction: crate::gpd::DEFAULT_TAIL_FRACTION,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub name: String,
    pub source: DataSource,
    pub test: TestKind,
    pub trials: usize,
    pub config: TestConfig,
    pub seed: u64,
}

/// JSON view of one test run; field order is the serialized key order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub method: String,
    pub statistic: f64,
    /// `null` when infinite.
    pub threshold: f64,
    pub p_value: f64,
    pub reject: bool,
    pub alpha: f64,
    pub n: usize,
    #[serde(rename = "B")]
    pub replicates: usize,
    pub l_n: Option<f64>,
    pub seed: u64,
    pub factor_applied: bool,
    pub notes: Vec<String>,
}

impl TestReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    fn from_result(r: TestResult) -> Self {
        Self {
            replicates: r.replicates(),
            method: r.method,
            statistic: r.statistic,
            threshold: r.threshold,
            p_value: r.p_value,
            reject: r.reject,
            alpha: r.alpha,
            n: r.n,
            l_n: r.block_length,
            seed: r.seed,
            factor_applied: r.factor_applied,
            notes: r.notes,
        }
    }
}

/// Runs `test` on `(x, y)` with bootstrap / permutation seed `seed`.
pub fn evaluate(x: &TimeSeries, y: &TimeSeries, test: TestKind, config: &TestConfig, seed: u64) -> Result<TestReport> {
    let mut boot = config.bootstrap;
    boot.seed = seed;
    if test.is_two_sample() {
        let input = TwoSampleInput::new(x.clone(), y.clone(), config.kernel)?;
        let r = match test {
            TestKind::MmdWild => mmd_test(&input, &boot, config.alpha)?,
            TestKind::MmdPaired => mmd_paired_test(&input, &boot, config.alpha)?,
            _ => mmd_permutation_test(&input, config.permutations, config.alpha, seed)?,
        };
        return Ok(TestReport::from_result(r));
    }
    let z = PairedSeries::new(x.clone(), y.clone())?;
    match test {
        TestKind::HsicWild => Ok(TestReport::from_result(instantaneous_independence_test(
            &z,
            &config.kernel,
            &config.kernel,
            &boot,
            config.alpha,
        )?)),
        TestKind::HsicShift => Ok(TestReport::from_result(shift_hsic_test(
            &z,
            &config.kernel,
            &config.kernel,
            config.permutations,
            config.alpha,
            seed,
        )?)),
        _ => {
            let lag_cfg = LagHsicConfig {
                lags: config.lags,
                alpha: config.alpha,
                bootstrap: boot,
                gpd_enabled: config.gpd,
                gpd_tail_fraction: config.gpd_tail_fraction,
            };
            let r = lag_hsic_test(&z, &config.kernel, &config.kernel, &lag_cfg)?;
            let hypotheses = (2 * r.radius + 1) as f64;
            let variant = match boot.variant {
                crate::Variant::Vb1 => "vb1",
                crate::Variant::Vb2 => "vb2",
            };
            Ok(TestReport {
                method: format!("lag-hsic-{variant}"),
                statistic: r.max_statistic,
                threshold: r.threshold,
                p_value: (hypotheses * p_value(&r.null_samples, r.max_statistic)).min(1.0),
                reject: r.reject,
                alpha: r.alpha,
                n: r.n,
                replicates: r.null_samples.len(),
                l_n: Some(boot.block_length),
                seed,
                factor_applied: boot.degree_factor,
                notes: vec![
                    format!("radius={}", r.radius),
                    format!("argmax_lag={}", r.argmax_lag),
                    format!("level={}", r.level),
                    format!("threshold_method={}", r.threshold_method.name()),
                ],
            })
        }
    }
}

/// One run of `spec.test` on trial 0's data with bootstrap seed `spec.seed`.
pub fn run_test(spec: &ExperimentSpec) -> Result<TestReport> {
    let data_seed = if spec.source.is_fixed() { spec.seed } else { derive_seed(spec.seed, 0) };
    let (x, y) = spec.source.draw(data_seed)?;
    evaluate(&x, &y, spec.test, &spec.config, spec.seed)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub statistic: f64,
    pub threshold: f64,
    pub p_value: f64,
    pub reject: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RejectionReport {
    pub experiment: String,
    pub method: String,
    pub trials: usize,
    pub rejections: usize,
    pub rejection_rate: f64,
    pub mean_statistic: f64,
    /// `null` when some trial had an infinite threshold.
    pub mean_threshold: f64,
    /// Only filled when timing is requested, so default output is reproducible.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_s: Option<f64>,
    pub records: Vec<TrialRecord>,
}

impl RejectionReport {
    pub fn from_records(experiment: &str, method: &str, records: Vec<TrialRecord>) -> Self {
        let trials = records.len();
        let rejections = records.iter().filter(|r| r.reject).count();
        let mean = |f: fn(&TrialRecord) -> f64| records.iter().map(f).sum::<f64>() / trials.max(1) as f64;
        Self {
            experiment: experiment.to_string(),
            method: method.to_string(),
            trials,
            rejections,
            rejection_rate: rejections as f64 / trials.max(1) as f64,
            mean_statistic: mean(|r| r.statistic),
            mean_threshold: mean(|r| r.threshold),
            wall_time_s: None,
            records,
        }
    }
}

/// Seed of trial `t`: fixed data sources reuse the data and vary only the
/// bootstrap seed.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    derive_seed(seed, trial as u64)
}

/// Runs several tests on the same per-trial data. Trials are evaluated in
/// parallel; results come back in trial order.
pub fn run_trials(
    source: &DataSource,
    tests: &[(TestKind, TestConfig)],
    trials: usize,
    seed: u64,
) -> Result<Vec<Vec<TrialRecord>>> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be >= 1".into()));
    }
    let fixed = if source.is_fixed() { Some(source.draw(seed)?) } else { None };
    let per_trial: Vec<Vec<TrialRecord>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = trial_seed(seed, t);
            let drawn;
            let (x, y) = match &fixed {
                Some((x, y)) => (x, y),
                None => {
                    drawn = source.draw(s)?;
                    (&drawn.0, &drawn.1)
                }
            };
            tests
                .iter()
                .map(|(kind, cfg)| {
                    let r = evaluate(x, y, *kind, cfg, s)?;
                    Ok(TrialRecord {
                        trial: t,
                        seed: s,
                        statistic: r.statistic,
                        threshold: r.threshold,
                        p_value: r.p_value,
                        reject: r.reject,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    // transpose to per-test record lists
    let mut out = vec![Vec::with_capacity(trials); tests.len()];
    for trial in per_trial {
        for (i, rec) in trial.into_iter().enumerate() {
            out[i].push(rec);
        }
    }
    Ok(out)
}

/// Monte Carlo rejection rate of `spec.test` over `spec.trials` trials.
pub fn run_experiment(spec: &ExperimentSpec, timing: bool) -> Result<RejectionReport> {
    let start = Instant::now();
    let mut records = run_trials(&spec.source, &[(spec.test, spec.config.clone())], spec.trials, spec.seed)?;
    let mut report = RejectionReport::from_records(&spec.name, spec.test.name(), records.remove(0));
    if timing {
        report.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    Ok(report)
}
