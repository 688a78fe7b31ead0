//! Multiple-lag independence test (lag-HSIC).
//!
//! `S_m = n_m HSIC(X_t, Y_{t+m})` is computed for every lag `|m| <= M` on the
//! overlapping (truncated, not circular) index range of length `n_m = n - |m|`.
//! One set of wild-bootstrap samples `c n V_b` from the unshifted series
//! gives the null law shared by all lags under stationarity. The test
//! rejects when `max_m S_m` exceeds the Bonferroni quantile
//! `q = 1 - alpha / (2M + 1)` of that law, estimated with a GPD tail fit when
//! enabled and by the order statistic `ceil(q (B + 1))` otherwise.

use crate::error::{check_alpha, Error, Result};
use crate::gpd::{gpd_tail_quantile, TailMethod, TailQuantile, DEFAULT_TAIL_FRACTION, MIN_SAMPLES};
use crate::hsic::{hsic_null_samples, hsic_views, paired_grams, MIN_LENGTH};
use crate::kernels::KernelSpec;
use crate::result::{exceeds, order_statistic_threshold};
use crate::series::PairedSeries;
use crate::wild_bootstrap::{BootstrapConfig, Variant};
use ndarray::s;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LagRadius {
    Fixed(usize),
    /// `max(10, ceil(ln n))`.
    Auto,
}

pub fn auto_radius(n: usize) -> usize {
    10.max((n as f64).ln().ceil() as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagHsicConfig {
    pub lags: LagRadius,
    pub alpha: f64,
    pub bootstrap: BootstrapConfig,
    pub gpd_enabled: bool,
    pub gpd_tail_fraction: f64,
}

impl Default for LagHsicConfig {
    fn default() -> Self {
        Self {
            lags: LagRadius::Auto,
            alpha: 0.05,
            bootstrap: BootstrapConfig {
                variant: Variant::Vb2,
                ..BootstrapConfig::default()
            },
            gpd_enabled: true,
            gpd_tail_fraction: DEFAULT_TAIL_FRACTION,
        }
    }
}

impl LagHsicConfig {
    pub fn radius(&self, n: usize) -> usize {
        match self.lags {
            LagRadius::Fixed(m) => m,
            LagRadius::Auto => auto_radius(n),
        }
    }

    /// Bonferroni level `1 - alpha / (2M + 1)`.
    pub fn level(&self, n: usize) -> f64 {
        1.0 - self.alpha / (2 * self.radius(n) + 1) as f64
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        check_alpha(self.alpha)?;
        self.bootstrap.validate()?;
        let m = self.radius(n);
        if 2 * (2 * m + 1) >= n {
            return Err(Error::InvalidConfig(format!(
                "lag radius {m} too large for n={n} (need 2M + 1 < n/2)"
            )));
        }
        if self.gpd_enabled {
            if !(self.gpd_tail_fraction > 0.0 && self.gpd_tail_fraction < 0.5) {
                return Err(Error::InvalidConfig(format!(
                    "gpd tail fraction must lie in (0, 0.5), got {}",
                    self.gpd_tail_fraction
                )));
            }
            if self.bootstrap.replicates < MIN_SAMPLES {
                return Err(Error::InvalidConfig(format!(
                    "gpd tail fit needs at least {MIN_SAMPLES} replicates"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagScanResult {
    pub lags: Vec<i64>,
    pub statistics: Vec<f64>,
    pub threshold: f64,
    pub threshold_method: TailMethod,
    pub gpd: Option<TailQuantile>,
    pub argmax_lag: i64,
    pub max_statistic: f64,
    pub reject: bool,
    pub level: f64,
    pub alpha: f64,
    pub radius: usize,
    pub n: usize,
    pub seed: u64,
    pub null_samples: Vec<f64>,
}

/// `(X_t, Y_{t+m})` over the overlapping index range.
pub fn shifted_series(z: &PairedSeries, m: i64) -> Result<PairedSeries> {
    let n = z.len();
    let a = m.unsigned_abs() as usize;
    if 2 * a >= n.max(1) {
        return Err(Error::InvalidConfig(format!("lag {m} too large for n={n}")));
    }
    let (x, y) = if m >= 0 {
        (z.x.slice(0, n - a), z.y.slice(a, n))
    } else {
        (z.x.slice(a, n), z.y.slice(0, n - a))
    };
    PairedSeries::new(x, y)
}

/// Threshold for `max_m S_m` from the null samples.
pub fn scan_threshold(
    null_samples: &[f64],
    level: f64,
    gpd_enabled: bool,
    tail_fraction: f64,
) -> Result<(f64, TailMethod, Option<TailQuantile>)> {
    if gpd_enabled {
        let t = gpd_tail_quantile(null_samples, level, tail_fraction)?;
        Ok((t.value, t.method, Some(t)))
    } else {
        Ok((
            order_statistic_threshold(null_samples, level),
            TailMethod::Empirical,
            None,
        ))
    }
}

pub fn lag_hsic_test(
    z: &PairedSeries,
    k: &KernelSpec,
    l: &KernelSpec,
    config: &LagHsicConfig,
) -> Result<LagScanResult> {
    let n = z.len();
    if n < MIN_LENGTH {
        return Err(Error::TooShort {
            required: MIN_LENGTH,
            got: n,
        });
    }
    config.validate(n)?;
    let radius = config.radius(n);
    let (kg, lg, _, _) = paired_grams(z, k, l)?;

    let mut lags = Vec::with_capacity(2 * radius + 1);
    let mut statistics = Vec::with_capacity(2 * radius + 1);
    for m in -(radius as i64)..=(radius as i64) {
        let a = m.unsigned_abs() as usize;
        let len = n - a;
        // Rows of X and of Y entering the shifted pairing.
        let (xr, yr) = if m >= 0 { (0..len, a..n) } else { (a..n, 0..len) };
        let kv = kg.slice(s![xr.clone(), xr]);
        let lv = lg.slice(s![yr.clone(), yr]);
        lags.push(m);
        statistics.push(len as f64 * hsic_views(kv, lv));
    }

    let null_samples = hsic_null_samples(kg.view(), lg.view(), &config.bootstrap);
    let level = config.level(n);
    let (threshold, threshold_method, gpd) =
        scan_threshold(&null_samples, level, config.gpd_enabled, config.gpd_tail_fraction)?;
    let (best, &max_statistic) = statistics
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least lag 0");
    Ok(LagScanResult {
        argmax_lag: lags[best],
        reject: exceeds(max_statistic, threshold, &null_samples),
        lags,
        statistics,
        threshold,
        threshold_method,
        gpd,
        max_statistic,
        level,
        alpha: config.alpha,
        radius,
        n,
        seed: config.bootstrap.seed,
        null_samples,
    })
}
