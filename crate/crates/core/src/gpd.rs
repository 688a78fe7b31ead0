//! Generalized Pareto tail quantiles (peaks over threshold).
//!
//! Extreme bootstrap quantiles such as `1 - alpha / (2M + 1)` sit beyond the
//! resolution of a few hundred replicates. Exceedances over a high empirical
//! threshold `u` are fitted with a GPD and the quantile is extrapolated:
//!
//! ```text
//! Q(q) = u + beta / xi * (((1 - q) / p_u)^(-xi) - 1)      (beta ln(p_u / (1 - q)) at xi = 0)
//! ```
//!
//! where `p_u` is the tail fraction. Fitting is maximum likelihood over
//! `xi in [-0.5, 1]` (profile likelihood, grid scan refined by golden-section
//! search in both `xi` and `ln beta`) with a method-of-moments fallback.

use crate::error::{Error, Result};
use crate::result::order_statistic_index;
use serde::{Deserialize, Serialize};

pub const MIN_SAMPLES: usize = 50;
pub const DEFAULT_TAIL_FRACTION: f64 = 0.1;
const SHAPE_RANGE: (f64, f64) = (-0.5, 1.0);
const MIN_EXCEEDANCES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailMethod {
    /// Order statistic; `q` inside the bulk or degenerate exceedances.
    Empirical,
    Mle,
    /// MLE failed; moments estimate used instead.
    Moments,
}

impl TailMethod {
    pub fn name(self) -> &'static str {
        match self {
            TailMethod::Empirical => "empirical",
            TailMethod::Mle => "gpd-mle",
            TailMethod::Moments => "gpd-moments",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailQuantile {
    pub value: f64,
    pub method: TailMethod,
    pub shape: Option<f64>,
    pub scale: Option<f64>,
    pub exceedance_threshold: Option<f64>,
    pub exceedances: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpdFit {
    pub shape: f64,
    pub scale: f64,
}

/// GPD log-likelihood of positive exceedances `y`.
pub fn gpd_log_likelihood(y: &[f64], shape: f64, scale: f64) -> f64 {
    if scale <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let k = y.len() as f64;
    if shape.abs() < 1e-12 {
        return -k * scale.ln() - y.iter().sum::<f64>() / scale;
    }
    let mut acc = 0.0;
    for &v in y {
        let t = 1.0 + shape * v / scale;
        if t <= 0.0 {
            return f64::NEG_INFINITY;
        }
        acc += t.ln();
    }
    -k * scale.ln() - (1.0 + 1.0 / shape) * acc
}

/// Maximizes a 1-D function on `[lo, hi]`: grid scan, then golden-section
/// search in the bracket around the best grid point.
fn maximize(f: impl Fn(f64) -> f64, lo: f64, hi: f64, grid: usize) -> (f64, f64) {
    let step = (hi - lo) / (grid - 1) as f64;
    let mut best = (lo, f(lo));
    let mut best_i = 0;
    for i in 1..grid {
        let x = lo + step * i as f64;
        let v = f(x);
        if v > best.1 {
            best = (x, v);
            best_i = i;
        }
    }
    let mut a = lo + step * best_i.saturating_sub(1) as f64;
    let mut b = (lo + step * (best_i + 1) as f64).min(hi);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if (b - a).abs() <= 1e-10 * (1.0 + a.abs() + b.abs()) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    let (x, v) = if fc >= fd { (c, fc) } else { (d, fd) };
    if v >= best.1 {
        (x, v)
    } else {
        best
    }
}

fn profile_scale(y: &[f64], shape: f64, y_max: f64, y_mean: f64) -> (f64, f64) {
    let lower = if shape < 0.0 {
        -shape * y_max * (1.0 + 1e-9)
    } else {
        y_mean * 1e-3
    };
    let upper = 20.0 * y_max.max(y_mean);
    let (ln_scale, ll) = maximize(
        |s| gpd_log_likelihood(y, shape, s.exp()),
        lower.ln(),
        upper.ln(),
        40,
    );
    (ln_scale.exp(), ll)
}

/// Maximum-likelihood fit of positive exceedances; `None` if it fails.
pub fn fit_mle(y: &[f64]) -> Option<GpdFit> {
    if y.len() < MIN_EXCEEDANCES || y.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return None;
    }
    let y_max = y.iter().copied().fold(0.0, f64::max);
    let y_mean = y.iter().sum::<f64>() / y.len() as f64;
    let (shape, ll) = maximize(
        |xi| profile_scale(y, xi, y_max, y_mean).1,
        SHAPE_RANGE.0,
        SHAPE_RANGE.1,
        31,
    );
    let (scale, _) = profile_scale(y, shape, y_max, y_mean);
    if ll.is_finite() && scale.is_finite() && scale > 0.0 {
        Some(GpdFit { shape, scale })
    } else {
        None
    }
}

/// Method-of-moments fit; `None` for zero variance.
pub fn fit_moments(y: &[f64]) -> Option<GpdFit> {
    let k = y.len() as f64;
    if y.len() < 2 {
        return None;
    }
    let mean = y.iter().sum::<f64>() / k;
    let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0);
    if !(var > 0.0 && mean > 0.0) {
        return None;
    }
    let r = mean * mean / var;
    Some(GpdFit {
        shape: 0.5 * (1.0 - r),
        scale: 0.5 * mean * (r + 1.0),
    })
}

/// `u + beta/xi (((1-q)/p_u)^(-xi) - 1)`.
pub fn gpd_quantile(u: f64, fit: GpdFit, q: f64, tail_fraction: f64) -> f64 {
    let ratio = (1.0 - q) / tail_fraction;
    if fit.shape.abs() < 1e-9 {
        u - fit.scale * ratio.ln()
    } else {
        u + fit.scale / fit.shape * (ratio.powf(-fit.shape) - 1.0)
    }
}

fn empirical(sorted: &[f64], q: f64) -> f64 {
    let k = order_statistic_index(sorted.len(), q).min(sorted.len());
    sorted[k - 1]
}

pub fn gpd_tail_quantile(samples: &[f64], q: f64, tail_fraction: f64) -> Result<TailQuantile> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidConfig(format!("quantile level must lie in (0, 1), got {q}")));
    }
    if !(tail_fraction > 0.0 && tail_fraction < 0.5) {
        return Err(Error::InvalidConfig(format!(
            "tail fraction must lie in (0, 0.5), got {tail_fraction}"
        )));
    }
    if samples.len() < MIN_SAMPLES {
        return Err(Error::TooShort {
            required: MIN_SAMPLES,
            got: samples.len(),
        });
    }
    if let Some(pos) = samples.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { row: pos, column: 0 });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let fallback = |exceedances: usize, u: Option<f64>| TailQuantile {
        value: empirical(&sorted, q),
        method: TailMethod::Empirical,
        shape: None,
        scale: None,
        exceedance_threshold: u,
        exceedances,
    };
    if q <= 1.0 - tail_fraction {
        return Ok(fallback(0, None));
    }
    let u = empirical(&sorted, 1.0 - tail_fraction);
    let y: Vec<f64> = sorted.iter().filter(|&&v| v > u).map(|v| v - u).collect();
    let spread = y.iter().copied().fold(0.0, f64::max) - y.iter().copied().fold(f64::INFINITY, f64::min);
    if y.len() < MIN_EXCEEDANCES || spread <= 0.0 {
        return Ok(fallback(y.len(), Some(u)));
    }
    let (fit, method) = match fit_mle(&y) {
        Some(f) => (f, TailMethod::Mle),
        None => match fit_moments(&y) {
            Some(f) => (f, TailMethod::Moments),
            None => return Ok(fallback(y.len(), Some(u))),
        },
    };
    Ok(TailQuantile {
        value: gpd_quantile(u, fit, q, tail_fraction),
        method,
        shape: Some(fit.shape),
        scale: Some(fit.scale),
        exceedance_threshold: Some(u),
        exceedances: y.len(),
    })
}
