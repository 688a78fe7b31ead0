//! Seeded synthetic processes used by the benchmarks.
//!
//! Every generator is a deterministic function of its parameters and seed.
//! Independent components (e.g. the `X` and `Y` noise of a pair) draw from
//! distinct purpose-tagged streams of the same seed.

use crate::error::{Error, Result};
use crate::rng::{tag, StreamKey, StreamRng};
use crate::series::{PairedSeries, TimeSeries};
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Scans / steps discarded before the first kept sample.
pub const BURN_IN: usize = 500;

/// Target of the MCMC experiment: `N(0, [[15.5, 14.5], [14.5, 15.5]])`.
pub const GIBBS_MEAN: [f64; 2] = [0.0, 0.0];
pub const GIBBS_COV: [[f64; 2]; 2] = [[15.5, 14.5], [14.5, 15.5]];

fn normal(rng: &mut StreamRng) -> f64 {
    StandardNormal.sample(rng)
}

fn check_cov(cov: &[[f64; 2]; 2]) -> Result<()> {
    let sym = (cov[0][1] - cov[1][0]).abs() <= 1e-12 * cov[0][1].abs().max(1.0);
    let det = cov[0][0] * cov[1][1] - cov[0][1] * cov[1][0];
    if sym && cov[0][0] > 0.0 && det > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig("covariance must be symmetric positive definite".into()))
    }
}

/// Systematic-scan Gibbs sampler for a bivariate normal with exact
/// conditionals, started at the mean. Keeps every `thin`-th full scan after
/// [`BURN_IN`] scans.
pub fn gen_gibbs_normal(
    n: usize,
    mean: [f64; 2],
    cov: [[f64; 2]; 2],
    thin: usize,
    seed: u64,
) -> Result<TimeSeries> {
    check_cov(&cov)?;
    if thin == 0 {
        return Err(Error::InvalidConfig("thin must be >= 1".into()));
    }
    let mut rng = StreamKey::new(seed, 0, tag::DATA).rng();
    let b1 = cov[0][1] / cov[1][1];
    let s1 = (cov[0][0] - cov[0][1] * cov[0][1] / cov[1][1]).sqrt();
    let b2 = cov[0][1] / cov[0][0];
    let s2 = (cov[1][1] - cov[0][1] * cov[0][1] / cov[0][0]).sqrt();
    let (mut x1, mut x2) = (mean[0], mean[1]);
    let mut scan = |rng: &mut StreamRng| {
        x1 = mean[0] + b1 * (x2 - mean[1]) + s1 * normal(rng);
        x2 = mean[1] + b2 * (x1 - mean[0]) + s2 * normal(rng);
        [x1, x2]
    };
    for _ in 0..BURN_IN {
        scan(&mut rng);
    }
    let mut values = Vec::with_capacity(2 * n);
    for _ in 0..n {
        let mut last = [0.0; 2];
        for _ in 0..thin {
            last = scan(&mut rng);
        }
        values.extend_from_slice(&last);
    }
    TimeSeries::new(values, 2)
}

/// I.i.d. draws from `N(mean, cov)`.
pub fn gen_iid_normal(n: usize, mean: [f64; 2], cov: [[f64; 2]; 2], seed: u64) -> Result<TimeSeries> {
    check_cov(&cov)?;
    let mut rng = StreamKey::new(seed, 0, tag::DATA).rng();
    let l11 = cov[0][0].sqrt();
    let l21 = cov[1][0] / l11;
    let l22 = (cov[1][1] - l21 * l21).sqrt();
    let mut values = Vec::with_capacity(2 * n);
    for _ in 0..n {
        let (e1, e2) = (normal(&mut rng), normal(&mut rng));
        values.push(mean[0] + l11 * e1);
        values.push(mean[1] + l21 * e1 + l22 * e2);
    }
    TimeSeries::new(values, 2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PitchParams {
    /// Samples per period.
    pub d: usize,
    /// Smoothing width as a fraction of the period.
    pub sigma_frac: f64,
    /// AR coefficient of the latent pattern.
    pub lambda: f64,
    /// Neighbouring periods included on each side.
    pub j_max: usize,
}

impl Default for PitchParams {
    fn default() -> Self {
        Self {
            d: 20,
            sigma_frac: 0.1,
            lambda: 0.8,
            j_max: 2,
        }
    }
}

/// Pitch-evoking sound: one observation per period, `d` samples each.
///
/// A latent pattern `a_i = lambda a_{i-1} + sqrt(1 - lambda^2) eps_i` is
/// smoothed by Gaussian bumps of width `sigma = sigma_frac` periods placed on
/// the grid `t_r = (r - 1) / d` and superposed over periods `|j - i| <= j_max`.
/// The period length is 1. Patterns before the first period come from the
/// time-reversed recursion on a separate stream, so `j_max` changes only the
/// truncation, not the random draws.
pub fn gen_pitch_sound(num_periods: usize, params: PitchParams, seed: u64) -> Result<TimeSeries> {
    let PitchParams { d, sigma_frac, lambda, j_max } = params;
    if d < 2 || !(lambda > 0.0 && lambda < 1.0) || !(sigma_frac > 0.0 && sigma_frac.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "invalid pitch parameters: d={d}, lambda={lambda}, sigma_frac={sigma_frac}"
        )));
    }
    let innov = (1.0 - lambda * lambda).sqrt();
    let latent_len = num_periods + 2 * j_max;
    let mut latent = vec![vec![0.0; d]; latent_len];
    let mut fwd = StreamKey::new(seed, 0, tag::DATA).rng();
    let mut bwd = StreamKey::new(seed, 0, tag::DATA_BACKWARD).rng();
    // latent[j_max] is a_0; forward for later periods, backward for earlier ones.
    for v in latent[j_max].iter_mut() {
        *v = normal(&mut fwd);
    }
    for j in (j_max + 1)..latent_len {
        let (done, rest) = latent.split_at_mut(j);
        for (v, prev) in rest[0].iter_mut().zip(&done[j - 1]) {
            *v = lambda * prev + innov * normal(&mut fwd);
        }
    }
    for j in (0..j_max).rev() {
        let (rest, done) = latent.split_at_mut(j + 1);
        for (v, next) in rest[j].iter_mut().zip(&done[0]) {
            *v = lambda * next + innov * normal(&mut bwd);
        }
    }
    let sigma = sigma_frac;
    let t = |r: usize| r as f64 / d as f64;
    // weights[o][r][s] for period offset o - j_max
    let weights: Vec<Vec<Vec<f64>>> = (0..=2 * j_max)
        .map(|o| {
            let off = o as f64 - j_max as f64;
            (0..d)
                .map(|r| {
                    (0..d)
                        .map(|s| {
                            let u = t(r) - t(s) - off;
                            (-u * u / (2.0 * sigma * sigma)).exp()
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut values = Vec::with_capacity(num_periods * d);
    for i in 0..num_periods {
        for r in 0..d {
            let mut acc = 0.0;
            for (o, w) in weights.iter().enumerate() {
                let a = &latent[i + o];
                acc += w[r].iter().zip(a).map(|(u, v)| u * v).sum::<f64>();
            }
            values.push(acc);
        }
    }
    TimeSeries::new(values, d)
}

/// AR(1) pair whose innovations `(eps, eta)` are standard bivariate normal
/// conditioned on `eps^2 + eta^2 > radius^2`. The disc removal makes the
/// innovations, hence `X` and `Y`, dependent for `radius > 0`.
///
/// This is a reconstruction of the "extinct Gaussian" process: the knobs are
/// the AR coefficient (temporal dependence) and the extinction radius
/// (cross dependence).
pub fn gen_extinct_gaussian_pair(n: usize, ar: f64, radius: f64, seed: u64) -> Result<PairedSeries> {
    if !(0.0..1.0).contains(&ar) || !(radius >= 0.0 && radius.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "need 0 <= ar < 1 and radius >= 0, got ar={ar}, radius={radius}"
        )));
    }
    let mut rng = StreamKey::new(seed, 0, tag::DATA).rng();
    let r2 = radius * radius;
    let (mut x, mut y) = (0.0, 0.0);
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for t in 0..(BURN_IN + n) {
        let (e, h) = loop {
            let (e, h) = (normal(&mut rng), normal(&mut rng));
            if e * e + h * h > r2 {
                break (e, h);
            }
        };
        x = ar * x + e;
        y = ar * y + h;
        if t >= BURN_IN {
            xs.push(x);
            ys.push(y);
        }
    }
    PairedSeries::new(TimeSeries::from_scalars(xs)?, TimeSeries::from_scalars(ys)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VecForm {
    /// `X_t = eps sqrt(s_t)`: `s_t` is the conditional variance.
    Variance,
    /// `X_t = eps s_t` literally; explodes within a few dozen steps.
    AsPrinted,
}

/// Common-variance pair: `s_t = 1 + c (X_{t-1}^2 + Y_{t-1}^2)`, `s_0 = 1`,
/// `X_t = eps_1 sqrt(s_t)`, `Y_t = eps_2 sqrt(s_t)`.
pub fn gen_vec_pair(n: usize, coupling: f64, seed: u64) -> Result<PairedSeries> {
    gen_vec_pair_with(n, coupling, VecForm::Variance, seed)
}

pub fn gen_vec_pair_with(n: usize, coupling: f64, form: VecForm, seed: u64) -> Result<PairedSeries> {
    if !(0.0..=0.45).contains(&coupling) {
        return Err(Error::InvalidConfig(format!(
            "coupling must lie in [0, 0.45], got {coupling}"
        )));
    }
    let mut e1 = StreamKey::new(seed, 0, tag::DATA).rng();
    let mut e2 = StreamKey::new(seed, 0, tag::DATA_AUX).rng();
    let mut s: f64 = 1.0;
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for t in 0..(BURN_IN + n) {
        let amp = match form {
            VecForm::Variance => s.sqrt(),
            VecForm::AsPrinted => s,
        };
        let x = normal(&mut e1) * amp;
        let y = normal(&mut e2) * amp;
        if !(x.abs() <= 1e6 && y.abs() <= 1e6) {
            return Err(Error::NumericBlowUp { t });
        }
        s = 1.0 + coupling * (x * x + y * y);
        if t >= BURN_IN {
            xs.push(x);
            ys.push(y);
        }
    }
    PairedSeries::new(TimeSeries::from_scalars(xs)?, TimeSeries::from_scalars(ys)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorParams {
    pub coupling: f64,
    pub f1: f64,
    pub f2: f64,
    /// Sampling period in seconds.
    pub ts: f64,
}

impl Default for OscillatorParams {
    fn default() -> Self {
        Self {
            coupling: 0.4,
            f1: 4.0,
            f2: 20.0,
            ts: 0.01,
        }
    }
}

/// Phase-coupled oscillators: `X_t = cos(phi1_t)`,
/// `Y_t = (2 + C sin(phi1_t)) cos(phi2_t)`, phases are random walks with drift
/// `2 pi f Ts` and noise `0.1 eps`, started at 0.
pub fn gen_oscillator_pair(n: usize, params: OscillatorParams, seed: u64) -> Result<PairedSeries> {
    if !(params.ts > 0.0) {
        return Err(Error::InvalidConfig("sampling period must be positive".into()));
    }
    let mut e1 = StreamKey::new(seed, 0, tag::DATA).rng();
    let mut e2 = StreamKey::new(seed, 0, tag::DATA_AUX).rng();
    let (d1, d2) = (2.0 * PI * params.f1 * params.ts, 2.0 * PI * params.f2 * params.ts);
    let (mut p1, mut p2) = (0.0f64, 0.0f64);
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        p1 += 0.1 * normal(&mut e1) + d1;
        p2 += 0.1 * normal(&mut e2) + d2;
        xs.push(p1.cos());
        ys.push((2.0 + params.coupling * p1.sin()) * p2.cos());
    }
    PairedSeries::new(TimeSeries::from_scalars(xs)?, TimeSeries::from_scalars(ys)?)
}

fn ar1(n: usize, ar: f64, rng: &mut StreamRng) -> Vec<f64> {
    let mut v = 0.0;
    let mut out = Vec::with_capacity(n);
    for t in 0..(BURN_IN + n) {
        v = ar * v + normal(rng);
        if t >= BURN_IN {
            out.push(v);
        }
    }
    out
}

/// Scalar AR(1) with unit innovations.
pub fn gen_ar1(n: usize, ar: f64, seed: u64) -> Result<TimeSeries> {
    if !(ar.abs() < 1.0) {
        return Err(Error::InvalidConfig(format!("|ar| must be < 1, got {ar}")));
    }
    TimeSeries::from_scalars(ar1(n, ar, &mut StreamKey::new(seed, 0, tag::DATA).rng()))
}

/// Two independent AR(1) chains with the same coefficient.
pub fn gen_ar1_pair(n: usize, ar: f64, seed: u64) -> Result<PairedSeries> {
    if !(ar.abs() < 1.0) {
        return Err(Error::InvalidConfig(format!("|ar| must be < 1, got {ar}")));
    }
    let x = ar1(n, ar, &mut StreamKey::new(seed, 0, tag::DATA).rng());
    let y = ar1(n, ar, &mut StreamKey::new(seed, 0, tag::DATA_AUX).rng());
    PairedSeries::new(TimeSeries::from_scalars(x)?, TimeSeries::from_scalars(y)?)
}

pub fn gen_white_noise_pair(n: usize, seed: u64) -> Result<PairedSeries> {
    gen_ar1_pair(n, 0.0, seed)
}

/// A process family with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum ProcessSpec {
    GibbsNormal { mean: [f64; 2], cov: [[f64; 2]; 2], thin: usize },
    IidNormal { mean: [f64; 2], cov: [[f64; 2]; 2] },
    PitchSound(PitchParams),
    ExtinctGaussianPair { ar: f64, radius: f64 },
    VecPair { coupling: f64 },
    OscillatorPair(OscillatorParams),
    WhiteNoisePair,
    Ar1Pair { ar: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Generated {
    Single(TimeSeries),
    Pair(PairedSeries),
}

impl ProcessSpec {
    pub fn generate(&self, n: usize, seed: u64) -> Result<Generated> {
        use Generated::*;
        Ok(match *self {
            ProcessSpec::GibbsNormal { mean, cov, thin } => Single(gen_gibbs_normal(n, mean, cov, thin, seed)?),
            ProcessSpec::IidNormal { mean, cov } => Single(gen_iid_normal(n, mean, cov, seed)?),
            ProcessSpec::PitchSound(p) => Single(gen_pitch_sound(n, p, seed)?),
            ProcessSpec::ExtinctGaussianPair { ar, radius } => Pair(gen_extinct_gaussian_pair(n, ar, radius, seed)?),
            ProcessSpec::VecPair { coupling } => Pair(gen_vec_pair(n, coupling, seed)?),
            ProcessSpec::OscillatorPair(p) => Pair(gen_oscillator_pair(n, p, seed)?),
            ProcessSpec::WhiteNoisePair => Pair(gen_white_noise_pair(n, seed)?),
            ProcessSpec::Ar1Pair { ar } => Pair(gen_ar1_pair(n, ar, seed)?),
        })
    }
}
