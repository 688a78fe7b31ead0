//! Auxiliary wild-bootstrap processes.
//!
//! The process is the stationary Ornstein-Uhlenbeck-type AR(1)
//! `W_t = e^{-1/l} W_{t-1} + sqrt(1 - e^{-2/l}) eps_t` with `W_0 ~ N(0, 1)`,
//! so `E W_s W_t = exp(-|s - t| / l)`. The block length `l` controls how
//! slowly the multipliers decorrelate.

use crate::error::{Error, Result};
use crate::rng::{tag, StreamKey};
use ndarray::Array2;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Raw multipliers `W`.
    Vb1,
    /// Empirically centered multipliers `W - mean(W)`.
    Vb2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub block_length: f64,
    pub replicates: usize,
    pub variant: Variant,
    pub seed: u64,
    /// Multiply bootstrap samples of a degree-`m` core by `binom(m, 2)`.
    /// Only changes anything for `m > 2` (HSIC uses 6).
    pub degree_factor: bool,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            block_length: 20.0,
            replicates: 300,
            variant: Variant::Vb1,
            seed: 0,
            degree_factor: true,
        }
    }
}

impl BootstrapConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.block_length >= 1.0 && self.block_length.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "block length must be >= 1, got {}",
                self.block_length
            )));
        }
        if self.replicates == 0 {
            return Err(Error::InvalidConfig("need at least one replicate".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BootstrapSeries {
    w: Vec<f64>,
    centered: bool,
}

impl BootstrapSeries {
    pub fn new(w: Vec<f64>) -> Self {
        Self { w, centered: false }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.w
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.w
    }

    /// Multipliers for the given variant: raw for `Vb1`, centered for `Vb2`.
    pub fn weights(&self, variant: Variant) -> Vec<f64> {
        match variant {
            Variant::Vb1 => self.w.clone(),
            Variant::Vb2 => center_w(self).w,
        }
    }
}

/// AR coefficient `e^{-1/l}`.
pub fn ou_coefficient(block_length: f64) -> f64 {
    (-1.0 / block_length).exp()
}

/// One OU path of length `n` drawn from the stream `key`.
pub fn ou_path(n: usize, block_length: f64, key: StreamKey) -> Vec<f64> {
    let mut rng = key.rng();
    let a = ou_coefficient(block_length);
    let s = (1.0 - (-2.0 / block_length).exp()).sqrt();
    let mut w = Vec::with_capacity(n);
    let mut prev: f64 = StandardNormal.sample(&mut rng);
    for _ in 0..n {
        let eps: f64 = StandardNormal.sample(&mut rng);
        prev = a * prev + s * eps;
        w.push(prev);
    }
    w
}

/// Replicate `replicate_index` of the primary wild-bootstrap stream.
pub fn generate_w(n: usize, config: &BootstrapConfig, replicate_index: u64) -> BootstrapSeries {
    generate_w_tagged(n, config, replicate_index, tag::WILD)
}

pub fn generate_w_tagged(
    n: usize,
    config: &BootstrapConfig,
    replicate_index: u64,
    purpose: u64,
) -> BootstrapSeries {
    let key = StreamKey::new(config.seed, replicate_index, purpose);
    BootstrapSeries::new(ou_path(n, config.block_length, key))
}

pub fn center_w(w: &BootstrapSeries) -> BootstrapSeries {
    let n = w.w.len();
    if n == 0 {
        return BootstrapSeries {
            w: Vec::new(),
            centered: true,
        };
    }
    let mean = w.w.iter().sum::<f64>() / n as f64;
    BootstrapSeries {
        w: w.w.iter().map(|v| v - mean).collect(),
        centered: true,
    }
}

/// `n x B` matrix whose column `r` holds replicate `r` (weights per `variant`).
pub(crate) fn multiplier_matrix(
    n: usize,
    config: &BootstrapConfig,
    purpose: u64,
    variant: Variant,
) -> Array2<f64> {
    let b = config.replicates;
    let mut m = Array2::<f64>::zeros((n, b));
    for r in 0..b {
        let w = generate_w_tagged(n, config, r as u64, purpose).weights(variant);
        m.column_mut(r).assign(&ndarray::Array1::from(w));
    }
    m
}
