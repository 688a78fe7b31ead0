//! Time-ordered observation containers.
//!
//! A [`TimeSeries`] stores `n` observations of dimension `d` in row-major
//! order. Row order is the time index and is never shuffled by the tests in
//! this crate, except where a baseline (permutation) does so on purpose.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    dim: usize,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("observation dimension must be >= 1".into()));
        }
        if !values.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: values.len() % dim,
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / dim,
                column: pos % dim,
            });
        }
        Ok(Self { values, dim })
    }

    pub fn from_scalars(values: Vec<f64>) -> Result<Self> {
        Self::new(values, 1)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map(|r| r.len()).unwrap_or(1);
        let mut values = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::new(values, dim)
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.dim)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Column `c` as a scalar sequence.
    pub fn column(&self, c: usize) -> Vec<f64> {
        self.rows().map(|r| r[c]).collect()
    }

    /// Rows `start..end`.
    pub fn slice(&self, start: usize, end: usize) -> TimeSeries {
        TimeSeries {
            values: self.values[start * self.dim..end * self.dim].to_vec(),
            dim: self.dim,
        }
    }

    /// Rows reordered by `index` (row `i` of the result is row `index[i]`).
    pub fn select(&self, index: &[usize]) -> TimeSeries {
        let mut values = Vec::with_capacity(index.len() * self.dim);
        for &i in index {
            values.extend_from_slice(self.row(i));
        }
        TimeSeries {
            values,
            dim: self.dim,
        }
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &TimeSeries) -> Result<TimeSeries> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let mut values = self.values.clone();
        values.extend_from_slice(&other.values);
        Ok(TimeSeries {
            values,
            dim: self.dim,
        })
    }
}

/// Two series aligned by time index, `Z_t = (X_t, Y_t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedSeries {
    pub x: TimeSeries,
    pub y: TimeSeries,
}

impl PairedSeries {
    pub fn new(x: TimeSeries, y: TimeSeries) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        Ok(Self { x, y })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Owned `(x_t, y_t)` pairs, for the naive V-statistic oracles.
    pub fn pairs(&self) -> Vec<PairObs> {
        self.x
            .rows()
            .zip(self.y.rows())
            .map(|(x, y)| PairObs {
                x: x.to_vec(),
                y: y.to_vec(),
            })
            .collect()
    }
}

/// One paired observation `z = (x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairObs {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}
