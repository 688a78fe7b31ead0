//! Wild-bootstrap kernel hypothesis tests for time series.
//!
//! Kernel two-sample (MMD) and independence (HSIC) statistics are
//! V-statistics whose null distribution under temporal dependence is not the
//! i.i.d. one, so permutation thresholds over-reject. This crate simulates the
//! null by multiplying the summands with a slowly decorrelating auxiliary
//! process (the wild bootstrap), which keeps Type I error near the nominal
//! level for weakly dependent (tau-mixing) observations while the tests
//! remain consistent against fixed alternatives.
//!
//! Modules:
//! - [`kernels`]: Gaussian / Laplacian kernels, Gram matrices, median heuristic
//! - [`wild_bootstrap`]: the auxiliary OU multiplier process
//! - [`vstats`]: naive O(n^m) V-statistics, used as a correctness oracle
//! - [`mmd`], [`hsic`], [`lag_hsic`]: the tests and their baselines
//! - [`gpd`]: generalized Pareto tail quantiles for Bonferroni-level thresholds
//! - [`generators`]: synthetic processes used by the benchmarks
//! - [`harness`]: CSV input, experiment runner and benchmark presets

pub mod error;
pub mod generators;
pub mod gpd;
pub mod harness;
pub mod hsic;
pub mod kernels;
pub mod lag_hsic;
pub mod mmd;
pub mod result;
pub mod rng;
pub mod series;
pub mod vstats;
pub mod wild_bootstrap;

pub use error::{Error, Result};
pub use kernels::{Bandwidth, GramMatrix, KernelFamily, KernelSpec};
pub use result::TestResult;
pub use series::{PairObs, PairedSeries, TimeSeries};
pub use wild_bootstrap::{BootstrapConfig, BootstrapSeries, Variant};
