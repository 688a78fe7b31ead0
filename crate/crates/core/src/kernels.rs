//! Kernel functions, Gram matrices, double centering and the median heuristic.
//!
//! Gaussian convention: `k(a, b) = exp(-|a - b|^2 / (2 sigma^2))`, so a
//! "bandwidth sigma" is the standard deviation of the Gaussian bump. Other
//! libraries use `exp(-|a - b|^2 / sigma^2)`; bandwidths are not portable
//! between the two conventions. Laplacian: `k(a, b) = exp(-|a - b|_1 / sigma)`.

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

/// Maximum number of pairs the median heuristic looks at.
pub const DEFAULT_MAX_PAIRS: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelFamily {
    Gaussian,
    Laplacian,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bandwidth {
    Fixed(f64),
    /// Resolved from the data by [`median_heuristic`].
    Median,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub bandwidth: Bandwidth,
}

impl KernelSpec {
    pub fn gaussian(sigma: f64) -> Self {
        Self {
            family: KernelFamily::Gaussian,
            bandwidth: Bandwidth::Fixed(sigma),
        }
    }

    pub fn laplacian(sigma: f64) -> Self {
        Self {
            family: KernelFamily::Laplacian,
            bandwidth: Bandwidth::Fixed(sigma),
        }
    }

    pub fn gaussian_median() -> Self {
        Self {
            family: KernelFamily::Gaussian,
            bandwidth: Bandwidth::Median,
        }
    }

    /// Explicit bandwidth, or an error if it still needs resolving.
    pub fn sigma(&self) -> Result<f64> {
        match self.bandwidth {
            Bandwidth::Fixed(s) if s > 0.0 && s.is_finite() => Ok(s),
            Bandwidth::Fixed(s) => Err(Error::InvalidConfig(format!(
                "bandwidth must be positive and finite, got {s}"
            ))),
            Bandwidth::Median => Err(Error::UnresolvedBandwidth),
        }
    }

    /// Replaces a median-heuristic bandwidth by its value on `data`.
    pub fn resolve(&self, data: &TimeSeries) -> Result<KernelSpec> {
        match self.bandwidth {
            Bandwidth::Fixed(_) => {
                self.sigma()?;
                Ok(*self)
            }
            Bandwidth::Median => Ok(KernelSpec {
                family: self.family,
                bandwidth: Bandwidth::Fixed(median_heuristic(data, DEFAULT_MAX_PAIRS)?),
            }),
        }
    }
}

#[inline]
fn eval_raw(family: KernelFamily, sigma: f64, a: &[f64], b: &[f64]) -> f64 {
    match family {
        KernelFamily::Gaussian => {
            let d2: f64 = a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum();
            (-d2 / (2.0 * sigma * sigma)).exp()
        }
        KernelFamily::Laplacian => {
            let d1: f64 = a.iter().zip(b).map(|(u, v)| (u - v).abs()).sum();
            (-d1 / sigma).exp()
        }
    }
}

pub fn evaluate_kernel(spec: &KernelSpec, a: &[f64], b: &[f64]) -> Result<f64> {
    let sigma = spec.sigma()?;
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    for (column, v) in a.iter().chain(b).enumerate() {
        if !v.is_finite() {
            return Err(Error::NonFinite {
                row: 0,
                column: column % a.len().max(1),
            });
        }
    }
    Ok(eval_raw(spec.family, sigma, a, b))
}

/// Symmetric kernel matrix, optionally double-centered.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    entries: Array2<f64>,
    centered: bool,
}

impl GramMatrix {
    /// Wraps a square matrix. Symmetry is the caller's responsibility.
    pub fn from_array(entries: Array2<f64>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                got: entries.ncols(),
            });
        }
        Ok(Self {
            entries,
            centered: false,
        })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.entries.view()
    }

    pub fn is_centered(&self) -> bool {
        self.centered
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[[i, j]]
    }
}

pub fn gram(spec: &KernelSpec, z: &TimeSeries) -> Result<GramMatrix> {
    if z.is_empty() {
        return Err(Error::TooShort { required: 1, got: 0 });
    }
    Ok(GramMatrix {
        entries: cross_gram(spec, z, z)?,
        centered: false,
    })
}

/// `K[i, j] = k(a_i, b_j)`. When `a` and `b` are the same series the result is
/// filled symmetrically.
pub fn cross_gram(spec: &KernelSpec, a: &TimeSeries, b: &TimeSeries) -> Result<Array2<f64>> {
    let sigma = spec.sigma()?;
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        });
    }
    let (na, nb) = (a.len(), b.len());
    let mut k = Array2::<f64>::zeros((na, nb));
    if std::ptr::eq(a, b) {
        for i in 0..na {
            let ai = a.row(i);
            k[[i, i]] = eval_raw(spec.family, sigma, ai, ai);
            for j in (i + 1)..na {
                let v = eval_raw(spec.family, sigma, ai, a.row(j));
                k[[i, j]] = v;
                k[[j, i]] = v;
            }
        }
    } else {
        for i in 0..na {
            let ai = a.row(i);
            for j in 0..nb {
                k[[i, j]] = eval_raw(spec.family, sigma, ai, b.row(j));
            }
        }
    }
    Ok(k)
}

/// `H G H` with `H = I - 11^T / n`.
pub fn center(g: &GramMatrix) -> GramMatrix {
    GramMatrix {
        entries: center_view(g.view()),
        centered: true,
    }
}

pub(crate) fn center_view(g: ArrayView2<'_, f64>) -> Array2<f64> {
    let n = g.nrows();
    let row_means = g.mean_axis(Axis(1)).expect("non-empty");
    let col_means = g.mean_axis(Axis(0)).expect("non-empty");
    let grand = row_means.sum() / n as f64;
    let mut out = g.to_owned();
    for ((i, j), v) in out.indexed_iter_mut() {
        *v += grand - row_means[i] - col_means[j];
    }
    out
}

/// Position `p` of the row-major enumeration of pairs `i < j` among `n` points.
fn pair_from_index(n: usize, p: usize) -> (usize, usize) {
    // Row i holds pairs (i, i+1..n); rows 0..i hold i*(2n - i - 1)/2 pairs.
    let before = |i: usize| i * (2 * n - i - 1) / 2;
    let nf = n as f64;
    let disc = (2.0 * nf - 1.0) * (2.0 * nf - 1.0) - 8.0 * p as f64;
    let mut i = (((2.0 * nf - 1.0) - disc.max(0.0).sqrt()) / 2.0).floor() as usize;
    i = i.min(n - 2);
    while i > 0 && before(i) > p {
        i -= 1;
    }
    while before(i + 1) <= p {
        i += 1;
    }
    (i, i + 1 + (p - before(i)))
}

/// Median Euclidean distance over (a deterministic stride subsample of) all pairs.
pub fn median_heuristic(z: &TimeSeries, max_pairs: usize) -> Result<f64> {
    let n = z.len();
    if n < 2 {
        return Err(Error::TooShort { required: 2, got: n });
    }
    let total = n * (n - 1) / 2;
    let dist = |i: usize, j: usize| -> f64 {
        z.row(i)
            .iter()
            .zip(z.row(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    };
    let mut d: Vec<f64> = if total <= max_pairs.max(1) {
        let mut d = Vec::with_capacity(total);
        for i in 0..n {
            for j in (i + 1)..n {
                d.push(dist(i, j));
            }
        }
        d
    } else {
        let m = max_pairs.max(1);
        (0..m)
            .map(|s| {
                let p = ((s as u128 * total as u128) / m as u128) as usize;
                let (i, j) = pair_from_index(n, p);
                dist(i, j)
            })
            .collect()
    };
    let med = median_in_place(&mut d);
    if med > 0.0 && med.is_finite() {
        Ok(med)
    } else {
        Err(Error::DegenerateBandwidth)
    }
}

fn median_in_place(v: &mut [f64]) -> f64 {
    let len = v.len();
    let mid = len / 2;
    let (_, upper, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if len % 2 == 1 {
        upper
    } else {
        let lower = v[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn scalars(v: &[f64]) -> TimeSeries {
        TimeSeries::from_scalars(v.to_vec()).unwrap()
    }

    #[test]
    fn kernel_values() {
        let g = KernelSpec::gaussian(1.0);
        assert_eq!(evaluate_kernel(&g, &[0.0], &[0.0]).unwrap(), 1.0);
        let v = evaluate_kernel(&g, &[0.0], &[1.0]).unwrap();
        assert!((v - (-0.5f64).exp()).abs() < 1e-15);
        assert!((v - 0.606531).abs() < 1e-6);
        let l = KernelSpec::laplacian(2.0);
        let v = evaluate_kernel(&l, &[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert!((v - 0.367879).abs() < 1e-6);
    }

    #[test]
    fn kernel_errors() {
        let g = KernelSpec::gaussian(1.0);
        assert!(matches!(
            evaluate_kernel(&g, &[0.0], &[0.0, 1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            evaluate_kernel(&g, &[f64::INFINITY], &[0.0]),
            Err(Error::NonFinite { .. })
        ));
        assert_eq!(
            evaluate_kernel(&KernelSpec::gaussian_median(), &[0.0], &[0.0]),
            Err(Error::UnresolvedBandwidth)
        );
        assert!(evaluate_kernel(&KernelSpec::gaussian(-1.0), &[0.0], &[0.0]).is_err());
    }

    #[test]
    fn gram_small_cases() {
        let g = gram(&KernelSpec::gaussian(1.0), &scalars(&[3.0, 3.0])).unwrap();
        assert!(g.entries().iter().all(|&v| v == 1.0));
        let g = gram(&KernelSpec::gaussian(1.0), &scalars(&[0.0, 1.0])).unwrap();
        let e = (-0.5f64).exp();
        assert_eq!(g.get(0, 1), e);
        assert_eq!(g.get(1, 0), e);
        assert_eq!(g.get(1, 1), 1.0);
        assert!(!g.is_centered());
        assert!(gram(&KernelSpec::gaussian(1.0), &scalars(&[])).is_err());
    }

    #[test]
    fn centering_cases() {
        let ones = GramMatrix::from_array(Array2::ones((4, 4))).unwrap();
        assert!(center(&ones).entries().iter().all(|v| v.abs() < 1e-15));

        let a = 0.3;
        let m = GramMatrix::from_array(ndarray::arr2(&[[1.0, a], [a, 1.0]])).unwrap();
        let c = center(&m);
        let s = (1.0 - a) / 2.0;
        let expected = ndarray::arr2(&[[s, -s], [-s, s]]);
        assert!(c.entries().iter().zip(expected.iter()).all(|(u, v)| (u - v).abs() < 1e-15));
        assert!(c.is_centered());
    }

    #[test]
    fn median_heuristic_cases() {
        assert_eq!(median_heuristic(&scalars(&[0.0, 1.0, 2.0]), 100).unwrap(), 1.0);
        assert_eq!(median_heuristic(&scalars(&[0.0, 5.0]), 100).unwrap(), 5.0);
        assert_eq!(
            median_heuristic(&scalars(&[2.0, 2.0, 2.0]), 100),
            Err(Error::DegenerateBandwidth)
        );
    }

    #[test]
    fn pair_index_mapping_enumerates_all_pairs() {
        for n in 2..12 {
            let mut p = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    assert_eq!(pair_from_index(n, p), (i, j));
                    p += 1;
                }
            }
        }
    }

    #[test]
    fn subsampled_median_is_deterministic_and_close() {
        let v: Vec<f64> = (0..400).map(|i| ((i * 7919) % 401) as f64 / 40.0).collect();
        let z = scalars(&v);
        let full = median_heuristic(&z, DEFAULT_MAX_PAIRS).unwrap();
        let sub1 = median_heuristic(&z, 5000).unwrap();
        let sub2 = median_heuristic(&z, 5000).unwrap();
        assert_eq!(sub1, sub2);
        assert!((full - sub1).abs() / full < 0.05);
    }

    fn psd_min_eigenvalue(g: &GramMatrix) -> f64 {
        let n = g.n();
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| g.get(i, j));
        m.symmetric_eigen().eigenvalues.min()
    }

    proptest! {
        #[test]
        fn gram_is_symmetric_psd(
            n in 2usize..64,
            d in 1usize..4,
            seed in any::<u64>(),
            sigma in 0.1f64..5.0,
            laplace in any::<bool>(),
        ) {
            use rand::Rng;
            let mut rng = crate::rng::StreamKey::new(seed, 0, 0).rng();
            let vals: Vec<f64> = (0..n * d).map(|_| rng.random_range(-3.0..3.0)).collect();
            let z = TimeSeries::new(vals, d).unwrap();
            let spec = if laplace { KernelSpec::laplacian(sigma) } else { KernelSpec::gaussian(sigma) };
            let g = gram(&spec, &z).unwrap();
            for i in 0..n {
                for j in 0..n {
                    let (a, b) = (g.get(i, j), g.get(j, i));
                    prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()));
                    prop_assert!((0.0..=1.0).contains(&a));
                }
            }
            prop_assert!(psd_min_eigenvalue(&g) >= -1e-10);

            let c = center(&g);
            let cc = center(&c);
            for (u, v) in c.entries().iter().zip(cc.entries().iter()) {
                prop_assert!((u - v).abs() < 1e-12);
            }
            for s in c.entries().sum_axis(Axis(1)).iter().chain(c.entries().sum_axis(Axis(0)).iter()) {
                prop_assert!(s.abs() < 1e-9 * n as f64);
            }
        }

        #[test]
        fn median_permutation_invariant(v in proptest::collection::vec(-10.0f64..10.0, 3..30), rot in 0usize..30) {
            let z = scalars(&v);
            let mut w = v.clone();
            let r = rot % w.len();
            w.rotate_left(r);
            w.reverse();
            let a = median_heuristic(&z, DEFAULT_MAX_PAIRS);
            let b = median_heuristic(&scalars(&w), DEFAULT_MAX_PAIRS);
            prop_assert_eq!(a, b);
        }
    }
}
