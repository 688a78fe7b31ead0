//! Wild-bootstrap MMD two-sample test for dependent samples.
//!
//! Two bootstrap modes are provided:
//!
//! * [`mmd_test`]: two independent multiplier processes, one per sample,
//!   both empirically centered. Works for `n_x != n_y`. The y-y term is
//!   normalized by `1/n_y^2`, which is what the null limit of the statistic
//!   requires (a printed `1/n_x^2` there would be a typo).
//! * [`mmd_paired_test`]: `n_x = n_y`, the MMD is a degree-2 V-statistic on
//!   pairs `z_i = (x_i, y_i)` and a single multiplier process is used,
//!   raw (`Vb1`) or centered (`Vb2`).
//!
//! Statistic and null samples of the two-process mode are both scaled by
//! `rho_x rho_y n` with `n = n_x + n_y`, `rho = n_. / n`.
//!
//! All bootstrap replicates are evaluated as one batch `K V` where column `b`
//! of `V` is the signed, normalized multiplier vector of replicate `b`.

use crate::error::{check_alpha, Error, Result};
use crate::kernels::{cross_gram, evaluate_kernel, KernelSpec};
use crate::result::TestResult;
use crate::rng::{tag, StreamKey};
use crate::series::{PairObs, TimeSeries};
use crate::vstats::Core;
use crate::wild_bootstrap::{
    center_w, generate_w_tagged, multiplier_matrix, BootstrapConfig, BootstrapSeries, Variant,
};
use ndarray::{s, Array1, Array2, Axis};
use rand::seq::SliceRandom;

#[derive(Debug, Clone)]
pub struct TwoSampleInput {
    pub x: TimeSeries,
    pub y: TimeSeries,
    /// Always an explicit bandwidth; a median-heuristic request is resolved on
    /// the pooled sample at construction.
    pub kernel: KernelSpec,
}

impl TwoSampleInput {
    pub fn new(x: TimeSeries, y: TimeSeries, kernel: KernelSpec) -> Result<Self> {
        if x.dim() != y.dim() {
            return Err(Error::DimensionMismatch {
                expected: x.dim(),
                got: y.dim(),
            });
        }
        for s in [&x, &y] {
            if s.len() < 2 {
                return Err(Error::TooShort {
                    required: 2,
                    got: s.len(),
                });
            }
        }
        let kernel = kernel.resolve(&x.concat(&y)?)?;
        Ok(Self { x, y, kernel })
    }

    pub fn nx(&self) -> usize {
        self.x.len()
    }

    pub fn ny(&self) -> usize {
        self.y.len()
    }

    /// `rho_x rho_y n`, i.e. `n_x n_y / (n_x + n_y)`.
    pub fn scale(&self) -> f64 {
        let (nx, ny) = (self.nx() as f64, self.ny() as f64);
        nx * ny / (nx + ny)
    }

    /// Gram matrix of the pooled sample `[x; y]`.
    pub fn pooled_gram(&self) -> Result<Array2<f64>> {
        let pooled = self.x.concat(&self.y)?;
        cross_gram(&self.kernel, &pooled, &pooled)
    }
}

/// `h(z1, z2) = k(x1, x2) - k(x1, y2) - k(x2, y1) + k(y1, y2)`.
pub fn mmd_core(z1: (&[f64], &[f64]), z2: (&[f64], &[f64]), kernel: &KernelSpec) -> Result<f64> {
    let (x1, y1) = z1;
    let (x2, y2) = z2;
    Ok(evaluate_kernel(kernel, x1, x2)? - evaluate_kernel(kernel, x1, y2)?
        - evaluate_kernel(kernel, x2, y1)?
        + evaluate_kernel(kernel, y1, y2)?)
}

/// [`mmd_core`] as a degree-2 [`Core`] over paired observations.
pub struct MmdCore {
    pub kernel: KernelSpec,
}

impl Core<PairObs> for MmdCore {
    fn arity(&self) -> usize {
        2
    }

    fn eval(&self, args: &[&PairObs]) -> f64 {
        mmd_core(
            (&args[0].x, &args[0].y),
            (&args[1].x, &args[1].y),
            &self.kernel,
        )
        .expect("paired observations share a dimension")
    }
}

fn block_sum(k: &Array2<f64>, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> f64 {
    k.slice(s![rows, cols]).sum()
}

fn mmd_from_pooled(k: &Array2<f64>, nx: usize, ny: usize) -> f64 {
    let n = nx + ny;
    let sxx = block_sum(k, 0..nx, 0..nx);
    let syy = block_sum(k, nx..n, nx..n);
    let sxy = block_sum(k, 0..nx, nx..n);
    let (fx, fy) = (nx as f64, ny as f64);
    sxx / (fx * fx) + syy / (fy * fy) - 2.0 * sxy / (fx * fy)
}

/// Biased (V-statistic) MMD^2 estimate.
pub fn empirical_mmd(input: &TwoSampleInput) -> Result<f64> {
    let k = input.pooled_gram()?;
    Ok(mmd_from_pooled(&k, input.nx(), input.ny()))
}

/// Column-wise `v_b^T K v_b`.
fn quadratic_forms(k: &Array2<f64>, v: &Array2<f64>) -> Vec<f64> {
    let kv = k.dot(v);
    (&kv * v).sum_axis(Axis(0)).to_vec()
}

/// One bootstrapped MMD (unscaled) from two multiplier series.
pub fn mmd_wb_null_sample(
    input: &TwoSampleInput,
    wx: &BootstrapSeries,
    wy: &BootstrapSeries,
) -> Result<f64> {
    if wx.len() != input.nx() {
        return Err(Error::LengthMismatch {
            left: input.nx(),
            right: wx.len(),
        });
    }
    if wy.len() != input.ny() {
        return Err(Error::LengthMismatch {
            left: input.ny(),
            right: wy.len(),
        });
    }
    let k = input.pooled_gram()?;
    let v = two_process_vector(&center_w(wx), &center_w(wy));
    Ok(quadratic_forms(&k, &v.insert_axis(Axis(1)))[0])
}

fn two_process_vector(wx: &BootstrapSeries, wy: &BootstrapSeries) -> Array1<f64> {
    let (nx, ny) = (wx.len() as f64, wy.len() as f64);
    wx.as_slice()
        .iter()
        .map(|w| w / nx)
        .chain(wy.as_slice().iter().map(|w| -w / ny))
        .collect()
}

/// Unscaled two-process bootstrap samples for all replicates of `config`.
pub(crate) fn two_process_null(k: &Array2<f64>, nx: usize, ny: usize, config: &BootstrapConfig) -> Vec<f64> {
    let b = config.replicates;
    let mut v = Array2::<f64>::zeros((nx + ny, b));
    for r in 0..b {
        let wx = center_w(&generate_w_tagged(nx, config, r as u64, tag::WILD_X));
        let wy = center_w(&generate_w_tagged(ny, config, r as u64, tag::WILD_Y));
        v.column_mut(r).assign(&two_process_vector(&wx, &wy));
    }
    quadratic_forms(k, &v)
}

/// Two-process wild bootstrap test (`n_x` and `n_y` may differ).
pub fn mmd_test(input: &TwoSampleInput, config: &BootstrapConfig, alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    config.validate()?;
    let k = input.pooled_gram()?;
    let (nx, ny) = (input.nx(), input.ny());
    let scale = input.scale();
    let statistic = scale * mmd_from_pooled(&k, nx, ny);
    let null: Vec<f64> = two_process_null(&k, nx, ny, config)
        .into_iter()
        .map(|v| scale * v)
        .collect();
    let mut r = TestResult::from_null("mmd-wild", statistic, null, alpha, config.seed, nx + ny);
    r.block_length = Some(config.block_length);
    Ok(r)
}

/// `(1/n^2) u^T K u` with `u = [w; -w]`, i.e. `V_b` of the paired MMD core.
pub fn mmd_paired_vb_fast(k: &Array2<f64>, w: &BootstrapSeries, variant: Variant) -> Result<f64> {
    let n2 = k.nrows();
    if n2 != 2 * w.len() {
        return Err(Error::LengthMismatch {
            left: n2 / 2,
            right: w.len(),
        });
    }
    let weights = w.weights(variant);
    let u = paired_vector(&weights);
    Ok(quadratic_forms(k, &u.insert_axis(Axis(1)))[0])
}

fn paired_vector(w: &[f64]) -> Array1<f64> {
    let n = w.len() as f64;
    w.iter()
        .map(|v| v / n)
        .chain(w.iter().map(|v| -v / n))
        .collect()
}

/// Single-process paired test, `n_x = n_y = n`: statistic `n V(h)`, null
/// samples `n V_b(h)` with `V_b` per `config.variant`.
pub fn mmd_paired_test(input: &TwoSampleInput, config: &BootstrapConfig, alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    config.validate()?;
    let n = input.nx();
    if input.ny() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: input.ny(),
        });
    }
    let k = input.pooled_gram()?;
    let statistic = n as f64 * mmd_from_pooled(&k, n, n);
    let w = multiplier_matrix(n, config, tag::WILD, config.variant);
    let mut v = Array2::<f64>::zeros((2 * n, config.replicates));
    v.slice_mut(s![..n, ..]).assign(&(&w / n as f64));
    v.slice_mut(s![n.., ..]).assign(&(&w / -(n as f64)));
    let null: Vec<f64> = quadratic_forms(&k, &v)
        .into_iter()
        .map(|q| n as f64 * q)
        .collect();
    let method = match config.variant {
        Variant::Vb1 => "mmd-paired-vb1",
        Variant::Vb2 => "mmd-paired-vb2",
    };
    let mut r = TestResult::from_null(method, statistic, null, alpha, config.seed, n);
    r.block_length = Some(config.block_length);
    Ok(r)
}

/// Permutation baseline: null samples from random relabelings of the pooled
/// sample. Ignores temporal dependence, so it over-rejects on dependent data.
pub fn mmd_permutation_test(
    input: &TwoSampleInput,
    num_permutations: usize,
    alpha: f64,
    seed: u64,
) -> Result<TestResult> {
    check_alpha(alpha)?;
    if num_permutations == 0 {
        return Err(Error::InvalidConfig("need at least one permutation".into()));
    }
    let k = input.pooled_gram()?;
    let (nx, ny) = (input.nx(), input.ny());
    let n = nx + ny;
    let scale = input.scale();
    let statistic = scale * mmd_from_pooled(&k, nx, ny);
    let mut v = Array2::<f64>::zeros((n, num_permutations));
    let mut idx: Vec<usize> = (0..n).collect();
    for p in 0..num_permutations {
        let mut rng = StreamKey::new(seed, p as u64, tag::PERMUTATION).rng();
        idx.shuffle(&mut rng);
        let mut col = v.column_mut(p);
        for (pos, &i) in idx.iter().enumerate() {
            col[i] = if pos < nx {
                1.0 / nx as f64
            } else {
                -1.0 / ny as f64
            };
        }
    }
    let null: Vec<f64> = quadratic_forms(&k, &v)
        .into_iter()
        .map(|q| scale * q)
        .collect();
    Ok(TestResult::from_null("mmd-permutation", statistic, null, alpha, seed, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::PairedSeries;
    use crate::vstats::{v_naive, vb1_naive, vb2_naive};
    use rand::Rng;

    fn random_series(n: usize, d: usize, seed: u64, shift: f64) -> TimeSeries {
        let mut rng = StreamKey::new(seed, 0, 99).rng();
        TimeSeries::new((0..n * d).map(|_| rng.random::<f64>() * 2.0 + shift).collect(), d).unwrap()
    }

    #[test]
    fn core_values() {
        let g = KernelSpec::gaussian(1.0);
        let x = [0.3, -0.2];
        assert_eq!(mmd_core((&x, &x), (&x, &x), &g).unwrap(), 0.0);
        let v = mmd_core((&[0.0], &[1.0]), (&[0.0], &[1.0]), &g).unwrap();
        assert!((v - (2.0 - 2.0 * (-0.5f64).exp())).abs() < 1e-15);
        assert!((v - 0.786939).abs() < 1e-6);
        // A huge bandwidth makes the kernel constant.
        let flat = KernelSpec::gaussian(1e12);
        assert!(mmd_core((&[0.0], &[5.0]), (&[1.0], &[-3.0]), &flat).unwrap().abs() < 1e-15);
        assert!(mmd_core((&[0.0], &[5.0, 1.0]), (&[1.0], &[-3.0]), &g).is_err());
    }

    #[test]
    fn empirical_mmd_cases() {
        let x = random_series(20, 2, 1, 0.0);
        let input = TwoSampleInput::new(x.clone(), x, KernelSpec::gaussian(1.0)).unwrap();
        assert!(empirical_mmd(&input).unwrap().abs() < 1e-12);

        // Single-point samples are refused by the input type, so check the
        // closed form on the pooled-gram helper directly.
        let k = ndarray::arr2(&[[1.0, (-0.5f64).exp()], [(-0.5f64).exp(), 1.0]]);
        assert!((mmd_from_pooled(&k, 1, 1) - (2.0 - 2.0 * (-0.5f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn empirical_mmd_equals_naive_vstat() {
        for seed in 0..5 {
            let x = random_series(17, 2, seed, 0.0);
            let y = random_series(17, 2, seed + 100, 0.4);
            let input = TwoSampleInput::new(x.clone(), y.clone(), KernelSpec::gaussian(0.9)).unwrap();
            let fast = empirical_mmd(&input).unwrap();
            let pairs = PairedSeries::new(x, y).unwrap().pairs();
            let naive = v_naive(&MmdCore { kernel: input.kernel }, &pairs).unwrap().raw;
            assert!((fast - naive).abs() <= 1e-12 * naive.abs().max(1e-300), "{fast} vs {naive}");
        }
    }

    #[test]
    fn paired_fast_equals_naive() {
        for seed in 0..5u64 {
            let n = 8 + seed as usize * 5;
            let x = random_series(n, 1, seed, 0.0);
            let y = random_series(n, 1, seed + 7, 0.2);
            let input = TwoSampleInput::new(x.clone(), y.clone(), KernelSpec::laplacian(1.3)).unwrap();
            let k = input.pooled_gram().unwrap();
            let cfg = BootstrapConfig { seed, ..Default::default() };
            let w = crate::wild_bootstrap::generate_w(n, &cfg, 0);
            let pairs = PairedSeries::new(x, y).unwrap().pairs();
            let core = MmdCore { kernel: input.kernel };
            let n1 = vb1_naive(&core, &pairs, &w).unwrap().raw;
            let n2 = vb2_naive(&core, &pairs, &w).unwrap().raw;
            let f1 = mmd_paired_vb_fast(&k, &w, Variant::Vb1).unwrap();
            let f2 = mmd_paired_vb_fast(&k, &w, Variant::Vb2).unwrap();
            assert!((f1 - n1).abs() <= 1e-10 * n1.abs());
            assert!((f2 - n2).abs() <= 1e-10 * n2.abs());
        }
    }

    #[test]
    fn two_process_null_small_case_by_hand() {
        let x = TimeSeries::from_scalars(vec![0.0, 1.0]).unwrap();
        let y = TimeSeries::from_scalars(vec![0.5, 2.0]).unwrap();
        let input = TwoSampleInput::new(x.clone(), y.clone(), KernelSpec::gaussian(1.0)).unwrap();
        let wx = BootstrapSeries::new(vec![0.7, -1.9]);
        let wy = BootstrapSeries::new(vec![2.0, 0.4]);
        let got = mmd_wb_null_sample(&input, &wx, &wy).unwrap();

        let cx = center_w(&wx);
        let cy = center_w(&wy);
        let (a, b) = (cx.as_slice(), cy.as_slice());
        let k = |u: f64, v: f64| (-(u - v) * (u - v) / 2.0).exp();
        let (xs, ys) = (x.as_slice(), y.as_slice());
        let mut xx = 0.0;
        let mut yy = 0.0;
        let mut xy = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                xx += a[i] * a[j] * k(xs[i], xs[j]);
                yy += b[i] * b[j] * k(ys[i], ys[j]);
                xy += a[i] * b[j] * k(xs[i], ys[j]);
            }
        }
        let expected = xx / 4.0 + yy / 4.0 - 2.0 * xy / 4.0;
        assert!((got - expected).abs() < 1e-14);

        let flat = BootstrapSeries::new(vec![3.0, 3.0]);
        assert_eq!(mmd_wb_null_sample(&input, &flat, &flat).unwrap(), 0.0);
        assert!(mmd_wb_null_sample(&input, &BootstrapSeries::new(vec![1.0]), &wy).is_err());
    }

    #[test]
    fn empirical_mmd_nonnegative() {
        for seed in 0..10 {
            let x = random_series(15, 3, seed, 0.0);
            let y = random_series(11, 3, seed + 50, 0.1 * seed as f64);
            let input = TwoSampleInput::new(x, y, KernelSpec::gaussian_median()).unwrap();
            assert!(empirical_mmd(&input).unwrap() >= -1e-10);
        }
    }

    #[test]
    fn permutation_identical_samples_p_one() {
        let x = random_series(30, 2, 3, 0.0);
        let input = TwoSampleInput::new(x.clone(), x, KernelSpec::gaussian(1.0)).unwrap();
        let r = mmd_permutation_test(&input, 200, 0.05, 1).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(!r.reject);
    }

    #[test]
    fn invalid_alpha_rejected() {
        let x = random_series(10, 1, 3, 0.0);
        let input = TwoSampleInput::new(x.clone(), x, KernelSpec::gaussian(1.0)).unwrap();
        let cfg = BootstrapConfig::default();
        assert_eq!(mmd_test(&input, &cfg, 1.0).unwrap_err(), Error::InvalidAlpha(1.0));
        assert!(mmd_paired_test(&input, &cfg, 0.0).is_err());
        assert!(mmd_permutation_test(&input, 10, -0.1, 0).is_err());
    }

    #[test]
    fn test_is_seed_reproducible() {
        let x = random_series(40, 2, 3, 0.0);
        let y = random_series(30, 2, 4, 0.0);
        let input = TwoSampleInput::new(x, y, KernelSpec::gaussian(1.0)).unwrap();
        let cfg = BootstrapConfig { seed: 77, replicates: 50, ..Default::default() };
        assert_eq!(mmd_test(&input, &cfg, 0.05).unwrap(), mmd_test(&input, &cfg, 0.05).unwrap());
    }
}
