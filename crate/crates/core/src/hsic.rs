//! HSIC statistic, wild-bootstrapped HSIC and the instantaneous independence test.
//!
//! The empirical HSIC `(1/n^2) Tr(K H L H)` is a degree-4 V-statistic with the
//! S4-symmetrized core
//!
//! ```text
//! h(z1..z4) = 1/24 sum_pi k(x_pi1, x_pi2) [l(y_pi1, y_pi2) + l(y_pi3, y_pi4) - 2 l(y_pi2, y_pi3)]
//! ```
//!
//! Its bootstrapped versions weight index tuples by `W_{i1} W_{i2}`. Summing
//! over `S4` moves the two weights onto each of the six unordered position
//! pairs of the unsymmetrized summand, so
//!
//! ```text
//! V_b = 1/(6 n^4) sum_{pairs p<q} sum_{b in N^4} W_{b_p} W_{b_q} f(b),
//! f(b) = K_{b1 b2} L_{b1 b2} + K_{b1 b2} L_{b3 b4} - 2 K_{b1 b2} L_{b2 b3}
//! ```
//!
//! and each inner sum factorizes into quadratic forms of `K`, `L` and
//! `K o L` against `W` and `1`. One replicate therefore costs three
//! matrix-vector products. [`crate::vstats`] provides the O(n^4) check.

use crate::error::{check_alpha, Error, Result};
use crate::kernels::{center_view, cross_gram, evaluate_kernel, GramMatrix, KernelSpec};
use crate::result::TestResult;
use crate::rng::{tag, StreamKey};
use crate::series::{PairObs, PairedSeries};
use crate::vstats::{v_naive, Core};
use crate::wild_bootstrap::{multiplier_matrix, BootstrapConfig, BootstrapSeries, Variant};
use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Smallest series length accepted by the HSIC tests.
pub const MIN_LENGTH: usize = 6;

/// `binom(4, 2)`: scaling of bootstrap samples of the degree-4 core.
pub const DEGREE_FACTOR: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HsicStat {
    pub value: f64,
    pub n: usize,
}

impl HsicStat {
    pub fn normalized(&self) -> f64 {
        self.n as f64 * self.value
    }
}

/// `(1/n^2) sum_ij (HKH)_ij (HLH)_ij` for symmetric `k`, `l`.
pub(crate) fn hsic_views(k: ArrayView2<'_, f64>, l: ArrayView2<'_, f64>) -> f64 {
    let n = k.nrows();
    // Gram matrices are symmetric, so column means equal row means.
    let margins = |g: ArrayView2<'_, f64>| {
        let rows = g.mean_axis(Axis(1)).expect("non-empty");
        let grand = rows.sum() / n as f64;
        (rows, grand)
    };
    let (rk, gk) = margins(k);
    let (rl, gl) = margins(l);
    let (ck, cl) = (&rk, &rl);
    // Centered entries are formed on the fly, as `center_view` would.
    let mut acc = 0.0;
    for i in 0..n {
        let (ak, al) = (gk - rk[i], gl - rl[i]);
        acc += k
            .row(i)
            .iter()
            .zip(l.row(i))
            .zip(ck.iter().zip(cl))
            .map(|((kv, lv), (cj, dj))| (kv + (ak - cj)) * (lv + (al - dj)))
            .sum::<f64>();
    }
    acc / (n * n) as f64
}

/// `(1/n^2) Tr(K H L H)` from uncentered Gram matrices.
pub fn hsic_stat(k: &GramMatrix, l: &GramMatrix) -> Result<HsicStat> {
    if k.n() != l.n() {
        return Err(Error::LengthMismatch {
            left: k.n(),
            right: l.n(),
        });
    }
    if k.is_centered() || l.is_centered() {
        return Err(Error::InvalidConfig("hsic_stat expects uncentered Gram matrices".into()));
    }
    Ok(HsicStat {
        value: hsic_views(k.view(), l.view()),
        n: k.n(),
    })
}

const PERMUTATIONS_4: [[usize; 4]; 24] = [
    [0, 1, 2, 3], [0, 1, 3, 2], [0, 2, 1, 3], [0, 2, 3, 1], [0, 3, 1, 2], [0, 3, 2, 1],
    [1, 0, 2, 3], [1, 0, 3, 2], [1, 2, 0, 3], [1, 2, 3, 0], [1, 3, 0, 2], [1, 3, 2, 0],
    [2, 0, 1, 3], [2, 0, 3, 1], [2, 1, 0, 3], [2, 1, 3, 0], [2, 3, 0, 1], [2, 3, 1, 0],
    [3, 0, 1, 2], [3, 0, 2, 1], [3, 1, 0, 2], [3, 1, 2, 0], [3, 2, 0, 1], [3, 2, 1, 0],
];

/// The symmetrized degree-4 HSIC core on four paired observations.
pub fn hsic_core(z: [(&[f64], &[f64]); 4], k: &KernelSpec, l: &KernelSpec) -> Result<f64> {
    let mut km = [[0.0; 4]; 4];
    let mut lm = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in i..4 {
            km[i][j] = evaluate_kernel(k, z[i].0, z[j].0)?;
            km[j][i] = km[i][j];
            lm[i][j] = evaluate_kernel(l, z[i].1, z[j].1)?;
            lm[j][i] = lm[i][j];
        }
    }
    let total: f64 = PERMUTATIONS_4
        .iter()
        .map(|p| km[p[0]][p[1]] * (lm[p[0]][p[1]] + lm[p[2]][p[3]] - 2.0 * lm[p[1]][p[2]]))
        .sum();
    Ok(total / 24.0)
}

/// [`hsic_core`] as a degree-4 [`Core`].
pub struct HsicCore {
    pub k: KernelSpec,
    pub l: KernelSpec,
}

impl Core<PairObs> for HsicCore {
    fn arity(&self) -> usize {
        4
    }

    fn eval(&self, a: &[&PairObs]) -> f64 {
        hsic_core(
            [
                (&a[0].x, &a[0].y),
                (&a[1].x, &a[1].y),
                (&a[2].x, &a[2].y),
                (&a[3].x, &a[3].y),
            ],
            &self.k,
            &self.l,
        )
        .expect("kernels resolved and dimensions consistent")
    }
}

/// Largest `n` accepted by [`hsic_v_identity_check`].
pub const IDENTITY_CHECK_MAX_N: usize = 20;

/// `(hsic_stat, v_naive(hsic_core))`; the two must agree.
pub fn hsic_v_identity_check(z: &PairedSeries, k: &KernelSpec, l: &KernelSpec) -> Result<(f64, f64)> {
    let n = z.len();
    if n > IDENTITY_CHECK_MAX_N {
        return Err(Error::BudgetExceeded { n, arity: 4 });
    }
    let kg = GramMatrix::from_array(cross_gram(k, &z.x, &z.x)?)?;
    let lg = GramMatrix::from_array(cross_gram(l, &z.y, &z.y)?)?;
    let fast = hsic_stat(&kg, &lg)?.value;
    let naive = v_naive(&HsicCore { k: *k, l: *l }, &z.pairs())?.raw;
    Ok((fast, naive))
}

/// Matrix-vector products shared by all replicates.
struct HsicPrecomp<'a> {
    k: ArrayView2<'a, f64>,
    l: ArrayView2<'a, f64>,
    m: Array2<f64>,
    k1: Array1<f64>,
    l1: Array1<f64>,
    m1: Array1<f64>,
}

impl<'a> HsicPrecomp<'a> {
    fn new(k: ArrayView2<'a, f64>, l: ArrayView2<'a, f64>) -> Self {
        let m = &k * &l;
        Self {
            k1: k.sum_axis(Axis(1)),
            l1: l.sum_axis(Axis(1)),
            m1: m.sum_axis(Axis(1)),
            k,
            l,
            m,
        }
    }

    /// `V_b` for every column of `w` (weights already centered if required).
    fn vb_batch(&self, w: &Array2<f64>) -> Vec<f64> {
        // Transposed so each replicate is a contiguous row.
        let rows = |a: Array2<f64>| a.t().as_standard_layout().into_owned();
        let wt = rows(w.clone());
        let kw = rows(self.k.dot(w));
        let lw = rows(self.l.dot(w));
        let mw = rows(self.m.dot(w));
        let row = |a: &Array2<f64>, c: usize| -> Vec<f64> { a.row(c).to_vec() };
        (0..w.ncols())
            .map(|c| self.vb_single(&row(&wt, c), &row(&kw, c), &row(&lw, c), &row(&mw, c)))
            .collect()
    }

    fn vb_single(&self, w: &[f64], kw: &[f64], lw: &[f64], mw: &[f64]) -> f64 {
        let n = w.len();
        let nf = n as f64;
        let dot = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(u, v)| u * v).sum() };
        let (k1, l1, m1) = (
            self.k1.as_slice().expect("contiguous"),
            self.l1.as_slice().expect("contiguous"),
            self.m1.as_slice().expect("contiguous"),
        );
        let sum_w: f64 = w.iter().sum();
        // sum of a vector that is either 1 (false) or w (true)
        let total = |sel: bool| if sel { sum_w } else { nf };
        // a^T A b for A with products A1 and Aw
        let quad = |a1: &[f64], aw: &[f64], s1: bool, s2: bool| -> f64 {
            match (s1, s2) {
                (false, false) => a1.iter().sum(),
                (true, false) | (false, true) => dot(w, a1),
                (true, true) => dot(w, aw),
            }
        };
        // sum_b u2_b (K u1)_b (L u3)_b
        let tri = |s1: bool, s2: bool, s3: bool| -> f64 {
            let ku = if s1 { kw } else { k1 };
            let lu = if s3 { lw } else { l1 };
            if s2 {
                (0..n).map(|b| w[b] * ku[b] * lu[b]).sum()
            } else {
                dot(ku, lu)
            }
        };
        const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let mut acc = 0.0;
        for (p, q) in PAIRS {
            let mut sel = [false; 4];
            sel[p] = true;
            sel[q] = true;
            let t1 = quad(m1, mw, sel[0], sel[1]) * total(sel[2]) * total(sel[3]);
            let t2 = quad(k1, kw, sel[0], sel[1]) * quad(l1, lw, sel[2], sel[3]);
            let t3 = tri(sel[0], sel[1], sel[2]) * total(sel[3]);
            acc += t1 + t2 - 2.0 * t3;
        }
        acc / (6.0 * nf.powi(4))
    }
}

/// Bootstrapped HSIC `V_b1` / `V_b2` in O(n^2); equals the naive degree-4 sum.
pub fn hsic_vb_fast(
    k: &GramMatrix,
    l: &GramMatrix,
    w: &BootstrapSeries,
    variant: Variant,
) -> Result<f64> {
    if k.n() != l.n() {
        return Err(Error::LengthMismatch {
            left: k.n(),
            right: l.n(),
        });
    }
    if w.len() != k.n() {
        return Err(Error::LengthMismatch {
            left: k.n(),
            right: w.len(),
        });
    }
    let pre = HsicPrecomp::new(k.view(), l.view());
    let weights = Array2::from_shape_vec((w.len(), 1), w.weights(variant)).expect("shape");
    Ok(pre.vb_batch(&weights)[0])
}

/// `V_b` of the HSIC core for every replicate of `config` (unscaled).
pub(crate) fn hsic_vb_replicates(
    k: ArrayView2<'_, f64>,
    l: ArrayView2<'_, f64>,
    config: &BootstrapConfig,
) -> Vec<f64> {
    let w = multiplier_matrix(k.nrows(), config, tag::WILD, config.variant);
    HsicPrecomp::new(k, l).vb_batch(&w)
}

/// Scaled null samples `c n V_b` with `c = 6` unless the degree factor is disabled.
pub(crate) fn hsic_null_samples(
    k: ArrayView2<'_, f64>,
    l: ArrayView2<'_, f64>,
    config: &BootstrapConfig,
) -> Vec<f64> {
    let n = k.nrows() as f64;
    let factor = if config.degree_factor { DEGREE_FACTOR } else { 1.0 };
    hsic_vb_replicates(k, l, config)
        .into_iter()
        .map(|v| factor * n * v)
        .collect()
}

fn check_paired(z: &PairedSeries) -> Result<()> {
    if z.len() < MIN_LENGTH {
        return Err(Error::TooShort {
            required: MIN_LENGTH,
            got: z.len(),
        });
    }
    Ok(())
}

/// Gram matrices of `X` and `Y`, resolving median-heuristic bandwidths per series.
pub(crate) fn paired_grams(
    z: &PairedSeries,
    k: &KernelSpec,
    l: &KernelSpec,
) -> Result<(Array2<f64>, Array2<f64>, KernelSpec, KernelSpec)> {
    let k = k.resolve(&z.x)?;
    let l = l.resolve(&z.y)?;
    Ok((cross_gram(&k, &z.x, &z.x)?, cross_gram(&l, &z.y, &z.y)?, k, l))
}

/// Wild-bootstrap test of `X_t` independent of `Y_t`.
///
/// Statistic `n HSIC`; null samples `6 n V_b` (factor per `config.degree_factor`).
pub fn instantaneous_independence_test(
    z: &PairedSeries,
    k: &KernelSpec,
    l: &KernelSpec,
    config: &BootstrapConfig,
    alpha: f64,
) -> Result<TestResult> {
    check_alpha(alpha)?;
    config.validate()?;
    check_paired(z)?;
    let n = z.len();
    let (kg, lg, _, _) = paired_grams(z, k, l)?;
    let statistic = n as f64 * hsic_views(kg.view(), lg.view());
    let null = hsic_null_samples(kg.view(), lg.view(), config);
    let method = match config.variant {
        Variant::Vb1 => "hsic-wild-vb1",
        Variant::Vb2 => "hsic-wild-vb2",
    };
    let mut r = TestResult::from_null(method, statistic, null, alpha, config.seed, n);
    r.block_length = Some(config.block_length);
    r.factor_applied = config.degree_factor;
    Ok(r)
}

/// `max(20, n / 20)`.
pub fn shift_min(n: usize) -> usize {
    20.max(n / 20)
}

/// Shift-HSIC baseline: null samples `n HSIC` of `(X_t, Y_{(t+s) mod n})` for
/// shifts `s` uniform on `[min_shift, n - min_shift]`.
pub fn shift_hsic_test(
    z: &PairedSeries,
    k: &KernelSpec,
    l: &KernelSpec,
    num_shifts: usize,
    alpha: f64,
    seed: u64,
) -> Result<TestResult> {
    check_alpha(alpha)?;
    let n = z.len();
    let min_shift = shift_min(n);
    if n < 3 * min_shift {
        return Err(Error::TooShort {
            required: 3 * min_shift,
            got: n,
        });
    }
    if num_shifts == 0 {
        return Err(Error::InvalidConfig("need at least one shift".into()));
    }
    let (kg, lg, _, _) = paired_grams(z, k, l)?;
    let kc = center_view(kg.view());
    let lc = center_view(lg.view());
    let nf = n as f64;
    let statistic = (&kc * &lc).sum() / nf;
    let mut rng = StreamKey::new(seed, 0, tag::SHIFT).rng();
    let null: Vec<f64> = (0..num_shifts)
        .map(|_| {
            let s = rng.random_range(min_shift..=n - min_shift);
            circular_shift_hsic(&kc, &lc, s) / nf
        })
        .collect();
    let mut r = TestResult::from_null("hsic-shift", statistic, null, alpha, seed, n);
    r.notes.push(format!("min_shift={min_shift}"));
    Ok(r)
}

/// `sum_ij Kc_ij Lc_{(i+s)%n, (j+s)%n}`.
fn circular_shift_hsic(kc: &Array2<f64>, lc: &Array2<f64>, s: usize) -> f64 {
    let n = kc.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        let ii = (i + s) % n;
        let krow = kc.row(i);
        let lrow = lc.row(ii);
        let (kr, lr) = (krow.as_slice().expect("row-major"), lrow.as_slice().expect("row-major"));
        // j runs 0..n, jj = (j + s) % n splits into two contiguous ranges.
        let split = n - s % n;
        acc += kr[..split].iter().zip(&lr[s % n..]).map(|(a, b)| a * b).sum::<f64>();
        acc += kr[split..].iter().zip(&lr[..s % n]).map(|(a, b)| a * b).sum::<f64>();
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::TimeSeries;
    use crate::vstats::{vb1_naive, vb2_naive};
    use crate::wild_bootstrap::generate_w;
    use ndarray::arr2;

    fn random_pair(n: usize, seed: u64) -> PairedSeries {
        let mut rng = StreamKey::new(seed, 0, 5).rng();
        let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 3.0).collect();
        let y: Vec<f64> = x.iter().map(|v| v.sin() + rng.random::<f64>()).collect();
        PairedSeries::new(
            TimeSeries::from_scalars(x).unwrap(),
            TimeSeries::from_scalars(y).unwrap(),
        )
        .unwrap()
    }

    fn g(a: Array2<f64>) -> GramMatrix {
        GramMatrix::from_array(a).unwrap()
    }

    #[test]
    fn stat_small_cases() {
        let k = g(arr2(&[[1.0, 0.3, 0.1], [0.3, 1.0, 0.2], [0.1, 0.2, 1.0]]));
        let ones = g(Array2::ones((3, 3)));
        assert_eq!(hsic_stat(&k, &ones).unwrap().value, 0.0);

        let (a, b) = (0.5, 0.5);
        let k = g(arr2(&[[1.0, a], [a, 1.0]]));
        let l = g(arr2(&[[1.0, b], [b, 1.0]]));
        let v = hsic_stat(&k, &l).unwrap().value;
        assert!((v - (1.0 - a) * (1.0 - b) / 4.0).abs() < 1e-15);
        assert!((v - 0.0625).abs() < 1e-15);
    }

    #[test]
    fn stat_is_symmetric() {
        let z = random_pair(25, 3);
        let (kg, lg, _, _) = paired_grams(&z, &KernelSpec::gaussian(1.0), &KernelSpec::gaussian(0.7)).unwrap();
        let (k, l) = (g(kg), g(lg));
        assert_eq!(hsic_stat(&k, &l).unwrap(), hsic_stat(&l, &k).unwrap());
    }

    #[test]
    fn core_cases() {
        let k = KernelSpec::gaussian(1.0);
        let l = KernelSpec::gaussian(0.5);
        let p: (&[f64], &[f64]) = (&[0.2], &[1.0]);
        assert_eq!(hsic_core([p, p, p, p], &k, &l).unwrap(), 0.0);
        let flat = KernelSpec::gaussian(1e12);
        let zs: [(&[f64], &[f64]); 4] = [(&[0.0], &[1.0]), (&[1.0], &[3.0]), (&[2.0], &[0.0]), (&[5.0], &[2.0])];
        assert!(hsic_core(zs, &k, &flat).unwrap().abs() < 1e-15);

        let base = hsic_core(zs, &k, &l).unwrap();
        for perm in PERMUTATIONS_4.iter().step_by(2).take(10) {
            let permuted = [zs[perm[0]], zs[perm[1]], zs[perm[2]], zs[perm[3]]];
            let v = hsic_core(permuted, &k, &l).unwrap();
            assert!((v - base).abs() < 1e-12);
        }
    }

    #[test]
    fn identity_check_cases() {
        let k = KernelSpec::gaussian(1.0);
        let l = KernelSpec::laplacian(0.8);
        let (a, b) = hsic_v_identity_check(&random_pair(8, 11), &k, &l).unwrap();
        assert!((a - b).abs() <= 1e-9 * a.abs());

        let x = TimeSeries::from_scalars((0..7).map(|i| i as f64).collect()).unwrap();
        let yc = TimeSeries::from_scalars(vec![2.0; 7]).unwrap();
        let (a, b) = hsic_v_identity_check(&PairedSeries::new(x.clone(), yc).unwrap(), &k, &l).unwrap();
        assert!(a.abs() < 1e-15 && b.abs() < 1e-12);

        let x6 = x.slice(0, 6);
        let (a, b) = hsic_v_identity_check(&PairedSeries::new(x6.clone(), x6).unwrap(), &k, &k).unwrap();
        assert!(a > 0.0 && (a - b).abs() <= 1e-9 * a);

        assert!(hsic_v_identity_check(&random_pair(21, 1), &k, &l).is_err());
    }

    #[test]
    fn fast_bootstrap_matches_naive() {
        let k = KernelSpec::gaussian(1.2);
        let l = KernelSpec::gaussian(0.6);
        for (i, n) in [6usize, 9, 12].into_iter().enumerate() {
            let z = random_pair(n, 40 + i as u64);
            let (kg, lg, _, _) = paired_grams(&z, &k, &l).unwrap();
            let (kg, lg) = (g(kg), g(lg));
            let cfg = BootstrapConfig { seed: i as u64, ..Default::default() };
            let w = generate_w(n, &cfg, 0);
            let core = HsicCore { k, l };
            let pairs = z.pairs();
            let n1 = vb1_naive(&core, &pairs, &w).unwrap().raw;
            let n2 = vb2_naive(&core, &pairs, &w).unwrap().raw;
            let f1 = hsic_vb_fast(&kg, &lg, &w, Variant::Vb1).unwrap();
            let f2 = hsic_vb_fast(&kg, &lg, &w, Variant::Vb2).unwrap();
            assert!((f1 - n1).abs() <= 1e-9 * n1.abs(), "n={n}: {f1} vs {n1}");
            assert!((f2 - n2).abs() <= 1e-9 * n2.abs(), "n={n}: {f2} vs {n2}");
        }
    }

    #[test]
    fn fast_bootstrap_degenerate_weights() {
        let z = random_pair(15, 2);
        let (kg, lg, _, _) = paired_grams(&z, &KernelSpec::gaussian(1.0), &KernelSpec::gaussian(1.0)).unwrap();
        let (kg, lg) = (g(kg), g(lg));
        let stat = hsic_stat(&kg, &lg).unwrap().value;
        let ones = BootstrapSeries::new(vec![1.0; 15]);
        let v = hsic_vb_fast(&kg, &lg, &ones, Variant::Vb1).unwrap();
        assert!((v - stat).abs() <= 1e-10 * stat);
        let c = BootstrapSeries::new(vec![-2.0; 15]);
        assert!(hsic_vb_fast(&kg, &lg, &c, Variant::Vb2).unwrap().abs() < 1e-15);
        assert!(hsic_vb_fast(&kg, &lg, &BootstrapSeries::new(vec![1.0; 3]), Variant::Vb1).is_err());
    }

    #[test]
    fn constant_x_never_rejects() {
        let y = random_pair(60, 8).y;
        let x = TimeSeries::from_scalars(vec![1.5; 60]).unwrap();
        let z = PairedSeries::new(x, y).unwrap();
        let cfg = BootstrapConfig { replicates: 100, ..Default::default() };
        for variant in [Variant::Vb1, Variant::Vb2] {
            let cfg = BootstrapConfig { variant, ..cfg };
            let r = instantaneous_independence_test(&z, &KernelSpec::gaussian(1.0), &KernelSpec::gaussian_median(), &cfg, 0.05).unwrap();
            assert_eq!(r.statistic, 0.0);
            assert!(!r.reject);
        }
    }

    #[test]
    fn too_short_rejected() {
        let z = random_pair(5, 1);
        let cfg = BootstrapConfig::default();
        assert!(matches!(
            instantaneous_independence_test(&z, &KernelSpec::gaussian(1.0), &KernelSpec::gaussian(1.0), &cfg, 0.05),
            Err(Error::TooShort { .. })
        ));
        let z = random_pair(59, 1);
        assert!(shift_hsic_test(&z, &KernelSpec::gaussian(1.0), &KernelSpec::gaussian(1.0), 10, 0.05, 0).is_err());
    }

    #[test]
    fn circular_shift_matches_explicit_rotation() {
        let z = random_pair(70, 4);
        let k = KernelSpec::gaussian(1.0);
        let (kg, lg, _, _) = paired_grams(&z, &k, &k).unwrap();
        let kc = center_view(kg.view());
        let lc = center_view(lg.view());
        for s in [0usize, 1, 23, 69] {
            let idx: Vec<usize> = (0..70).map(|t| (t + s) % 70).collect();
            let yshift = z.y.select(&idx);
            let explicit = hsic_views(kg.view(), cross_gram(&k, &yshift, &yshift).unwrap().view());
            let fast = circular_shift_hsic(&kc, &lc, s) / (70.0 * 70.0);
            assert!((explicit - fast).abs() < 1e-14);
        }
    }
}
