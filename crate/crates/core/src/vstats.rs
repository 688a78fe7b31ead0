//! Naive V-statistics: exact sums over all `n^m` index tuples.
//!
//! These are the ground truth for the quadratic-time paths in `mmd` and
//! `hsic`, and are deliberately slow. Inputs with `n^m > 2^20` are refused.

use crate::error::{Error, Result};
use crate::wild_bootstrap::{center_w, BootstrapSeries};

/// `n^m` ceiling for naive evaluation (32^4).
pub const NAIVE_BUDGET: u128 = 1 << 20;

/// A symmetric function of `arity()` observations.
pub trait Core<T> {
    fn arity(&self) -> usize;
    fn eval(&self, args: &[&T]) -> f64;
}

/// Wraps a closure as a [`Core`].
pub struct FnCore<F> {
    arity: usize,
    f: F,
}

impl<F> FnCore<F> {
    pub fn new(arity: usize, f: F) -> Self {
        Self { arity, f }
    }
}

impl<T, F: Fn(&[&T]) -> f64> Core<T> for FnCore<F> {
    fn arity(&self) -> usize {
        self.arity
    }

    fn eval(&self, args: &[&T]) -> f64 {
        (self.f)(args)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VStatValue {
    /// `V(h)`.
    pub raw: f64,
    pub n: usize,
}

impl VStatValue {
    /// `n V(h)`.
    pub fn normalized(&self) -> f64 {
        self.n as f64 * self.raw
    }
}

fn check_budget(n: usize, arity: usize) -> Result<()> {
    if arity < 2 {
        return Err(Error::InvalidConfig(format!("core arity must be >= 2, got {arity}")));
    }
    if n == 0 {
        return Err(Error::TooShort { required: 1, got: 0 });
    }
    let total = (n as u128).checked_pow(arity as u32);
    match total {
        Some(t) if t <= NAIVE_BUDGET => Ok(()),
        _ => Err(Error::BudgetExceeded { n, arity }),
    }
}

/// `(1/n^m) sum_{i in N^m} weight(i_1, i_2) h(z_{i_1}, ..., z_{i_m})`.
fn weighted_sum<T, C: Core<T> + ?Sized>(
    core: &C,
    z: &[T],
    weight: impl Fn(usize, usize) -> f64,
) -> Result<VStatValue> {
    let n = z.len();
    let m = core.arity();
    check_budget(n, m)?;
    let mut idx = vec![0usize; m];
    let mut args: Vec<&T> = vec![&z[0]; m];
    let mut total = 0.0;
    loop {
        for (slot, &i) in args.iter_mut().zip(&idx) {
            *slot = &z[i];
        }
        let w = weight(idx[0], idx[1]);
        if w != 0.0 {
            total += w * core.eval(&args);
        }
        // Odometer increment, last position fastest.
        let mut pos = m;
        loop {
            if pos == 0 {
                return Ok(VStatValue {
                    raw: total / (n as f64).powi(m as i32),
                    n,
                });
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
        }
    }
}

pub fn v_naive<T, C: Core<T> + ?Sized>(core: &C, z: &[T]) -> Result<VStatValue> {
    weighted_sum(core, z, |_, _| 1.0)
}

pub fn vb1_naive<T, C: Core<T> + ?Sized>(
    core: &C,
    z: &[T],
    w: &BootstrapSeries,
) -> Result<VStatValue> {
    if w.len() != z.len() {
        return Err(Error::LengthMismatch {
            left: z.len(),
            right: w.len(),
        });
    }
    let w = w.as_slice();
    weighted_sum(core, z, |a, b| w[a] * w[b])
}

pub fn vb2_naive<T, C: Core<T> + ?Sized>(
    core: &C,
    z: &[T],
    w: &BootstrapSeries,
) -> Result<VStatValue> {
    if w.len() != z.len() {
        return Err(Error::LengthMismatch {
            left: z.len(),
            right: w.len(),
        });
    }
    let centered = center_w(w);
    let wc = centered.as_slice();
    weighted_sum(core, z, |a, b| wc[a] * wc[b])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn product_core() -> FnCore<impl Fn(&[&f64]) -> f64> {
        FnCore::new(2, |a: &[&f64]| *a[0] * *a[1])
    }

    #[test]
    fn constant_core() {
        let z = [1.0, 5.0, -2.0];
        let core = FnCore::new(3, |_: &[&f64]| 2.5);
        let v = v_naive(&core, &z).unwrap();
        assert!((v.raw - 2.5).abs() < 1e-15);
        assert!((v.normalized() - 7.5).abs() < 1e-14);
    }

    #[test]
    fn product_core_closed_form() {
        let v = v_naive(&product_core(), &[1.0, 2.0, 3.0]).unwrap();
        assert!((v.raw - 4.0).abs() < 1e-14);
    }

    #[test]
    fn bootstrapped_product_core() {
        let z = [1.0, 2.0];
        let w = BootstrapSeries::new(vec![1.0, -1.0]);
        assert!((vb1_naive(&product_core(), &z, &w).unwrap().raw - 0.25).abs() < 1e-15);
        assert!((vb2_naive(&product_core(), &z, &w).unwrap().raw - 0.25).abs() < 1e-15);

        let ones = BootstrapSeries::new(vec![1.0; 3]);
        let z3 = [1.0, 2.0, 3.0];
        assert_eq!(
            vb1_naive(&product_core(), &z3, &ones).unwrap(),
            v_naive(&product_core(), &z3).unwrap()
        );
        let zeros = BootstrapSeries::new(vec![0.0; 3]);
        assert_eq!(vb1_naive(&product_core(), &z3, &zeros).unwrap().raw, 0.0);
        let constant = BootstrapSeries::new(vec![4.0; 3]);
        assert_eq!(vb2_naive(&product_core(), &z3, &constant).unwrap().raw, 0.0);
    }

    #[test]
    fn budget_and_length_errors() {
        let z = vec![0.0; 33];
        let core = FnCore::new(4, |_: &[&f64]| 1.0);
        assert_eq!(
            v_naive(&core, &z).unwrap_err(),
            Error::BudgetExceeded { n: 33, arity: 4 }
        );
        assert!(v_naive(&core, &z[..32]).is_ok());
        let w = BootstrapSeries::new(vec![1.0; 4]);
        assert!(matches!(
            vb1_naive(&product_core(), &[1.0, 2.0], &w),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn vb2_ignores_constant_shift() {
        let z: Vec<f64> = (0..9).map(|i| (i as f64 * 0.7).sin()).collect();
        let core = FnCore::new(3, |a: &[&f64]| (*a[0] - *a[1]).abs() + *a[2] * *a[0] * *a[1]);
        let w: Vec<f64> = (0..9).map(|i| (i as f64 * 1.3).cos()).collect();
        let base = vb2_naive(&core, &z, &BootstrapSeries::new(w.clone())).unwrap().raw;
        let shifted: Vec<f64> = w.iter().map(|v| v + 3.75).collect();
        let other = vb2_naive(&core, &z, &BootstrapSeries::new(shifted)).unwrap().raw;
        assert!((base - other).abs() <= 1e-12 * base.abs().max(1e-12));
    }

    #[test]
    fn permutation_invariance() {
        let z = vec![0.3, -1.2, 2.0, 0.7, 1.1];
        let core = FnCore::new(2, |a: &[&f64]| (-(*a[0] - *a[1]).powi(2)).exp());
        let mut p = z.clone();
        p.reverse();
        p.swap(0, 2);
        let a = v_naive(&core, &z).unwrap().raw;
        let b = v_naive(&core, &p).unwrap().raw;
        assert!((a - b).abs() < 1e-14);
    }
}
