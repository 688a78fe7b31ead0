use tempest::generators::{gen_ar1_pair, gen_vec_pair, ProcessSpec};
use tempest::harness::experiment::run_trials;
use tempest::harness::{evaluate, load_csv, write_csv, DataSource, TestConfig, TestKind};
use tempest::hsic::instantaneous_independence_test;
use tempest::lag_hsic::{lag_hsic_test, LagHsicConfig, LagRadius};
use tempest::{BootstrapConfig, KernelSpec, Variant};

fn rate(source: DataSource, test: TestKind, cfg: TestConfig, trials: usize, seed: u64) -> f64 {
    let recs = run_trials(&source, &[(test, cfg)], trials, seed).unwrap().remove(0);
    recs.iter().filter(|r| r.reject).count() as f64 / trials as f64
}

#[test]
fn hsic_vb2_holds_level_on_autocorrelated_independent_pairs() {
    let mut cfg = TestConfig::default();
    cfg.bootstrap.variant = Variant::Vb2;
    let src = DataSource::Paired { process: ProcessSpec::Ar1Pair { ar: 0.5 }, n: 500 };
    let r = rate(src, TestKind::HsicWild, cfg, 200, 11);
    assert!((0.01..=0.10).contains(&r), "rejection rate {r}");
}

#[test]
fn shift_test_holds_level_on_white_noise() {
    let src = DataSource::Paired { process: ProcessSpec::WhiteNoisePair, n: 300 };
    let r = rate(src, TestKind::HsicShift, TestConfig::default(), 100, 12);
    assert!(r <= 0.12, "rejection rate {r}");
}

#[test]
fn two_sample_wild_test_detects_mean_shift_in_dependent_chains() {
    let cov = [[15.5, 14.5], [14.5, 15.5]];
    let src = DataSource::TwoSample {
        x: ProcessSpec::GibbsNormal { mean: [0.0, 0.0], cov, thin: 2 },
        y: ProcessSpec::GibbsNormal { mean: [2.5, 0.0], cov, thin: 2 },
        nx: 500,
        ny: 500,
    };
    let cfg = TestConfig { kernel: KernelSpec::gaussian(1.7), ..TestConfig::default() };
    assert_eq!(rate(src, TestKind::MmdWild, cfg, 20, 13), 1.0);
}

#[test]
fn lag_scan_rejects_common_variance_pair() {
    let z = gen_vec_pair(1000, 0.45, 14).unwrap();
    let k = KernelSpec::gaussian_median();
    let cfg = LagHsicConfig { lags: LagRadius::Fixed(4), ..LagHsicConfig::default() };
    let r = lag_hsic_test(&z, &k, &k, &cfg).unwrap();
    assert!(r.reject);
    assert_eq!(r.lags.len(), 9);
    assert!(r.statistics.iter().all(|&s| s <= r.max_statistic));
}

#[test]
fn instantaneous_test_is_reproducible_per_seed() {
    let z = gen_ar1_pair(300, 0.3, 15).unwrap();
    let k = KernelSpec::gaussian_median();
    let cfg = BootstrapConfig { seed: 5, variant: Variant::Vb2, ..BootstrapConfig::default() };
    let a = instantaneous_independence_test(&z, &k, &k, &cfg, 0.05).unwrap();
    let b = instantaneous_independence_test(&z, &k, &k, &cfg, 0.05).unwrap();
    assert_eq!(a, b);
    let c = instantaneous_independence_test(&z, &k, &k, &BootstrapConfig { seed: 6, ..cfg }, 0.05).unwrap();
    assert_eq!(a.statistic, c.statistic);
    assert_ne!(a.null_samples, c.null_samples);
}

#[test]
fn csv_round_trip_feeds_the_same_report() {
    let z = gen_vec_pair(200, 0.3, 16).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (px, py) = (dir.path().join("x.csv"), dir.path().join("y.csv"));
    write_csv(&z.x, None, &mut std::fs::File::create(&px).unwrap()).unwrap();
    write_csv(&z.y, Some(&["y".to_string()]), &mut std::fs::File::create(&py).unwrap()).unwrap();
    let (x, y) = (load_csv(&px, false).unwrap(), load_csv(&py, true).unwrap());
    assert_eq!((&x, &y), (&z.x, &z.y));
    let cfg = TestConfig::default();
    let direct = evaluate(&z.x, &z.y, TestKind::HsicWild, &cfg, 3).unwrap();
    let loaded = evaluate(&x, &y, TestKind::HsicWild, &cfg, 3).unwrap();
    assert_eq!(direct.to_json(), loaded.to_json());
}
