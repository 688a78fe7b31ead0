//! Benchmark presets: rejection-rate experiments over grids of sample sizes.
//!
//! Every preset is a list of cells (data source × sample size); each cell runs
//! all of its methods on the same per-trial data.

use super::experiment::{run_trials, DataSource, RejectionReport, TestConfig, TestKind};
use crate::error::{Error, Result};
use crate::generators::{OscillatorParams, PitchParams, ProcessSpec, GIBBS_COV, GIBBS_MEAN};
use crate::kernels::KernelSpec;
use crate::lag_hsic::LagRadius;
use crate::rng::derive_seed;
use crate::wild_bootstrap::Variant;
use serde::{Deserialize, Serialize};
use std::str::FromStr;
use std::time::Instant;

pub const DEFAULT_TRIALS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Table1Mcmc,
    Table1Audio,
    Fig1Extinct,
    Fig2Vec,
    Fig2Osc,
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Table1Mcmc,
        Preset::Table1Audio,
        Preset::Fig1Extinct,
        Preset::Fig2Vec,
        Preset::Fig2Osc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Table1Mcmc => "table1-mcmc",
            Preset::Table1Audio => "table1-audio",
            Preset::Fig1Extinct => "fig1-extinct",
            Preset::Fig2Vec => "fig2-vec",
            Preset::Fig2Osc => "fig2-osc",
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown preset {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hypothesis {
    H0,
    H1,
}

/// A test as it appears in a benchmark table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub label: String,
    pub test: TestKind,
    /// Pinned bootstrap variant; `None` follows the preset configuration.
    pub variant: Option<Variant>,
}

impl MethodSpec {
    fn new(label: &str, test: TestKind, variant: Option<Variant>) -> Self {
        Self {
            label: label.to_string(),
            test,
            variant,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub experiment: String,
    pub hypothesis: Hypothesis,
    /// Sample size label, e.g. `500` or `300x200`.
    pub size: String,
    pub source: DataSource,
    pub methods: Vec<MethodSpec>,
    pub config: TestConfig,
}

/// Optional overrides of the preset defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchOptions {
    pub trials: Option<usize>,
    /// Add the largest sample sizes to each grid.
    pub full: bool,
    pub seed: u64,
    pub alpha: Option<f64>,
    pub block_length: Option<f64>,
    pub replicates: Option<usize>,
    pub variant: Option<Variant>,
    pub kernel: Option<KernelSpec>,
    pub degree_factor: Option<bool>,
    pub gpd: Option<bool>,
    pub lags: Option<LagRadius>,
    pub timing: bool,
}

impl BenchOptions {
    fn apply(&self, mut cfg: TestConfig) -> TestConfig {
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        if let Some(l) = self.block_length {
            cfg.bootstrap.block_length = l;
        }
        if let Some(b) = self.replicates {
            cfg.bootstrap.replicates = b;
            cfg.permutations = b;
        }
        if let Some(v) = self.variant {
            cfg.bootstrap.variant = v;
        }
        if let Some(k) = self.kernel {
            cfg.kernel = k;
        }
        if let Some(f) = self.degree_factor {
            cfg.bootstrap.degree_factor = f;
        }
        if let Some(g) = self.gpd {
            cfg.gpd = g;
        }
        if let Some(m) = self.lags {
            cfg.lags = m;
        }
        cfg
    }
}

fn base_config(kernel: KernelSpec, variant: Variant) -> TestConfig {
    let mut cfg = TestConfig {
        kernel,
        ..TestConfig::default()
    };
    cfg.bootstrap.variant = variant;
    cfg
}

fn mcmc_cells(opts: &BenchOptions) -> Vec<Cell> {
    let n = 500;
    let iid = |mean| ProcessSpec::IidNormal { mean, cov: GIBBS_COV };
    let gibbs = |mean| ProcessSpec::GibbsNormal { mean, cov: GIBBS_COV, thin: 1 };
    let shifted = [2.5, 0.0];
    let methods = vec![
        MethodSpec::new("permutation", TestKind::MmdPermutation, None),
        MethodSpec::new("MMD_kb", TestKind::MmdWild, None),
        MethodSpec::new("Vb1", TestKind::MmdPaired, Some(Variant::Vb1)),
        MethodSpec::new("Vb2", TestKind::MmdPaired, Some(Variant::Vb2)),
    ];
    let config = opts.apply(base_config(KernelSpec::gaussian(1.7), Variant::Vb1));
    [
        ("iid vs iid", Hypothesis::H0, iid(GIBBS_MEAN), iid(GIBBS_MEAN)),
        ("iid vs Gibbs", Hypothesis::H0, iid(GIBBS_MEAN), gibbs(GIBBS_MEAN)),
        ("Gibbs vs Gibbs", Hypothesis::H0, gibbs(GIBBS_MEAN), gibbs(GIBBS_MEAN)),
        ("iid vs iid, mean shift", Hypothesis::H1, iid(GIBBS_MEAN), iid(shifted)),
        ("Gibbs vs Gibbs, mean shift", Hypothesis::H1, gibbs(GIBBS_MEAN), gibbs(shifted)),
    ]
    .into_iter()
    .map(|(name, h, x, y)| Cell {
        experiment: name.to_string(),
        hypothesis: h,
        size: n.to_string(),
        source: DataSource::TwoSample { x, y, nx: n, ny: n },
        methods: methods.clone(),
        config: config.clone(),
    })
    .collect()
}

fn audio_cells(opts: &BenchOptions) -> Vec<Cell> {
    let mut sizes = vec![(300, 200), (600, 400)];
    if opts.full {
        sizes.push((900, 600));
    }
    let pitch = |sigma_frac| {
        ProcessSpec::PitchSound(PitchParams {
            sigma_frac,
            ..PitchParams::default()
        })
    };
    let methods = vec![
        MethodSpec::new("permutation", TestKind::MmdPermutation, None),
        MethodSpec::new("MMD_kb", TestKind::MmdWild, None),
    ];
    let config = opts.apply(base_config(KernelSpec::gaussian(14.0), Variant::Vb1));
    let mut cells = Vec::new();
    for (h, sigma_y) in [(Hypothesis::H0, 0.1), (Hypothesis::H1, 0.05)] {
        for &(nx, ny) in &sizes {
            cells.push(Cell {
                experiment: format!("pitch sigma 0.1 vs {sigma_y}"),
                hypothesis: h,
                size: format!("{nx}x{ny}"),
                source: DataSource::TwoSample {
                    x: pitch(0.1),
                    y: pitch(sigma_y),
                    nx,
                    ny,
                },
                methods: methods.clone(),
                config: config.clone(),
            });
        }
    }
    cells
}

fn extinct_cells(opts: &BenchOptions) -> Vec<Cell> {
    let n = if opts.full { 1200 } else { 500 };
    let methods = vec![
        MethodSpec::new("Shift-HSIC", TestKind::HsicShift, None),
        MethodSpec::new("Vb1", TestKind::HsicWild, Some(Variant::Vb1)),
        MethodSpec::new("Vb2", TestKind::HsicWild, Some(Variant::Vb2)),
    ];
    let config = opts.apply(base_config(KernelSpec::gaussian_median(), Variant::Vb1));
    let mut cells = Vec::new();
    for ar in [0.2, 0.5, 0.8] {
        cells.push(Cell {
            experiment: format!("extinct gaussian (reconstruction), ar {ar}, radius 0"),
            hypothesis: Hypothesis::H0,
            size: n.to_string(),
            source: DataSource::Paired {
                process: ProcessSpec::ExtinctGaussianPair { ar, radius: 0.0 },
                n,
            },
            methods: methods.clone(),
            config: config.clone(),
        });
    }
    for radius in [0.5, 1.0, 1.5, 2.0] {
        cells.push(Cell {
            experiment: format!("extinct gaussian (reconstruction), ar 0.5, radius {radius}"),
            hypothesis: Hypothesis::H1,
            size: n.to_string(),
            source: DataSource::Paired {
                process: ProcessSpec::ExtinctGaussianPair { ar: 0.5, radius },
                n,
            },
            methods: methods.clone(),
            config: config.clone(),
        });
    }
    cells
}

fn lag_cells(opts: &BenchOptions, name: &str, process: ProcessSpec, null: ProcessSpec, sizes: &[usize]) -> Vec<Cell> {
    let methods = vec![MethodSpec::new("lag-HSIC", TestKind::LagHsic, None)];
    let config = opts.apply(base_config(KernelSpec::gaussian_median(), Variant::Vb2));
    let mut cells: Vec<Cell> = sizes
        .iter()
        .map(|&n| Cell {
            experiment: name.to_string(),
            hypothesis: Hypothesis::H1,
            size: n.to_string(),
            source: DataSource::Paired { process, n },
            methods: methods.clone(),
            config: config.clone(),
        })
        .collect();
    let n = *sizes.last().expect("non-empty grid");
    cells.push(Cell {
        experiment: format!("{name}, null"),
        hypothesis: Hypothesis::H0,
        size: n.to_string(),
        source: DataSource::Surrogate { process: null, n },
        methods,
        config,
    });
    cells
}

fn vec_cells(opts: &BenchOptions) -> Vec<Cell> {
    let sizes: &[usize] = if opts.full {
        &[300, 600, 900, 1200, 1500, 2000]
    } else {
        &[300, 600, 900, 1200]
    };
    let p = ProcessSpec::VecPair { coupling: 0.45 };
    lag_cells(opts, "common variance", p, p, sizes)
}

fn osc_cells(opts: &BenchOptions) -> Vec<Cell> {
    let sizes: &[usize] = if opts.full {
        &[500, 1000, 1500, 2000, 3000]
    } else {
        &[500, 1000, 2000]
    };
    let coupled = ProcessSpec::OscillatorPair(OscillatorParams::default());
    let mut cells = lag_cells(opts, "phase coupled oscillators C 0.4", coupled, coupled, sizes);
    // The null cell uses the decoupled system rather than a surrogate.
    let null = cells.last_mut().expect("null cell");
    null.experiment = "phase coupled oscillators C 0".into();
    null.source = DataSource::Paired {
        process: ProcessSpec::OscillatorPair(OscillatorParams {
            coupling: 0.0,
            ..OscillatorParams::default()
        }),
        n: *sizes.last().expect("non-empty grid"),
    };
    cells
}

pub fn preset_cells(preset: Preset, opts: &BenchOptions) -> Vec<Cell> {
    match preset {
        Preset::Table1Mcmc => mcmc_cells(opts),
        Preset::Table1Audio => audio_cells(opts),
        Preset::Fig1Extinct => extinct_cells(opts),
        Preset::Fig2Vec => vec_cells(opts),
        Preset::Fig2Osc => osc_cells(opts),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub hypothesis: Hypothesis,
    pub size: String,
    /// Rejection rate under H0, acceptance rate under H1.
    pub error_rate: f64,
    #[serde(flatten)]
    pub report: RejectionReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkResult {
    pub preset: String,
    pub seed: u64,
    pub notes: Vec<String>,
    pub cells: Vec<CellReport>,
}

/// Runs every cell of `preset`. Cell `i` is seeded with `derive_seed(seed, i)`.
pub fn run_benchmark(preset: Preset, opts: &BenchOptions) -> Result<BenchmarkResult> {
    let trials = opts.trials.unwrap_or(DEFAULT_TRIALS);
    let mut cells = Vec::new();
    for (i, cell) in preset_cells(preset, opts).into_iter().enumerate() {
        let start = Instant::now();
        let tests: Vec<(TestKind, TestConfig)> = cell
            .methods
            .iter()
            .map(|m| {
                let mut cfg = cell.config.clone();
                if let Some(v) = m.variant {
                    cfg.bootstrap.variant = v;
                }
                (m.test, cfg)
            })
            .collect();
        let records = run_trials(&cell.source, &tests, trials, derive_seed(opts.seed, i as u64))?;
        let elapsed = start.elapsed().as_secs_f64() / cell.methods.len() as f64;
        for (m, recs) in cell.methods.iter().zip(records) {
            let mut report = RejectionReport::from_records(&cell.experiment, &m.label, recs);
            if opts.timing {
                report.wall_time_s = Some(elapsed);
            }
            let error_rate = match cell.hypothesis {
                Hypothesis::H0 => report.rejection_rate,
                Hypothesis::H1 => 1.0 - report.rejection_rate,
            };
            cells.push(CellReport {
                hypothesis: cell.hypothesis,
                size: cell.size.clone(),
                error_rate,
                report,
            });
        }
    }
    let mut notes = vec![
        "gaussian kernel k(a,b) = exp(-|a-b|^2 / (2 sigma^2))".to_string(),
        format!("trials per cell: {trials}"),
    ];
    if preset == Preset::Fig1Extinct {
        notes.push("extinct gaussian dynamics are a reconstruction: AR(1) pair with innovations conditioned outside a disc".into());
    }
    Ok(BenchmarkResult {
        preset: preset.name().to_string(),
        seed: opts.seed,
        notes,
        cells,
    })
}

#[derive(Serialize)]
struct LongRow<'a> {
    preset: &'a str,
    experiment: &'a str,
    hypothesis: Hypothesis,
    size: &'a str,
    method: &'a str,
    trials: usize,
    rejections: usize,
    rejection_rate: f64,
    error_rate: f64,
    mean_statistic: f64,
    mean_threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_s: Option<f64>,
}

impl BenchmarkResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }

    /// One row per experiment × size × method.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for c in &self.cells {
            let r = &c.report;
            w.serialize(LongRow {
                preset: &self.preset,
                experiment: &r.experiment,
                hypothesis: c.hypothesis,
                size: &c.size,
                method: &r.method,
                trials: r.trials,
                rejections: r.rejections,
                rejection_rate: r.rejection_rate,
                error_rate: c.error_rate,
                mean_statistic: r.mean_statistic,
                mean_threshold: r.mean_threshold,
                wall_time_s: r.wall_time_s,
            })
            .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    /// One row per experiment × size, one rejection-rate column per method.
    pub fn to_wide_csv(&self) -> String {
        let mut methods: Vec<&str> = Vec::new();
        let mut rows: Vec<(&str, Hypothesis, &str)> = Vec::new();
        for c in &self.cells {
            if !methods.contains(&c.report.method.as_str()) {
                methods.push(&c.report.method);
            }
            let key = (c.report.experiment.as_str(), c.hypothesis, c.size.as_str());
            if !rows.contains(&key) {
                rows.push(key);
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["experiment", "hypothesis", "size", "trials"];
        header.extend(&methods);
        w.write_record(&header).expect("in-memory write");
        for (exp, h, size) in rows {
            let in_row: Vec<&CellReport> = self
                .cells
                .iter()
                .filter(|c| c.report.experiment == exp && c.hypothesis == h && c.size == size)
                .collect();
            let mut rec = vec![
                exp.to_string(),
                format!("{h:?}"),
                size.to_string(),
                in_row[0].report.trials.to_string(),
            ];
            for m in &methods {
                rec.push(
                    in_row
                        .iter()
                        .find(|c| c.report.method == *m)
                        .map(|c| c.report.rejection_rate.to_string())
                        .unwrap_or_default(),
                );
            }
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }
}
