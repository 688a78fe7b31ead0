use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeMap;
use std::path::PathBuf;
use tempest::generators::{OscillatorParams, PitchParams, ProcessSpec, GIBBS_COV, GIBBS_MEAN};
use tempest::harness::{BenchOptions, Preset, TestConfig};
use tempest::lag_hsic::LagRadius;
use tempest::{Error, KernelSpec, Result, Variant};

#[derive(Debug, Parser)]
#[command(name = "tempest", version, about = "Wild-bootstrap kernel tests for time series")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Two-sample MMD test on two CSV series.
    MmdTest(MmdArgs),
    /// Instantaneous HSIC independence test on two paired CSV series.
    HsicTest(HsicArgs),
    /// Multi-lag HSIC independence test on two paired CSV series.
    LagHsic(LagArgs),
    /// Write a synthetic series as CSV.
    Generate(GenerateArgs),
    /// Run a benchmark preset and report rejection rates.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VariantArg {
    Vb1,
    Vb2,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KernelArg {
    Gaussian,
    Laplacian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthArg {
    Median,
    Fixed(f64),
}

fn parse_bandwidth(s: &str) -> std::result::Result<BandwidthArg, String> {
    if s == "median" {
        return Ok(BandwidthArg::Median);
    }
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(BandwidthArg::Fixed(v)),
        _ => Err(format!("expected a positive number or 'median', got {s:?}")),
    }
}

fn parse_lags(s: &str) -> std::result::Result<LagRadius, String> {
    if s == "auto" {
        return Ok(LagRadius::Auto);
    }
    s.parse::<usize>()
        .map(LagRadius::Fixed)
        .map_err(|_| format!("expected a non-negative integer or 'auto', got {s:?}"))
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Test level [default: 0.05]
    #[arg(long, env = "TEMPEST_ALPHA")]
    pub alpha: Option<f64>,
    /// Wild-bootstrap block length l_n [default: 20]
    #[arg(long, env = "TEMPEST_BLOCK_SIZE")]
    pub block_size: Option<f64>,
    /// Bootstrap replicates / permutations B [default: 300]
    #[arg(long, env = "TEMPEST_REPLICATES")]
    pub replicates: Option<usize>,
    /// Bootstrap variant [default: vb1 for mmd-test, vb2 for hsic-test and lag-hsic]
    #[arg(long, value_enum, env = "TEMPEST_VARIANT")]
    pub variant: Option<VariantArg>,
    /// Kernel family [default: gaussian]
    #[arg(long, value_enum, env = "TEMPEST_KERNEL")]
    pub kernel: Option<KernelArg>,
    /// Kernel bandwidth: a positive number or `median` [default: median]
    #[arg(long, value_parser = parse_bandwidth, env = "TEMPEST_BANDWIDTH")]
    pub bandwidth: Option<BandwidthArg>,
    /// Seed of all random streams [default: 0]
    #[arg(long, env = "TEMPEST_SEED")]
    pub seed: Option<u64>,
    /// Multiply HSIC bootstrap samples by 6 [default: on]
    #[arg(long, value_enum, env = "TEMPEST_FACTOR6")]
    pub factor6: Option<Switch>,
    /// GPD tail fit for the lag-HSIC threshold [default: on]
    #[arg(long, value_enum, env = "TEMPEST_GPD")]
    pub gpd: Option<Switch>,
    /// Lag radius M: an integer or `auto` = max(10, ceil(ln n)) [default: auto]
    #[arg(long, value_parser = parse_lags, env = "TEMPEST_LAGS")]
    pub lags: Option<LagRadius>,
    /// Monte Carlo trials [default: 1, 200 for bench]
    #[arg(long, env = "TEMPEST_TRIALS")]
    pub trials: Option<usize>,
    /// Output format [default: json]
    #[arg(long, value_enum, env = "TEMPEST_FORMAT")]
    pub format: Option<Format>,
}

impl CommonArgs {
    fn variant(&self) -> Option<Variant> {
        self.variant.map(|v| match v {
            VariantArg::Vb1 => Variant::Vb1,
            VariantArg::Vb2 => Variant::Vb2,
        })
    }

    fn kernel_spec(&self) -> Option<KernelSpec> {
        if self.kernel.is_none() && self.bandwidth.is_none() {
            return None;
        }
        let bw = self.bandwidth.unwrap_or(BandwidthArg::Median);
        let mut spec = match self.kernel.unwrap_or(KernelArg::Gaussian) {
            KernelArg::Gaussian => KernelSpec::gaussian(1.0),
            KernelArg::Laplacian => KernelSpec::laplacian(1.0),
        };
        spec.bandwidth = match bw {
            BandwidthArg::Median => tempest::Bandwidth::Median,
            BandwidthArg::Fixed(v) => tempest::Bandwidth::Fixed(v),
        };
        Some(spec)
    }

    fn check(&self) -> Result<()> {
        if let Some(t) = self.trials {
            if t == 0 {
                return Err(Error::InvalidConfig("--trials must be >= 1".into()));
            }
        }
        Ok(())
    }

    pub fn test_config(&self, default_variant: Variant) -> Result<TestConfig> {
        self.check()?;
        let mut cfg = TestConfig::default();
        cfg.bootstrap.variant = default_variant;
        let opts = self.overrides();
        let BenchOptions {
            alpha,
            block_length,
            replicates,
            variant,
            kernel,
            degree_factor,
            gpd,
            lags,
            ..
        } = opts;
        cfg.alpha = alpha.unwrap_or(cfg.alpha);
        cfg.bootstrap.block_length = block_length.unwrap_or(cfg.bootstrap.block_length);
        if let Some(b) = replicates {
            cfg.bootstrap.replicates = b;
            cfg.permutations = b;
        }
        cfg.bootstrap.variant = variant.unwrap_or(cfg.bootstrap.variant);
        cfg.kernel = kernel.unwrap_or(cfg.kernel);
        cfg.bootstrap.degree_factor = degree_factor.unwrap_or(cfg.bootstrap.degree_factor);
        cfg.gpd = gpd.unwrap_or(cfg.gpd);
        cfg.lags = lags.unwrap_or(cfg.lags);
        Ok(cfg)
    }

    pub fn overrides(&self) -> BenchOptions {
        BenchOptions {
            trials: self.trials,
            seed: self.seed.unwrap_or(0),
            alpha: self.alpha,
            block_length: self.block_size,
            replicates: self.replicates,
            variant: self.variant(),
            kernel: self.kernel_spec(),
            degree_factor: self.factor6.map(|s| s == Switch::On),
            gpd: self.gpd.map(|s| s == Switch::On),
            lags: self.lags,
            ..BenchOptions::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// CSV file with the X series (row = time, column = dimension)
    #[arg(long)]
    pub x: PathBuf,
    /// CSV file with the Y series
    #[arg(long)]
    pub y: PathBuf,
    /// Skip the first row of both files
    #[arg(long, env = "TEMPEST_HEADER")]
    pub header: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MmdMethod {
    /// Two-process wild bootstrap; sample sizes may differ
    Wild,
    /// Single-process wild bootstrap on pairs (X_t, Y_t)
    Paired,
    /// Permutation baseline (ignores dependence)
    Permutation,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum HsicMethod {
    Wild,
    /// Circular-shift baseline
    Shift,
}

#[derive(Debug, Args)]
pub struct MmdArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value = "wild")]
    pub method: MmdMethod,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct HsicArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, default_value = "wild")]
    pub method: HsicMethod,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct LagArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ProcessArg {
    GibbsNormal,
    IidNormal,
    PitchSound,
    ExtinctGaussian,
    VecPair,
    Oscillator,
    WhiteNoise,
    Ar1Pair,
}

fn parse_param(s: &str) -> std::result::Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected key=value, got {s:?}"))?;
    let v: f64 = v.parse().map_err(|_| format!("not a number in {s:?}"))?;
    Ok((k.to_string(), v))
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub process: ProcessArg,
    /// Length (periods for pitch-sound)
    #[arg(long)]
    pub n: usize,
    #[arg(long, env = "TEMPEST_SEED")]
    pub seed: Option<u64>,
    /// Process parameter, e.g. `--param coupling=0.3`; repeatable
    #[arg(long = "param", value_parser = parse_param)]
    pub params: Vec<(String, f64)>,
    /// Write a header row
    #[arg(long)]
    pub header: bool,
    /// Output file [default: stdout]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl GenerateArgs {
    pub fn process_spec(&self) -> Result<ProcessSpec> {
        let mut p: BTreeMap<&str, f64> = self.params.iter().map(|(k, v)| (k.as_str(), *v)).collect();
        let mut take = |key: &str, default: f64| p.remove(key).unwrap_or(default);
        let as_count = |v: f64, key: &str| -> Result<usize> {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::InvalidConfig(format!("{key} must be a non-negative integer")))
            }
        };
        let spec = match self.process {
            ProcessArg::GibbsNormal | ProcessArg::IidNormal => {
                let mean = [take("mean1", GIBBS_MEAN[0]), take("mean2", GIBBS_MEAN[1])];
                let c12 = take("c12", GIBBS_COV[0][1]);
                let cov = [[take("c11", GIBBS_COV[0][0]), c12], [c12, take("c22", GIBBS_COV[1][1])]];
                match self.process {
                    ProcessArg::GibbsNormal => ProcessSpec::GibbsNormal {
                        mean,
                        cov,
                        thin: as_count(take("thin", 1.0), "thin")?,
                    },
                    _ => ProcessSpec::IidNormal { mean, cov },
                }
            }
            ProcessArg::PitchSound => {
                let d = PitchParams::default();
                ProcessSpec::PitchSound(PitchParams {
                    d: as_count(take("d", d.d as f64), "d")?,
                    sigma_frac: take("sigma_frac", d.sigma_frac),
                    lambda: take("lambda", d.lambda),
                    j_max: as_count(take("j_max", d.j_max as f64), "j_max")?,
                })
            }
            ProcessArg::ExtinctGaussian => ProcessSpec::ExtinctGaussianPair {
                ar: take("ar", 0.5),
                radius: take("radius", 1.0),
            },
            ProcessArg::VecPair => ProcessSpec::VecPair {
                coupling: take("coupling", 0.45),
            },
            ProcessArg::Oscillator => {
                let d = OscillatorParams::default();
                ProcessSpec::OscillatorPair(OscillatorParams {
                    coupling: take("c", d.coupling),
                    f1: take("f1", d.f1),
                    f2: take("f2", d.f2),
                    ts: take("ts", d.ts),
                })
            }
            ProcessArg::WhiteNoise => ProcessSpec::WhiteNoisePair,
            ProcessArg::Ar1Pair => ProcessSpec::Ar1Pair { ar: take("ar", 0.5) },
        };
        if let Some(k) = p.keys().next() {
            return Err(Error::InvalidConfig(format!("unknown parameter {k:?} for this process")));
        }
        Ok(spec)
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// table1-mcmc, table1-audio, fig1-extinct, fig2-vec or fig2-osc
    #[arg(long, value_parser = |s: &str| s.parse::<Preset>().map_err(|e| e.to_string()))]
    pub preset: Preset,
    /// Add the largest sample sizes to each preset
    #[arg(long)]
    pub full: bool,
    /// CSV with one column per method instead of one row per method
    #[arg(long)]
    pub wide: bool,
    /// Include wall time (makes output non-reproducible)
    #[arg(long)]
    pub timing: bool,
    /// Write <preset>.csv and <preset>.json here instead of printing
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonArgs,
}

impl BenchArgs {
    pub fn options(&self) -> Result<BenchOptions> {
        self.common.check()?;
        Ok(BenchOptions {
            full: self.full,
            timing: self.timing,
            ..self.common.overrides()
        })
    }
}
