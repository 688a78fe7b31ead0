//! Python module `tempest` (built as `libtempest_py`): the CSV-free face of the test harness.
//!
//! Series are passed as a list of floats (one scalar per time step) or a
//! list of rows; anything with a `tolist()` method (numpy arrays) works too.
//! Reports come back as plain dicts with the same keys as the CLI JSON.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use ::tempest::generators::{Generated, ProcessSpec};
use ::tempest::harness::{evaluate, run_benchmark, BenchOptions, Preset, TestConfig, TestKind};
use ::tempest::lag_hsic::LagRadius;
use ::tempest::{Bandwidth, KernelSpec, TimeSeries, Variant};

create_exception!(tempest, TempestError, PyException);

fn err(e: ::tempest::Error) -> PyErr {
    TempestError::new_err(format!("{}: {e}", e.code()))
}

fn bad(msg: impl Into<String>) -> PyErr {
    TempestError::new_err(format!("invalid_config: {}", msg.into()))
}

fn to_series(obj: &Bound<'_, PyAny>) -> PyResult<TimeSeries> {
    let obj = if obj.hasattr("tolist")? { obj.call_method0("tolist")? } else { obj.clone() };
    if let Ok(v) = obj.extract::<Vec<f64>>() {
        return TimeSeries::from_scalars(v).map_err(err);
    }
    let rows: Vec<Vec<f64>> = obj.extract()?;
    TimeSeries::from_rows(&rows).map_err(err)
}

fn from_series(py: Python<'_>, s: &TimeSeries) -> PyResult<Py<PyAny>> {
    if s.dim() == 1 {
        Ok(PyList::new(py, s.as_slice())?.into_any().unbind())
    } else {
        let rows: Vec<Vec<f64>> = s.rows().map(<[f64]>::to_vec).collect();
        Ok(PyList::new(py, rows)?.into_any().unbind())
    }
}

fn json_to_py(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn parse_variant(s: &str) -> PyResult<Variant> {
    match s {
        "vb1" => Ok(Variant::Vb1),
        "vb2" => Ok(Variant::Vb2),
        _ => Err(bad(format!("variant must be vb1 or vb2, got {s:?}"))),
    }
}

fn kernel_spec(kernel: &str, bandwidth: Option<f64>) -> PyResult<KernelSpec> {
    let mut spec = match kernel {
        "gaussian" => KernelSpec::gaussian(1.0),
        "laplacian" => KernelSpec::laplacian(1.0),
        _ => return Err(bad(format!("kernel must be gaussian or laplacian, got {kernel:?}"))),
    };
    spec.bandwidth = match bandwidth {
        None => Bandwidth::Median,
        Some(b) if b > 0.0 && b.is_finite() => Bandwidth::Fixed(b),
        Some(b) => return Err(bad(format!("bandwidth must be positive, got {b}"))),
    };
    Ok(spec)
}

#[allow(clippy::too_many_arguments)]
fn config(
    alpha: f64,
    block_size: f64,
    replicates: usize,
    variant: &str,
    kernel: &str,
    bandwidth: Option<f64>,
    factor6: bool,
    gpd: bool,
    lags: Option<usize>,
) -> PyResult<TestConfig> {
    let mut cfg = TestConfig {
        kernel: kernel_spec(kernel, bandwidth)?,
        alpha,
        permutations: replicates,
        gpd,
        lags: lags.map_or(LagRadius::Auto, LagRadius::Fixed),
        ..TestConfig::default()
    };
    cfg.bootstrap.block_length = block_size;
    cfg.bootstrap.replicates = replicates;
    cfg.bootstrap.variant = parse_variant(variant)?;
    cfg.bootstrap.degree_factor = factor6;
    Ok(cfg)
}

fn run(py: Python<'_>, x: &Bound<'_, PyAny>, y: &Bound<'_, PyAny>, test: TestKind, cfg: TestConfig, seed: u64) -> PyResult<Py<PyAny>> {
    let (x, y) = (to_series(x)?, to_series(y)?);
    let report = py.detach(|| evaluate(&x, &y, test, &cfg, seed)).map_err(err)?;
    json_to_py(py, &report.to_json())
}

/// Two-sample test. `method` is "wild" (two processes), "paired" or "permutation".
#[pyfunction]
#[pyo3(signature = (x, y, method="wild", alpha=0.05, block_size=20.0, replicates=300, variant="vb1",
    kernel="gaussian", bandwidth=None, seed=0))]
#[allow(clippy::too_many_arguments)]
fn mmd_test(
    py: Python<'_>,
    x: &Bound<'_, PyAny>,
    y: &Bound<'_, PyAny>,
    method: &str,
    alpha: f64,
    block_size: f64,
    replicates: usize,
    variant: &str,
    kernel: &str,
    bandwidth: Option<f64>,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let test = match method {
        "wild" => TestKind::MmdWild,
        "paired" => TestKind::MmdPaired,
        "permutation" => TestKind::MmdPermutation,
        _ => return Err(bad(format!("unknown mmd method {method:?}"))),
    };
    let cfg = config(alpha, block_size, replicates, variant, kernel, bandwidth, true, true, None)?;
    run(py, x, y, test, cfg, seed)
}

/// Instantaneous independence test. `method` is "wild" or "shift".
#[pyfunction]
#[pyo3(signature = (x, y, method="wild", alpha=0.05, block_size=20.0, replicates=300, variant="vb2",
    kernel="gaussian", bandwidth=None, seed=0, factor6=true))]
#[allow(clippy::too_many_arguments)]
fn hsic_test(
    py: Python<'_>,
    x: &Bound<'_, PyAny>,
    y: &Bound<'_, PyAny>,
    method: &str,
    alpha: f64,
    block_size: f64,
    replicates: usize,
    variant: &str,
    kernel: &str,
    bandwidth: Option<f64>,
    seed: u64,
    factor6: bool,
) -> PyResult<Py<PyAny>> {
    let test = match method {
        "wild" => TestKind::HsicWild,
        "shift" => TestKind::HsicShift,
        _ => return Err(bad(format!("unknown hsic method {method:?}"))),
    };
    let cfg = config(alpha, block_size, replicates, variant, kernel, bandwidth, factor6, true, None)?;
    run(py, x, y, test, cfg, seed)
}

/// Independence test across lags `-M..=M`; `lags=None` picks `M` from `n`.
#[pyfunction]
#[pyo3(signature = (x, y, lags=None, alpha=0.05, block_size=20.0, replicates=300, variant="vb2",
    kernel="gaussian", bandwidth=None, seed=0, factor6=true, gpd=true))]
#[allow(clippy::too_many_arguments)]
fn lag_hsic(
    py: Python<'_>,
    x: &Bound<'_, PyAny>,
    y: &Bound<'_, PyAny>,
    lags: Option<usize>,
    alpha: f64,
    block_size: f64,
    replicates: usize,
    variant: &str,
    kernel: &str,
    bandwidth: Option<f64>,
    seed: u64,
    factor6: bool,
    gpd: bool,
) -> PyResult<Py<PyAny>> {
    let cfg = config(alpha, block_size, replicates, variant, kernel, bandwidth, factor6, gpd, lags)?;
    run(py, x, y, TestKind::LagHsic, cfg, seed)
}

/// Draws `n` steps of a synthetic process.
///
/// `family` is a kebab-case process name ("vec-pair", "gibbs-normal", ...)
/// and the keyword arguments are its parameters. Single processes return a
/// series; pairs return a tuple `(x, y)`.
#[pyfunction]
#[pyo3(signature = (family, n, seed=0, **params))]
fn generate(py: Python<'_>, family: &str, n: usize, seed: u64, params: Option<&Bound<'_, PyDict>>) -> PyResult<Py<PyAny>> {
    let spec = PyDict::new(py);
    if let Some(p) = params {
        spec.update(p.as_mapping())?;
    }
    spec.set_item("family", family)?;
    let text: String = py.import("json")?.call_method1("dumps", (spec,))?.extract()?;
    let process: ProcessSpec = serde_json::from_str(&text).map_err(|e| bad(format!("process {family:?}: {e}")))?;
    match py.detach(|| process.generate(n, seed)).map_err(err)? {
        Generated::Single(s) => from_series(py, &s),
        Generated::Pair(z) => {
            let pair = (from_series(py, &z.x)?, from_series(py, &z.y)?);
            Ok(pair.into_pyobject(py)?.into_any().unbind())
        }
    }
}

/// Runs a benchmark preset and returns its JSON result as a dict.
#[pyfunction(name = "bench")]
#[pyo3(signature = (preset, trials=1, seed=0, full=false))]
fn run_bench(py: Python<'_>, preset: &str, trials: usize, seed: u64, full: bool) -> PyResult<Py<PyAny>> {
    let preset: Preset = preset.parse().map_err(err)?;
    let opts = BenchOptions { trials: Some(trials), seed, full, ..BenchOptions::default() };
    let result = py.detach(|| run_benchmark(preset, &opts)).map_err(err)?;
    json_to_py(py, &result.to_json())
}

#[pymodule(name = "tempest")]
fn tempest_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("TempestError", m.py().get_type::<TempestError>())?;
    m.add_function(wrap_pyfunction!(mmd_test, m)?)?;
    m.add_function(wrap_pyfunction!(hsic_test, m)?)?;
    m.add_function(wrap_pyfunction!(lag_hsic, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(run_bench, m)?)?;
    Ok(())
}
