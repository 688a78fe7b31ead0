//! CSV ingestion, experiment runner and benchmark presets.

pub mod bench;
pub mod experiment;
pub mod io;

pub use bench::{run_benchmark, BenchOptions, BenchmarkResult, Preset};
pub use experiment::{
    evaluate, run_experiment, run_test, DataSource, ExperimentSpec, RejectionReport, TestConfig, TestKind,
    TestReport,
};
pub use io::{load_csv, read_csv, write_csv};
