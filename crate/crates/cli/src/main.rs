//! `tempest`: wild-bootstrap kernel tests on CSV series, synthetic data
//! generation and benchmark presets.
//!
//! Every flag can also be set through a `TEMPEST_*` environment variable;
//! an explicit flag wins over the environment, which wins over the default.

mod args;

use args::{Cli, Command, CommonArgs, Format};
use clap::Parser;
use std::io::Write;
use std::process::ExitCode;
use tempest::generators::Generated;
use tempest::harness::{
    run_benchmark, run_experiment, run_test, write_csv, BenchmarkResult, DataSource, ExperimentSpec,
    RejectionReport, TestKind, TestReport,
};
use tempest::{Error, Result, Variant};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes());
            ExitCode::SUCCESS
        }
        Err(e) => {
            let body = serde_json::json!({ "error": { "code": e.code(), "message": e.to_string() } });
            eprintln!("{body}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::MmdTest(a) => {
            let test = match a.method {
                args::MmdMethod::Wild => TestKind::MmdWild,
                args::MmdMethod::Paired => TestKind::MmdPaired,
                args::MmdMethod::Permutation => TestKind::MmdPermutation,
            };
            run_file_test(test, &a.data, &a.common, Variant::Vb1)
        }
        Command::HsicTest(a) => {
            let test = match a.method {
                args::HsicMethod::Wild => TestKind::HsicWild,
                args::HsicMethod::Shift => TestKind::HsicShift,
            };
            run_file_test(test, &a.data, &a.common, Variant::Vb2)
        }
        Command::LagHsic(a) => run_file_test(TestKind::LagHsic, &a.data, &a.common, Variant::Vb2),
        Command::Generate(a) => generate(&a),
        Command::Bench(a) => bench(&a),
    }
}

fn run_file_test(test: TestKind, data: &args::DataArgs, common: &CommonArgs, variant: Variant) -> Result<String> {
    let spec = ExperimentSpec {
        name: test.name().to_string(),
        source: DataSource::Files {
            x: data.x.clone(),
            y: data.y.clone(),
            has_header: data.header,
        },
        test,
        trials: common.trials.unwrap_or(1),
        config: common.test_config(variant)?,
        seed: common.seed.unwrap_or(0),
    };
    let format = common.format.unwrap_or(Format::Json);
    if spec.trials == 1 {
        let report = run_test(&spec)?;
        Ok(match format {
            Format::Json => report.to_json() + "\n",
            Format::Csv => report_csv(&report),
        })
    } else {
        let report = run_experiment(&spec, false)?;
        Ok(match format {
            Format::Json => serde_json::to_string_pretty(&report).expect("plain data") + "\n",
            Format::Csv => rejection_csv(&report),
        })
    }
}

fn report_csv(r: &TestReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    w.write_record([
        "method", "statistic", "threshold", "p_value", "reject", "alpha", "n", "B", "l_n", "seed",
        "factor_applied", "notes",
    ])
    .expect("in-memory write");
    w.write_record([
        r.method.clone(),
        r.statistic.to_string(),
        r.threshold.to_string(),
        r.p_value.to_string(),
        r.reject.to_string(),
        r.alpha.to_string(),
        r.n.to_string(),
        r.replicates.to_string(),
        opt(r.l_n),
        r.seed.to_string(),
        r.factor_applied.to_string(),
        r.notes.join(";"),
    ])
    .expect("in-memory write");
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn rejection_csv(r: &RejectionReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["trial", "seed", "statistic", "threshold", "p_value", "reject"])
        .expect("in-memory write");
    for t in &r.records {
        w.write_record([
            t.trial.to_string(),
            t.seed.to_string(),
            t.statistic.to_string(),
            t.threshold.to_string(),
            t.p_value.to_string(),
            t.reject.to_string(),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn generate(a: &args::GenerateArgs) -> Result<String> {
    let process = a.process_spec()?;
    let data = process.generate(a.n, a.seed.unwrap_or(0))?;
    let series = match data {
        Generated::Single(s) => s,
        Generated::Pair(z) => {
            let mut values = Vec::with_capacity(z.len() * (z.x.dim() + z.y.dim()));
            for (xr, yr) in z.x.rows().zip(z.y.rows()) {
                values.extend_from_slice(xr);
                values.extend_from_slice(yr);
            }
            tempest::TimeSeries::new(values, z.x.dim() + z.y.dim())?
        }
    };
    let header: Option<Vec<String>> = a
        .header
        .then(|| (0..series.dim()).map(|c| format!("v{}", c + 1)).collect());
    let mut buf = Vec::new();
    write_csv(&series, header.as_deref(), &mut buf)?;
    match &a.out {
        Some(path) => {
            std::fs::write(path, &buf).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            Ok(String::new())
        }
        None => Ok(String::from_utf8(buf).expect("utf-8")),
    }
}

fn bench(a: &args::BenchArgs) -> Result<String> {
    let opts = a.options()?;
    let result = run_benchmark(a.preset, &opts)?;
    let render = |r: &BenchmarkResult, f: Format| match f {
        Format::Json => r.to_json() + "\n",
        Format::Csv if a.wide => r.to_wide_csv(),
        Format::Csv => r.to_csv(),
    };
    match &a.out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for (f, ext) in [(Format::Csv, "csv"), (Format::Json, "json")] {
                let path = dir.join(format!("{}.{ext}", result.preset));
                std::fs::write(&path, render(&result, f))
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            }
            Ok(String::new())
        }
        None => Ok(render(&result, a.common.format.unwrap_or(Format::Json))),
    }
}
