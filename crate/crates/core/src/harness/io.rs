//! CSV input and output of series. Rows are time indices, columns dimensions.

use crate::error::{Error, Result};
use crate::series::TimeSeries;
use std::io::{Read, Write};
use std::path::Path;

/// Reads a rectangular numeric CSV file. Errors name the 1-based file line.
pub fn load_csv(path: impl AsRef<Path>, has_header: bool) -> Result<TimeSeries> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    read_csv(file, has_header)
}

pub fn read_csv(reader: impl Read, has_header: bool) -> Result<TimeSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut values = Vec::new();
    let mut dim = None;
    let mut record = csv::StringRecord::new();
    loop {
        let more = rdr.read_record(&mut record).map_err(|e| {
            let row = e.position().map(|p| p.line() as usize).unwrap_or(0);
            Error::Csv { row, message: e.to_string() }
        })?;
        if !more {
            break;
        }
        let row = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        match dim {
            None => dim = Some(record.len()),
            Some(d) if d != record.len() => {
                return Err(Error::Csv {
                    row,
                    message: format!("expected {d} columns, found {}", record.len()),
                })
            }
            _ => {}
        }
        for (c, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::Csv {
                row,
                message: format!("column {}: not a number: {cell:?}", c + 1),
            })?;
            if !v.is_finite() {
                return Err(Error::Csv {
                    row,
                    message: format!("column {}: non-finite value {cell:?}", c + 1),
                });
            }
            values.push(v);
        }
    }
    let dim = dim.ok_or(Error::Csv { row: 0, message: "no data rows".into() })?;
    TimeSeries::new(values, dim)
}

/// Writes one row per time index, values in shortest round-trip form.
pub fn write_csv(series: &TimeSeries, header: Option<&[String]>, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(e.to_string());
    if let Some(h) = header {
        w.write_record(h).map_err(csv_err)?;
    }
    for row in series.rows() {
        w.write_record(row.iter().map(|v| v.to_string())).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
