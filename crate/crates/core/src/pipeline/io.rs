//! CSV and JSON persistence.
//!
//! Sample CSV: header `z1,z2`, LF line endings, floats in shortest
//! round-trip form so a write/read cycle reproduces every bit.

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::diagnostics::{DensityEstimate, DetectionReport, DiagnosticSeries};
use crate::error::{HrvError, Result};
use crate::generators::{Pair, SampleBatch};

pub fn format_f64(x: f64) -> String {
    let mut buf = ryu::Buffer::new();
    buf.format(x).to_string()
}

pub fn write_batch_csv<W: Write>(batch: &SampleBatch, out: W) -> Result<()> {
    let mut w = BufWriter::new(out);
    w.write_all(b"z1,z2\n")?;
    let mut a = ryu::Buffer::new();
    let mut b = ryu::Buffer::new();
    for &(z1, z2) in &batch.pairs {
        w.write_all(a.format(z1).as_bytes())?;
        w.write_all(b",")?;
        w.write_all(b.format(z2).as_bytes())?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_batch_csv_file(batch: &SampleBatch, path: &Path) -> Result<()> {
    let f = fs::File::create(path).map_err(|e| {
        HrvError::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    write_batch_csv(batch, f)
}

/// Reads a two-column numeric CSV with a header row. Errors cite the file line.
pub fn read_batch_csv<R: Read>(input: R) -> Result<SampleBatch> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(input);
    let headers = reader.headers().map_err(|e| csv_error(e, 1))?.clone();
    if headers.len() != 2 {
        return Err(HrvError::Parse {
            line: 1,
            message: format!("expected a header with 2 columns, found {}", headers.len()),
        });
    }
    let mut pairs: Vec<Pair> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(e, pairs.len() + 2))?;
        let line = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or(pairs.len() + 2);
        if record.len() != 2 {
            return Err(HrvError::Parse {
                line,
                message: format!("row {line}: expected 2 fields, found {}", record.len()),
            });
        }
        let field = |i: usize| -> Result<f64> {
            let raw = record[i].trim();
            raw.parse::<f64>().map_err(|_| HrvError::Parse {
                line,
                message: format!("row {line}: column {} is not a number: {raw:?}", i + 1),
            })
        };
        let (z1, z2) = (field(0)?, field(1)?);
        if !(z1 >= 0.0 && z2 >= 0.0 && z1.is_finite() && z2.is_finite()) {
            return Err(HrvError::Domain(format!(
                "row {line}: values must be finite and nonnegative, got ({z1}, {z2})"
            )));
        }
        pairs.push((z1, z2));
    }
    SampleBatch::from_pairs(pairs)
}

pub fn read_batch_csv_file(path: &Path) -> Result<SampleBatch> {
    let f = fs::File::open(path).map_err(|e| {
        HrvError::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })?;
    read_batch_csv(f)
}

fn csv_error(e: csv::Error, fallback_line: usize) -> HrvError {
    let line = e
        .position()
        .map(|p| p.line() as usize)
        .unwrap_or(fallback_line);
    HrvError::Parse {
        line,
        message: format!("row {line}: {e}"),
    }
}

pub fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Writes `report.json` plus one CSV per series, QQ set and density into `dir`.
pub fn write_report_dir(report: &DetectionReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_json(report, &dir.join("report.json"))?;
    for (label, s) in &report.series {
        write_series_csv(s, &dir.join(format!("series_{label}.csv")))?;
    }
    for (label, pts) in &report.qq {
        write_xy_csv(
            "theoretical,empirical",
            pts.iter().copied(),
            &dir.join(format!("qq_{label}.csv")),
        )?;
    }
    for (label, d) in &report.densities {
        write_density_csv(d, &dir.join(format!("density_{label}.csv")))?;
    }
    Ok(())
}

pub fn read_report(path: &Path) -> Result<DetectionReport> {
    let text = fs::read_to_string(path)?;
    let report: DetectionReport = serde_json::from_str(&text)?;
    report.finalize()
}

fn write_series_csv(s: &DiagnosticSeries, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "k,value")?;
    for &(k, v) in &s.points {
        if v.is_finite() {
            writeln!(w, "{k},{}", format_f64(v))?;
        } else {
            writeln!(w, "{k},")?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_density_csv(d: &DensityEstimate, path: &Path) -> Result<()> {
    write_xy_csv(
        "x,density",
        d.grid.iter().copied().zip(d.density.iter().copied()),
        path,
    )
}

fn write_xy_csv(header: &str, rows: impl Iterator<Item = (f64, f64)>, path: &Path) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    writeln!(w, "{header}")?;
    for (x, y) in rows {
        writeln!(w, "{},{}", format_f64(x), format_f64(y))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_only() {
        let batch = SampleBatch::from_pairs(vec![]).unwrap();
        let mut buf = Vec::new();
        write_batch_csv(&batch, &mut buf).unwrap();
        assert_eq!(buf, b"z1,z2\n");
        assert!(read_batch_csv(&buf[..]).unwrap().is_empty());
    }

    #[test]
    fn text_cell_cites_line() {
        let mut text = String::from("z1,z2\n");
        for i in 0..10 {
            text.push_str(&format!("{i}.5,2\n"));
        }
        text.push_str("3,abc\n");
        match read_batch_csv(text.as_bytes()) {
            Err(HrvError::Parse { line, message }) => {
                assert_eq!(line, 12);
                assert!(message.contains("12"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_is_domain_error() {
        let text = "z1,z2\n1,2\n-1,3\n";
        assert!(matches!(
            read_batch_csv(text.as_bytes()),
            Err(HrvError::Domain(_))
        ));
    }

    #[test]
    fn quoted_fields_are_accepted() {
        let text = "\"z1\",\"z2\"\n\"1.5\",\"2\"\n";
        let b = read_batch_csv(text.as_bytes()).unwrap();
        assert_eq!(b.pairs, vec![(1.5, 2.0)]);
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_exact(pairs in prop::collection::vec((0.0f64..1e300, 0.0f64..1e-3), 0..50)) {
            let batch = SampleBatch::from_pairs(pairs).unwrap();
            let mut buf = Vec::new();
            write_batch_csv(&batch, &mut buf).unwrap();
            let back = read_batch_csv(&buf[..]).unwrap();
            prop_assert_eq!(back.pairs, batch.pairs);
        }
    }
}
