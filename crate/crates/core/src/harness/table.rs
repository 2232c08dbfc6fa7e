//! CSV/JSON output for the auxiliary tables (variance studies, probes).

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use super::report::{fmt_f64, Format};
use crate::error::Result;

pub enum Cell {
    Text(String),
    Int(Option<usize>),
    Num(Option<f64>),
    /// Wall-clock milliseconds, printed with three decimals.
    Millis(f64),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(v) => v.map(|v| v.to_string()).unwrap_or_default(),
            Cell::Num(v) => v.map(fmt_f64).unwrap_or_default(),
            Cell::Millis(v) => format!("{v:.3}"),
        }
    }

    fn json(&self) -> Result<Box<RawValue>> {
        let text = match self {
            Cell::Text(s) => serde_json::to_string(s)?,
            Cell::Int(Some(v)) => v.to_string(),
            Cell::Num(Some(v)) if v.is_finite() => fmt_f64(*v),
            Cell::Millis(v) => format!("{v:.3}"),
            _ => "null".into(),
        };
        Ok(RawValue::from_string(text)?)
    }
}

/// A JSON object that keeps the header order.
struct Object(Vec<(&'static str, Box<RawValue>)>);

impl Serialize for Object {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_map(self.0.iter().map(|(k, v)| (k, v)))
    }
}

pub trait TableRow {
    fn header() -> &'static [&'static str];
    fn cells(&self) -> Vec<Cell>;
}

pub fn write_table<T: TableRow, W: Write>(rows: &[T], format: Format, mut out: W) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(T::header())?;
            for r in rows {
                w.write_record(r.cells().iter().map(Cell::csv))?;
            }
            w.flush()?;
        }
        Format::Json => {
            let objs = rows
                .iter()
                .map(|r| {
                    T::header()
                        .iter()
                        .zip(r.cells())
                        .map(|(k, c)| Ok((*k, c.json()?)))
                        .collect::<Result<Vec<_>>>()
                        .map(Object)
                })
                .collect::<Result<Vec<_>>>()?;
            serde_json::to_writer_pretty(&mut out, &objs)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

/// Writes the table to `path`, or to stdout when `path` is `None` or `-`.
pub fn emit_table<T: TableRow>(rows: &[T], format: Format, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) if p.as_os_str() != "-" => write_table(rows, format, BufWriter::new(File::create(p)?)),
        _ => write_table(rows, format, std::io::stdout().lock()),
    }
}
