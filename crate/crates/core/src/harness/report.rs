//! Report rows and their CSV/JSON serialization.
//!
//! Floats are written with `{:.16e}` (17 significant digits), so parsing a
//! report back reproduces every value bit for bit.

use std::cmp::Ordering;
use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 9] = [
    "monomial",
    "N",
    "M",
    "estimator",
    "value_re",
    "value_im",
    "stderr",
    "abs_error_vs_limit",
    "runtime_ms",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Estimator {
    Limit,
    Exact,
    ExactSampled,
    Mc,
    /// The row could not be computed; see [`ReportRow::error`].
    Error,
}

impl Estimator {
    pub fn is_stochastic(self) -> bool {
        matches!(self, Estimator::ExactSampled | Estimator::Mc)
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Estimator::Limit => "limit",
            Estimator::Exact => "exact",
            Estimator::ExactSampled => "exact-sampled",
            Estimator::Mc => "mc",
            Estimator::Error => "error",
        })
    }
}

impl FromStr for Estimator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "limit" => Estimator::Limit,
            "exact" => Estimator::Exact,
            "exact-sampled" => Estimator::ExactSampled,
            "mc" => Estimator::Mc,
            "error" => Estimator::Error,
            _ => return Err(Error::Report(format!("unknown estimator {s:?}"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub monomial: String,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub estimator: Estimator,
    pub value: Complex64,
    pub stderr: Option<f64>,
    pub abs_error_vs_limit: Option<f64>,
    pub runtime_ms: f64,
    /// `num/den` when the value is an exact rational.
    pub exact: Option<String>,
    /// Failure message of an error row.
    pub error: Option<String>,
}

impl ReportRow {
    pub fn new(monomial: impl Into<String>, n: Option<usize>, m: Option<usize>, estimator: Estimator) -> Self {
        ReportRow {
            monomial: monomial.into(),
            n,
            m,
            estimator,
            value: Complex64::new(0.0, 0.0),
            stderr: None,
            abs_error_vs_limit: None,
            runtime_ms: 0.0,
            exact: None,
            error: None,
        }
    }

    pub fn failed(monomial: impl Into<String>, n: Option<usize>, m: Option<usize>, err: &Error) -> Self {
        let mut row = ReportRow::new(monomial, n, m, Estimator::Error);
        row.value = Complex64::new(f64::NAN, f64::NAN);
        row.error = Some(err.to_string());
        row
    }

    fn key_cmp(&self, other: &Self) -> Ordering {
        (&self.monomial, self.n, self.estimator, self.m).cmp(&(&other.monomial, other.n, other.estimator, other.m))
    }
}

/// Sorts rows by `(monomial, N)`, then by estimator, so reports never
/// depend on the order rows were computed in.
pub fn sort_rows(rows: &mut [ReportRow]) {
    rows.sort_by(ReportRow::key_cmp);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::validation(format!("unknown format {s:?}; expected csv or json"))),
        }
    }
}

pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn opt_f64(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn fields(row: &ReportRow) -> [String; 9] {
    [
        row.monomial.clone(),
        opt(&row.n),
        opt(&row.m),
        row.estimator.to_string(),
        fmt_f64(row.value.re),
        fmt_f64(row.value.im),
        opt_f64(row.stderr),
        opt_f64(row.abs_error_vs_limit),
        format!("{:.3}", row.runtime_ms),
    ]
}

pub fn write_csv<W: Write>(rows: &[ReportRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.write_record(fields(row))?;
    }
    w.flush()?;
    Ok(())
}

fn raw(text: String) -> Result<Box<RawValue>> {
    Ok(RawValue::from_string(text)?)
}

fn raw_f64(x: f64) -> Result<Box<RawValue>> {
    if x.is_finite() {
        raw(fmt_f64(x))
    } else {
        raw("null".into())
    }
}

fn raw_opt(x: Option<f64>) -> Result<Box<RawValue>> {
    x.map_or_else(|| raw("null".into()), raw_f64)
}

#[derive(Serialize)]
struct JsonOut<'a> {
    monomial: &'a str,
    #[serde(rename = "N")]
    n: Option<usize>,
    #[serde(rename = "M")]
    m: Option<usize>,
    estimator: String,
    value_re: Box<RawValue>,
    value_im: Box<RawValue>,
    stderr: Box<RawValue>,
    abs_error_vs_limit: Box<RawValue>,
    runtime_ms: Box<RawValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    exact: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
}

pub fn write_json<W: Write>(rows: &[ReportRow], mut out: W) -> Result<()> {
    let values = rows
        .iter()
        .map(|row| {
            Ok(JsonOut {
                monomial: &row.monomial,
                n: row.n,
                m: row.m,
                estimator: row.estimator.to_string(),
                value_re: raw_f64(row.value.re)?,
                value_im: raw_f64(row.value.im)?,
                stderr: raw_opt(row.stderr)?,
                abs_error_vs_limit: raw_opt(row.abs_error_vs_limit)?,
                runtime_ms: raw(format!("{:.3}", row.runtime_ms))?,
                exact: row.exact.as_deref(),
                error: row.error.as_deref(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    serde_json::to_writer_pretty(&mut out, &values)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Writes the rows to `path`, or to stdout when `path` is `None` or `-`.
pub fn emit_report(rows: &[ReportRow], format: Format, path: Option<&Path>) -> Result<()> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            let f = BufWriter::new(File::create(p)?);
            write_rows(rows, format, f)
        }
        _ => write_rows(rows, format, std::io::stdout().lock()),
    }
}

pub fn write_rows<W: Write>(rows: &[ReportRow], format: Format, out: W) -> Result<()> {
    match format {
        Format::Csv => write_csv(rows, out),
        Format::Json => write_json(rows, out),
    }
}

fn parse_opt<T: FromStr>(s: &str, what: &str) -> Result<Option<T>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| Error::Report(format!("bad {what} field {s:?}")))
}

/// Reads a CSV report back into rows.
pub fn read_csv<R: Read>(input: R) -> Result<Vec<ReportRow>> {
    let mut r = csv::Reader::from_reader(input);
    if r.headers()?.iter().ne(CSV_HEADER) {
        return Err(Error::Report("unexpected CSV header".into()));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let f = |i: usize| rec.get(i).unwrap_or("");
        let mut row = ReportRow::new(f(0), parse_opt(f(1), "N")?, parse_opt(f(2), "M")?, f(3).parse()?);
        row.value = Complex64::new(
            parse_opt(f(4), "value_re")?.unwrap_or(f64::NAN),
            parse_opt(f(5), "value_im")?.unwrap_or(f64::NAN),
        );
        row.stderr = parse_opt(f(6), "stderr")?;
        row.abs_error_vs_limit = parse_opt(f(7), "abs_error_vs_limit")?;
        row.runtime_ms = parse_opt(f(8), "runtime_ms")?.unwrap_or(0.0);
        rows.push(row);
    }
    Ok(rows)
}

#[derive(Deserialize)]
struct JsonRow {
    monomial: String,
    #[serde(rename = "N")]
    n: Option<usize>,
    #[serde(rename = "M")]
    m: Option<usize>,
    estimator: String,
    value_re: Option<f64>,
    value_im: Option<f64>,
    stderr: Option<f64>,
    abs_error_vs_limit: Option<f64>,
    runtime_ms: f64,
    exact: Option<String>,
    error: Option<String>,
}

/// Reads a JSON report back into rows.
pub fn read_json<R: Read>(input: R) -> Result<Vec<ReportRow>> {
    let raw: Vec<JsonRow> = serde_json::from_reader(input)?;
    raw.into_iter()
        .map(|j| {
            let mut row = ReportRow::new(j.monomial, j.n, j.m, j.estimator.parse()?);
            row.value = Complex64::new(j.value_re.unwrap_or(f64::NAN), j.value_im.unwrap_or(f64::NAN));
            row.stderr = j.stderr;
            row.abs_error_vs_limit = j.abs_error_vs_limit;
            row.runtime_ms = j.runtime_ms;
            row.exact = j.exact;
            row.error = j.error;
            Ok(row)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_row() -> ReportRow {
        let mut row = ReportRow::new("W1 U[g1] W1 U[g1^-1]", Some(4), Some(4), Estimator::Exact);
        row.value = Complex64::new(1.5, -0.0);
        row.abs_error_vs_limit = Some(0.5);
        row.exact = Some("3/2".into());
        row.runtime_ms = 1.25;
        row
    }

    #[test]
    fn empty_csv_is_header_only() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "monomial,N,M,estimator,value_re,value_im,stderr,abs_error_vs_limit,runtime_ms\n"
        );
    }

    #[test]
    fn json_round_trip() {
        let mut row = sample_row();
        row.value = Complex64::new(0.1 + 0.2, 1.0 / 3.0);
        row.stderr = Some(1e-300);
        let mut buf = Vec::new();
        write_json(std::slice::from_ref(&row), &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.contains("\"exact\": \"3/2\""));
        let back = read_json(buf.as_slice()).unwrap();
        assert_eq!(back, vec![row]);
    }

    #[test]
    fn csv_round_trip() {
        let mut a = sample_row();
        a.value = Complex64::new(std::f64::consts::PI, f64::MIN_POSITIVE);
        let mut b = ReportRow::new("U[g1]", None, None, Estimator::Mc);
        b.stderr = Some(0.1);
        let rows = vec![a, b];
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let back = read_csv(buf.as_slice()).unwrap();
        for (x, y) in rows.iter().zip(&back) {
            assert_eq!(x.value, y.value);
            assert_eq!(x.stderr, y.stderr);
            assert_eq!((x.n, x.m, x.estimator), (y.n, y.m, y.estimator));
        }
    }

    #[test]
    fn sorting_groups_by_monomial_then_size() {
        let mut rows = vec![
            ReportRow::new("b", Some(2), None, Estimator::Exact),
            ReportRow::new("a", Some(4), None, Estimator::Mc),
            ReportRow::new("a", Some(4), None, Estimator::Limit),
            ReportRow::new("a", Some(2), None, Estimator::Exact),
        ];
        sort_rows(&mut rows);
        let keys: Vec<_> = rows.iter().map(|r| (r.monomial.as_str(), r.n, r.estimator)).collect();
        assert_eq!(
            keys,
            vec![
                ("a", Some(2), Estimator::Exact),
                ("a", Some(4), Estimator::Limit),
                ("a", Some(4), Estimator::Mc),
                ("b", Some(2), Estimator::Exact)
            ]
        );
    }
}
