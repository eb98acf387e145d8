//! CSV writers and the matching readers used to check emitted files.

use std::path::Path;

use lanpower_core::{PowerCurve, SeriesSample};

use crate::format::fmt_g;

pub const SERIES_HEADER: &str = "index,value";
pub const POWER_HEADER: &str = "family,n,a,variant,m,rejection_rate,mc_stderr,asymptotic_power,seed";

fn to_string(header: &str, rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header.split(',')).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii output")
}

pub fn series_csv(sample: &SeriesSample) -> String {
    to_string(
        SERIES_HEADER,
        sample.values.iter().enumerate().map(|(i, v)| vec![i.to_string(), fmt_g(*v)]),
    )
}

pub fn power_csv(curve: &PowerCurve) -> String {
    to_string(
        POWER_HEADER,
        curve.rows.iter().map(|r| {
            vec![
                r.family.to_string(),
                r.n.to_string(),
                fmt_g(r.a),
                r.variant.to_string(),
                r.m.to_string(),
                fmt_g(r.rejection_rate),
                fmt_g(r.mc_stderr),
                fmt_g(r.asymptotic_power),
                r.seed.to_string(),
            ]
        }),
    )
}

pub fn write_file(path: &Path, contents: &str) -> std::io::Result<()> {
    std::fs::write(path, contents.as_bytes())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerCsvRow {
    pub family: String,
    pub n: usize,
    pub a: f64,
    pub variant: String,
    pub m: usize,
    pub rejection_rate: f64,
    pub mc_stderr: f64,
    pub asymptotic_power: f64,
    pub seed: u64,
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("csv line {line}: {message}")]
pub struct CsvError {
    pub line: u64,
    pub message: String,
}

fn err(line: u64, message: impl Into<String>) -> CsvError {
    CsvError {
        line,
        message: message.into(),
    }
}

/// Records after a header that must equal `header`, rejecting CR line endings.
fn records(text: &str, header: &str, width: usize) -> Result<Vec<(u64, csv::StringRecord)>, CsvError> {
    if text.contains('\r') {
        return Err(err(0, "CR line ending"));
    }
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(text.as_bytes());
    let found = reader.headers().map_err(|e| err(1, e.to_string()))?;
    if found.iter().collect::<Vec<_>>().join(",") != header {
        return Err(err(1, format!("unexpected header {found:?}")));
    }
    reader
        .records()
        .map(|r| {
            let r = r.map_err(|e| err(0, e.to_string()))?;
            let line = r.position().map_or(0, |p| p.line());
            if r.len() != width {
                return Err(err(line, format!("expected {width} fields, got {}", r.len())));
            }
            Ok((line, r))
        })
        .collect()
}

fn field<T: std::str::FromStr>(line: u64, record: &csv::StringRecord, index: usize, name: &str) -> Result<T, CsvError> {
    let raw = &record[index];
    raw.parse().map_err(|_| err(line, format!("bad {name} '{raw}'")))
}

pub fn parse_series_csv(text: &str) -> Result<Vec<(usize, f64)>, CsvError> {
    records(text, SERIES_HEADER, 2)?
        .iter()
        .map(|(line, r)| Ok((field(*line, r, 0, "index")?, field(*line, r, 1, "value")?)))
        .collect()
}

pub fn parse_power_csv(text: &str) -> Result<Vec<PowerCsvRow>, CsvError> {
    records(text, POWER_HEADER, 9)?
        .iter()
        .map(|(line, r)| {
            let line = *line;
            Ok(PowerCsvRow {
                family: r[0].to_string(),
                n: field(line, r, 1, "n")?,
                a: field(line, r, 2, "a")?,
                variant: r[3].to_string(),
                m: field(line, r, 4, "m")?,
                rejection_rate: field(line, r, 5, "rejection_rate")?,
                mc_stderr: field(line, r, 6, "mc_stderr")?,
                asymptotic_power: field(line, r, 7, "asymptotic_power")?,
                seed: field(line, r, 8, "seed")?,
            })
        })
        .collect()
}
