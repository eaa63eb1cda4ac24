//! Machine-readable output: the scan CSV schema and the JSON documents
//! emitted by each subcommand.

use std::io::{Read, Write};

use lehmer_core::analysis::{ExponentFit, Family, ScanRecord};
use lehmer_core::counting::{CountReport, ParityReport, ProblemSpec};
use lehmer_core::Rational;
use serde::{Deserialize, Serialize};

use crate::scan::{Problem, Skipped};
use crate::{Error, Result};

pub const SCAN_CSV_HEADER: [&str; 8] = ["q", "family", "phi", "N", "main", "error", "abs_error", "seconds"];

/// `x` with 12 significant digits, in the style of C's `%.12g`.
pub fn fmt_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        format!("{}e{exp}", trim_zeros(mantissa))
    } else {
        trim_zeros(&format!("{:.*}", (DIGITS - 1 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_scan_csv<W: Write>(out: W, records: &[ScanRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SCAN_CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.q.to_string(),
            r.family.tag().to_string(),
            r.phi.to_string(),
            r.count.to_string(),
            fmt_sig(r.main),
            fmt_sig(r.error),
            fmt_sig(r.abs_error),
            fmt_sig(r.seconds),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn scan_csv_string(records: &[ScanRecord]) -> Result<String> {
    let mut buf = Vec::new();
    write_scan_csv(&mut buf, records)?;
    Ok(String::from_utf8(buf).expect("CSV output is UTF-8"))
}

/// Parse a scan CSV written by [`write_scan_csv`]. Sampled bound ratios are
/// not part of the CSV schema and come back as `None`.
pub fn read_scan_csv<R: Read>(input: R) -> Result<Vec<ScanRecord>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != SCAN_CSV_HEADER {
        return Err(Error::Invalid(format!(
            "unexpected scan CSV header: {}",
            header.join(",")
        )));
    }
    let mut records = Vec::new();
    for (line, row) in r.records().enumerate() {
        let row = row?;
        let bad = |col: &str| Error::Invalid(format!("scan CSV row {}: bad {col} value", line + 1));
        let int = |i: usize| row[i].parse::<u64>().map_err(|_| bad(SCAN_CSV_HEADER[i]));
        let float = |i: usize| row[i].parse::<f64>().map_err(|_| bad(SCAN_CSV_HEADER[i]));
        records.push(ScanRecord {
            q: int(0)?,
            family: Family::from_tag(&row[1]).ok_or_else(|| bad("family"))?,
            phi: int(2)?,
            count: int(3)?,
            main: float(4)?,
            error: float(5)?,
            abs_error: float(6)?,
            lemma_ratio_max: None,
            seconds: float(7)?,
        });
    }
    Ok(records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub seed: u64,
    pub version: String,
    /// Seconds; 0 when timing is disabled.
    pub wall_time: f64,
}

impl Meta {
    pub fn new(seed: u64, wall_time: f64) -> Self {
        Meta {
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_time,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountDoc {
    pub q: u64,
    #[serde(rename = "N")]
    pub count: u64,
    pub main: f64,
    pub main_exact: Rational,
    pub error: f64,
    pub abs_error: f64,
    pub normalized_exponent: Option<f64>,
    pub coprime: bool,
    pub oversized_progression: bool,
    pub spec: ProblemSpec,
    pub meta: Meta,
}

impl CountDoc {
    pub fn new(report: &CountReport, meta: Meta) -> Self {
        CountDoc {
            q: report.q,
            count: report.count,
            main: report.main_term.to_f64(),
            main_exact: report.main_term,
            error: report.error,
            abs_error: report.error.abs(),
            normalized_exponent: report.normalized_exponent,
            coprime: report.coprime,
            oversized_progression: report.oversized_progression,
            spec: report.spec.clone(),
            meta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityDoc {
    #[serde(flatten)]
    pub report: ParityReport,
    pub meta: Meta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpSumDoc {
    pub q: u64,
    pub k: Vec<i64>,
    /// Coefficients reduced to the symmetric range.
    pub lambda: Vec<i64>,
    pub gcd_class: Option<u64>,
    pub terms: u64,
    pub direct: ComplexValue,
    pub crt: Option<ComplexValue>,
    pub lemma_ratio: Option<f64>,
    pub meta: Meta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanDoc {
    pub problem: Problem,
    pub family: Family,
    pub q_min: u64,
    pub q_max: u64,
    pub records: Vec<ScanRecord>,
    pub skipped: Vec<Skipped>,
    pub meta: Meta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDoc {
    pub fit: ExponentFit,
    pub records: usize,
    pub meta: Meta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckDoc {
    pub checks: Vec<CheckLine>,
    pub meta: Meta,
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)?)
}
