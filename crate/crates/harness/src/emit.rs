//! CSV, markdown and JSON renderings of result rows.

use std::str::FromStr;

use crate::error::{HarnessError, Result};
use crate::runner::Row;

pub const CSV_COLUMNS: [&str; 15] = [
    "problem",
    "n",
    "reformulation",
    "method",
    "gradient",
    "bounds",
    "value",
    "fevals",
    "gevals",
    "hevals",
    "conv",
    "kkt1",
    "kkt2",
    "time_s",
    "canonical_error",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Markdown,
    Json,
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "markdown" | "md" => Ok(Format::Markdown),
            "json" => Ok(Format::Json),
            other => Err(HarnessError::Usage(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct EmitOptions {
    /// Write measured wall time in CSV. Off by default so that repeated runs
    /// produce identical files.
    pub timing: bool,
}

/// `%g`-style rendering with 7 significant digits: fixed notation for
/// exponents in `[-4, 7)`, otherwise `d.dddddde[+-]XX`, trailing zeros
/// dropped. Non-finite values print as `NA`, `Inf` or `-Inf`.
pub fn sig7(x: f64) -> String {
    if x.is_nan() {
        return "NA".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "Inf".into() } else { "-Inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.6e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..7).contains(&exp) {
        let decimals = (6 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn flag(v: Option<bool>) -> &'static str {
    match v {
        Some(true) => "TRUE",
        Some(false) => "FALSE",
        None => "NA",
    }
}

fn bounds(b: Option<(f64, f64)>) -> String {
    match b {
        Some((lo, hi)) => format!("[{},{}]", sig7(lo), sig7(hi)),
        None => "none".into(),
    }
}

fn cells(row: &Row, timing: bool) -> Vec<String> {
    vec![
        row.problem.clone(),
        row.n.to_string(),
        row.reformulation.clone(),
        row.method.clone(),
        row.gradient.clone(),
        bounds(row.bounds),
        sig7(row.value),
        row.fevals.to_string(),
        row.gevals.to_string(),
        row.hevals.to_string(),
        row.conv.to_string(),
        flag(row.kkt1).into(),
        flag(row.kkt2).into(),
        if timing { sig7(row.time_s) } else { "NA".into() },
        row.canonical_error.map_or_else(|| "NA".into(), sig7),
    ]
}

pub fn to_csv(rows: &[Row], options: EmitOptions) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS)?;
    for row in rows {
        w.write_record(cells(row, options.timing))?;
    }
    w.into_inner().map_err(|e| HarnessError::Io(e.into_error()))
}

pub fn to_markdown(rows: &[Row]) -> String {
    let mut out = String::new();
    let header: Vec<&str> = CSV_COLUMNS.iter().copied().chain(["status"]).collect();
    out.push_str(&format!("| {} |\n", header.join(" | ")));
    out.push_str(&format!("|{}\n", "---|".repeat(header.len())));
    for row in rows {
        let mut c = cells(row, true);
        c.push(row.status.replace('|', "/"));
        out.push_str(&format!("| {} |\n", c.join(" | ")));
    }
    out
}

/// Rows as a JSON array with full-precision numbers.
pub fn to_json(rows: &[Row]) -> Result<String> {
    Ok(serde_json::to_string_pretty(rows)?)
}

pub fn render(rows: &[Row], format: Format, options: EmitOptions) -> Result<Vec<u8>> {
    match format {
        Format::Csv => to_csv(rows, options),
        Format::Markdown => Ok(to_markdown(rows).into_bytes()),
        Format::Json => Ok(to_json(rows)?.into_bytes()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seven_significant_digits() {
        assert_eq!(sig7(460.51700001), "460.517");
        assert_eq!(sig7(460.5170185988091), "460.517");
        assert_eq!(sig7(6907.755278982137), "6907.755");
        assert_eq!(sig7(8.582807e-6), "8.582807e-06");
        assert_eq!(sig7(-0.00032), "-0.00032");
        assert_eq!(sig7(0.5454545454545454), "0.5454545");
        assert_eq!(sig7(1e25), "1e+25");
        assert_eq!(sig7(8.988465674311579e307), "8.988466e+307");
        assert_eq!(sig7(1234567.0), "1234567");
        assert_eq!(sig7(12345678.0), "1.234568e+07");
        assert_eq!(sig7(9.9999999), "10");
        assert_eq!(sig7(0.0), "0");
        assert_eq!(sig7(f64::NAN), "NA");
    }
}
