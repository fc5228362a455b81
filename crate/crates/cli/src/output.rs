use std::io::Write;
use std::str::FromStr;

use hhcert_core::Rational;
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::{CliError, Format, OutputArgs};

/// Every parameter that shaped a run; embedded in each output.
#[derive(Debug, Clone, Default, Serialize)]
pub(crate) struct RunConfig {
    pub subcommand: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_max: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quad_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub modulus: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub expressions: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<String>,
    pub format: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl RunConfig {
    pub fn new(subcommand: &str, out: &OutputArgs) -> Self {
        RunConfig {
            subcommand: subcommand.to_string(),
            format: match out.format {
                Format::Csv => "csv",
                Format::Json => "json",
            }
            .to_string(),
            output: out.output.as_ref().map(|p| p.display().to_string()),
            ..RunConfig::default()
        }
    }

    pub fn comment(&self) -> String {
        format!("# config: {}\n", serde_json::to_string(self).expect("config serializes"))
    }
}

/// Accepts integers, decimals (`-0.25`, `1e-3`) and fractions (`3/4`).
pub fn parse_number(text: &str) -> Result<f64, String> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: f64 = p.trim().parse().map_err(|_| format!("invalid number `{text}`"))?;
        let q: f64 = q.trim().parse().map_err(|_| format!("invalid number `{text}`"))?;
        if q == 0.0 {
            return Err(format!("zero denominator in `{text}`"));
        }
        return Ok(p / q);
    }
    let v: f64 = t.parse().map_err(|_| format!("invalid number `{text}`"))?;
    if !v.is_finite() {
        return Err(format!("number `{text}` is not finite"));
    }
    Ok(v)
}

/// Exact value of an integer, terminating decimal or fraction.
pub fn parse_rational(text: &str) -> Result<Rational, String> {
    let t = text.trim();
    let bad = || format!("invalid rational `{text}`");
    if t.contains('/') {
        let r = Rational::from_str(t).map_err(|_| bad())?;
        return Ok(r);
    }
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let numer = BigInt::from_str(&digits).map_err(|_| bad())?;
    let denom = num_traits::pow(BigInt::from(10), frac.len());
    let r = Rational::new(numer, denom);
    Ok(if neg { -r } else { r })
}

pub(crate) fn rational_list(text: &str) -> Result<Vec<Rational>, CliError> {
    text.split(',')
        .map(|s| parse_rational(s).map_err(CliError::Usage))
        .collect()
}

pub(crate) fn decimal(r: &Rational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    r.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn csv_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

pub(crate) fn json_text<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

pub(crate) fn emit(text: &str, args: &OutputArgs, out: &mut dyn Write) -> Result<(), CliError> {
    match &args.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Usage(format!("cannot write output: {e}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals() {
        let r = |s: &str| parse_rational(s).unwrap();
        assert_eq!(r("0.3"), Rational::new(3.into(), 10.into()));
        assert_eq!(r("-1.25"), Rational::new((-5).into(), 4.into()));
        assert_eq!(r("7"), Rational::from_integer(7.into()));
        assert_eq!(r("2/6"), Rational::new(1.into(), 3.into()));
        assert_eq!(r(".5"), Rational::new(1.into(), 2.into()));
        for bad in ["", "-", "1e3", "x", "1/0.5", "1.2.3"] {
            assert!(parse_rational(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn numbers() {
        assert_eq!(parse_number("1/4").unwrap(), 0.25);
        assert_eq!(parse_number("-2").unwrap(), -2.0);
        assert_eq!(parse_number("1e-3").unwrap(), 1e-3);
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("inf").is_err());
    }
}
