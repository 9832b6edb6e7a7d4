use std::fmt::Write as _;
use std::str::FromStr;

use super::ResultRow;
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 8] =
    ["experiment", "algorithm", "iterations", "f_final", "grad_norm_final", "time_seconds", "f_evals", "termination"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
    JsonLines,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "markdown" | "md" => Ok(Self::Markdown),
            "jsonlines" | "jsonl" => Ok(Self::JsonLines),
            _ => Err(Error::UnknownFormat(s.to_string())),
        }
    }
}

/// 17 significant digits, enough to recover every `f64` exactly.
fn exact(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

fn short(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.3e}")
    } else {
        v.to_string()
    }
}

fn json_number(v: f64) -> String {
    if v.is_finite() {
        exact(v)
    } else {
        format!("\"{v}\"")
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

pub fn emit_report(rows: &[ResultRow], format: ReportFormat) -> Result<Vec<u8>> {
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER)?;
            for r in rows {
                w.write_record([
                    r.experiment.clone(),
                    r.algorithm.clone(),
                    r.iterations.to_string(),
                    exact(r.f_final),
                    exact(r.grad_norm_final),
                    exact(r.time_seconds),
                    r.f_evals.to_string(),
                    r.termination.clone(),
                ])?;
            }
            w.into_inner().map_err(|e| Error::Io(e.into_error()))
        }
        ReportFormat::Markdown => {
            let mut out = String::from("| experiment | algorithm | iterations | f | ‖∇f‖ | time (s) | f evals | termination |\n");
            out.push_str("|---|---|---:|---:|---:|---:|---:|---|\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {} | {} | {} |",
                    r.experiment,
                    r.algorithm,
                    r.iterations,
                    short(r.f_final),
                    short(r.grad_norm_final),
                    short(r.time_seconds),
                    r.f_evals,
                    r.termination
                );
            }
            Ok(out.into_bytes())
        }
        ReportFormat::JsonLines => {
            let mut out = String::new();
            for r in rows {
                let _ = writeln!(
                    out,
                    "{{\"experiment\":{},\"algorithm\":{},\"iterations\":{},\"f_final\":{},\"grad_norm_final\":{},\"time_seconds\":{},\"f_evals\":{},\"termination\":{}}}",
                    json_string(&r.experiment),
                    json_string(&r.algorithm),
                    r.iterations,
                    json_number(r.f_final),
                    json_number(r.grad_norm_final),
                    json_number(r.time_seconds),
                    r.f_evals,
                    json_string(&r.termination)
                );
            }
            Ok(out.into_bytes())
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::Io(std::io::Error::new(std::io::ErrorKind::InvalidData, msg.into()))
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse().map_err(|_| bad(format!("not a number: {s}")))
}

fn parse_usize(s: &str) -> Result<usize> {
    s.parse().map_err(|_| bad(format!("not a count: {s}")))
}

/// Reads back a CSV report written by [`emit_report`].
pub fn parse_csv(bytes: &[u8]) -> Result<Vec<ResultRow>> {
    let mut rdr = csv::Reader::from_reader(bytes);
    if rdr.headers()?.iter().ne(CSV_HEADER) {
        return Err(bad("unexpected CSV header"));
    }
    let mut rows = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        rows.push(ResultRow {
            experiment: rec[0].to_string(),
            algorithm: rec[1].to_string(),
            iterations: parse_usize(&rec[2])?,
            f_final: parse_f64(&rec[3])?,
            grad_norm_final: parse_f64(&rec[4])?,
            time_seconds: parse_f64(&rec[5])?,
            f_evals: parse_usize(&rec[6])?,
            termination: rec[7].to_string(),
        });
    }
    Ok(rows)
}

/// Reads back a JSON-lines report written by [`emit_report`].
pub fn parse_jsonlines(bytes: &[u8]) -> Result<Vec<ResultRow>> {
    let text = std::str::from_utf8(bytes).map_err(|e| bad(e.to_string()))?;
    let mut rows = Vec::new();
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let v: serde_json::Value = serde_json::from_str(line).map_err(|e| bad(e.to_string()))?;
        let text_field = |k: &str| v[k].as_str().map(str::to_string).ok_or_else(|| bad(format!("missing {k}")));
        let count = |k: &str| v[k].as_u64().map(|n| n as usize).ok_or_else(|| bad(format!("missing {k}")));
        let real = |k: &str| match &v[k] {
            serde_json::Value::Number(n) => n.as_f64().ok_or_else(|| bad(format!("bad {k}"))),
            serde_json::Value::String(s) => parse_f64(s),
            _ => Err(bad(format!("missing {k}"))),
        };
        rows.push(ResultRow {
            experiment: text_field("experiment")?,
            algorithm: text_field("algorithm")?,
            iterations: count("iterations")?,
            f_final: real("f_final")?,
            grad_norm_final: real("grad_norm_final")?,
            time_seconds: real("time_seconds")?,
            f_evals: count("f_evals")?,
            termination: text_field("termination")?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(f: f64) -> ResultRow {
        ResultRow {
            experiment: "bench-f6".into(),
            algorithm: "V1".into(),
            iterations: 12,
            f_final: f,
            grad_norm_final: 1.0 / 3.0,
            time_seconds: 0.001234,
            f_evals: 40,
            termination: "GradTol".into(),
        }
    }

    #[test]
    fn empty_csv_is_header_only() {
        let out = String::from_utf8(emit_report(&[], ReportFormat::Csv).unwrap()).unwrap();
        assert_eq!(out, "experiment,algorithm,iterations,f_final,grad_norm_final,time_seconds,f_evals,termination\n");
    }

    #[test]
    fn one_row_has_eight_fields() {
        let out = String::from_utf8(emit_report(&[row(0.1)], ReportFormat::Csv).unwrap()).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[1].split(',').count(), 8);
    }

    #[test]
    fn seventeen_significant_digits() {
        assert_eq!(exact(0.1), "1.0000000000000001e-1");
        assert_eq!(short(0.1), "1.000e-1");
    }

    #[test]
    fn csv_and_jsonlines_round_trip_bit_exact() {
        let rows: Vec<ResultRow> =
            [0.1, -2.5e-300, 5e-324, f64::MAX, f64::NAN, f64::NEG_INFINITY, 579425.218039767].map(row).to_vec();
        for (fmt, parse) in
            [(ReportFormat::Csv, parse_csv as fn(&[u8]) -> Result<Vec<ResultRow>>), (ReportFormat::JsonLines, parse_jsonlines)]
        {
            let back = parse(&emit_report(&rows, fmt).unwrap()).unwrap();
            assert_eq!(back.len(), rows.len());
            for (a, b) in rows.iter().zip(&back) {
                assert!(a.same_outcome(b), "{fmt:?}: {a:?} vs {b:?}");
                assert_eq!(a.time_seconds.to_bits(), b.time_seconds.to_bits());
            }
        }
    }

    #[test]
    fn markdown_has_one_line_per_row_plus_header() {
        let out = String::from_utf8(emit_report(&[row(1.0), row(2.0)], ReportFormat::Markdown).unwrap()).unwrap();
        assert_eq!(out.lines().count(), 4);
        assert!(out.contains("| bench-f6 | V1 | 12 | 1.000e0 |"));
    }

    #[test]
    fn unknown_format_is_rejected() {
        assert!(matches!("xml".parse::<ReportFormat>(), Err(Error::UnknownFormat(_))));
        assert_eq!("JSONLINES".parse::<ReportFormat>().unwrap(), ReportFormat::JsonLines);
    }
}
