//! CSV and JSON report output.

use std::io::Write;

use crate::run::RunReport;
use crate::BenchError;

pub const CSV_HEADER: [&str; 13] = [
    "name",
    "n",
    "m",
    "best_known",
    "mode",
    "sum_best",
    "k_best",
    "sr",
    "avg",
    "sigma",
    "time_min",
    "runs",
    "seed",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(BenchError::Param(format!("unknown format `{s}`"))),
        }
    }
}

fn float(x: f64) -> String {
    format!("{x:?}")
}

fn opt<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes one summary row per report (CSV) or the full reports with their
/// per-run rows (JSON).
pub fn emit_report<W: Write>(
    reports: &[RunReport],
    format: Format,
    out: W,
) -> Result<(), BenchError> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for r in reports {
                w.write_record([
                    r.name.clone(),
                    r.n.to_string(),
                    r.m.to_string(),
                    opt(r.best_known),
                    r.mode.to_string(),
                    r.sum_best.to_string(),
                    r.k_best.to_string(),
                    r.sr.map(float).unwrap_or_default(),
                    float(r.avg),
                    float(r.sigma),
                    r.time_min.map(float).unwrap_or_default(),
                    r.runs.to_string(),
                    r.seed.to_string(),
                ])?;
            }
            w.flush().map_err(BenchError::Write)?;
        }
        Format::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, reports)?;
            out.write_all(b"\n").map_err(BenchError::Write)?;
        }
    }
    Ok(())
}
