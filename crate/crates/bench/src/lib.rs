//! Experiment harness for the sumcol solver: instance manifests, seeded
//! multi-run experiments, ablation modes, summary statistics, t-tests and
//! CSV/JSON reports.

use std::path::PathBuf;

use thiserror::Error;

pub mod manifest;
pub mod report;
pub mod run;
pub mod stats;

pub use manifest::{load_manifest, parse_manifest, InstanceRecord};
pub use report::{emit_report, Format, CSV_HEADER};
pub use run::{run_instance, run_seed, Mode, RunConfig, RunReport, RunRow};
pub use stats::{welch_t_test, WelchTest};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Graph {
        path: PathBuf,
        source: sumcol_core::ParseError,
    },
    #[error("manifest line {line}: {reason}")]
    Manifest { line: usize, reason: String },
    #[error("instance {name}: manifest says (n, m) = {expected:?}, file has {found:?}")]
    SizeMismatch {
        name: String,
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("{0}")]
    Param(String),
    #[error("warm start: {0}")]
    WarmStart(String),
    #[error("warm start file: {0}")]
    WarmStartFile(#[from] sumcol_core::ColoringTextError),
    #[error(transparent)]
    Solver(#[from] sumcol_core::MascError),
    #[error("t-test needs at least 2 values per sample, got {0}")]
    SampleTooSmall(usize),
    #[error("writing report: {0}")]
    Write(std::io::Error),
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("JSON: {0}")]
    Json(#[from] serde_json::Error),
}
