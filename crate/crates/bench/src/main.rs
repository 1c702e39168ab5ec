use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sumcol_bench::{
    emit_report, load_manifest, run_instance, welch_t_test, BenchError, Format, InstanceRecord,
    Mode, RunConfig, RunReport,
};
use sumcol_core::{Coloring, Graph};

#[derive(Parser)]
#[command(
    name = "sumcol",
    version,
    about = "Minimum sum coloring solver and benchmark harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one DIMACS graph.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Write the best coloring found to this file.
        #[arg(long)]
        best_out: Option<PathBuf>,
    },
    /// Run every instance of a manifest.
    Bench {
        manifest: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Restrict to these instance names (comma separated).
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// Write each instance's best coloring to DIR/<name>.sol.
        #[arg(long)]
        best_out: Option<PathBuf>,
    },
    /// Welch t-tests between two JSON reports, matched by instance name.
    Compare { a: PathBuf, b: PathBuf },
}

#[derive(Args)]
struct Common {
    /// masc, dnts, ts-n1 or ts-n2.
    #[arg(long, default_value = "masc")]
    mode: Mode,
    #[arg(long, default_value_t = 10)]
    runs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Coloring file used as one initial solution.
    #[arg(long)]
    warm_start: Option<PathBuf>,
    /// Parameter override, e.g. `--param p4=20000`. Repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Parallel runs.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Record wall-clock times (reports are then no longer reproducible).
    #[arg(long)]
    timing: bool,
}

impl Common {
    fn config(&self) -> Result<RunConfig, BenchError> {
        let mut config = RunConfig {
            timing: self.timing,
            jobs: self.jobs.max(1),
            ..RunConfig::default()
        };
        for p in &self.params {
            config.set(p)?;
        }
        config.validate()?;
        Ok(config)
    }

    fn warm_start(&self, g: &Graph) -> Result<Option<Coloring>, BenchError> {
        let Some(path) = &self.warm_start else {
            return Ok(None);
        };
        let text = read(path)?;
        Ok(Some(Coloring::parse_text(&text, g)?))
    }

    fn emit(&self, reports: &[RunReport]) -> Result<(), BenchError> {
        match &self.out {
            Some(path) => {
                let file = File::create(path).map_err(|e| BenchError::Io {
                    path: path.clone(),
                    source: e,
                })?;
                emit_report(reports, self.format, BufWriter::new(file))
            }
            None => emit_report(reports, self.format, io::stdout().lock()),
        }
    }
}

fn read(path: &Path) -> Result<String, BenchError> {
    fs::read_to_string(path).map_err(|e| BenchError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

fn write_best(path: &Path, report: &RunReport) -> Result<(), BenchError> {
    if let Some(best) = &report.best {
        fs::write(path, best.to_text()).map_err(|e| BenchError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
    }
    Ok(())
}

fn solve(file: &Path, common: &Common, best_out: Option<&Path>) -> Result<(), BenchError> {
    let (g, diag) = Graph::parse_dimacs(&read(file)?).map_err(|e| BenchError::Graph {
        path: file.to_path_buf(),
        source: e,
    })?;
    if diag.edge_count_mismatch(g.edge_count()) {
        eprintln!(
            "warning: {} declares {} edges, found {}",
            file.display(),
            diag.declared_edges,
            g.edge_count()
        );
    }
    let name = file
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "graph".into());
    let record = InstanceRecord::from_graph(&name, file, &g);
    let warm = common.warm_start(&g)?;
    let report = run_instance(
        &record,
        &g,
        common.mode,
        common.runs,
        common.seed,
        &common.config()?,
        warm.as_ref(),
    )?;
    if let Some(path) = best_out {
        write_best(path, &report)?;
    }
    common.emit(&[report])
}

fn bench(
    manifest: &Path,
    common: &Common,
    only: &[String],
    best_out: Option<&Path>,
) -> Result<(), BenchError> {
    let config = common.config()?;
    let mut reports = Vec::new();
    for record in load_manifest(manifest)? {
        if !only.is_empty() && !only.contains(&record.name) {
            continue;
        }
        if !record.path.exists() {
            eprintln!(
                "skipping {}: {} not found",
                record.name,
                record.path.display()
            );
            continue;
        }
        let g = record.load_graph()?;
        let warm = common.warm_start(&g)?;
        let report = run_instance(
            &record,
            &g,
            common.mode,
            common.runs,
            common.seed,
            &config,
            warm.as_ref(),
        )?;
        eprintln!(
            "{}: best {} ({} colors), avg {:.2}",
            report.name, report.sum_best, report.k_best, report.avg
        );
        if let Some(dir) = best_out {
            write_best(&dir.join(format!("{}.sol", record.name)), &report)?;
        }
        reports.push(report);
    }
    common.emit(&reports)
}

fn compare(a: &Path, b: &Path) -> Result<(), BenchError> {
    let ra: Vec<RunReport> = serde_json::from_str(&read(a)?)?;
    let rb: Vec<RunReport> = serde_json::from_str(&read(b)?)?;
    let mut out = io::stdout().lock();
    writeln!(out, "name,mode_a,mode_b,avg_a,avg_b,t,p,significant").map_err(BenchError::Write)?;
    for x in &ra {
        let Some(y) = rb.iter().find(|y| y.name == x.name) else {
            continue;
        };
        let t = welch_t_test(&x.sums(), &y.sums())?;
        writeln!(
            out,
            "{},{},{},{:?},{:?},{:?},{},{}",
            x.name,
            x.mode,
            y.mode,
            x.avg,
            y.avg,
            t.t,
            t.p_value.map(|p| format!("{p:?}")).unwrap_or_default(),
            t.significant
        )
        .map_err(BenchError::Write)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve {
            file,
            common,
            best_out,
        } => solve(file, common, best_out.as_deref()),
        Command::Bench {
            manifest,
            common,
            only,
            best_out,
        } => bench(manifest, common, only, best_out.as_deref()),
        Command::Compare { a, b } => compare(a, b),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
