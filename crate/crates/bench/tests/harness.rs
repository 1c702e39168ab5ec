use std::path::{Path, PathBuf};
use std::process::Command;

use sumcol_bench::{
    emit_report, load_manifest, run_instance, welch_t_test, Format, InstanceRecord, Mode,
    RunConfig, RunReport,
};
use sumcol_core::{Coloring, Graph};

fn instances() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../instances")
}

fn record(name: &str) -> (InstanceRecord, Graph) {
    let recs = load_manifest(&instances().join("benchmarks.manifest")).unwrap();
    let rec = recs.into_iter().find(|r| r.name == name).unwrap();
    let g = rec.load_graph().unwrap();
    (rec, g)
}

fn sumcol() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sumcol"))
}

#[test]
fn vendored_files_match_manifest() {
    let recs = load_manifest(&instances().join("vendored.manifest")).unwrap();
    assert!(recs.len() >= 10);
    for r in recs {
        r.load_graph().unwrap_or_else(|e| panic!("{}: {e}", r.name));
    }
}

#[test]
fn welch_matches_reference_values() {
    // Reference values from an independent statistics package.
    let r = welch_t_test(&[10.0, 12.0, 11.0], &[20.0, 22.0, 21.0]).unwrap();
    assert!((r.t - -12.24744871391589).abs() < 1e-9);
    assert!((r.df.unwrap() - 4.0).abs() < 1e-9);
    assert!((r.p_value.unwrap() - 0.00025521674944192687).abs() < 1e-9);
    assert!(r.significant);

    let r = welch_t_test(
        &[3.0, 5.0, 4.0, 6.0, 7.0],
        &[4.0, 9.0, 2.0, 8.0, 11.0, 10.0],
    )
    .unwrap();
    assert!((r.t - -1.4439897447623105).abs() < 1e-9);
    assert!((r.df.unwrap() - 7.147710726419673).abs() < 1e-9);
    assert!((r.p_value.unwrap() - 0.1911047554786208).abs() < 1e-9);
    assert!(!r.significant);
}

#[test]
fn myciel3_thirty_runs() {
    let (rec, g) = record("myciel3");
    let report = run_instance(&rec, &g, Mode::Masc, 30, 1, &RunConfig::default(), None).unwrap();
    assert_eq!(report.sum_best, 21);
    assert_eq!(report.sr, Some(1.0));
    assert_eq!(report.sigma, 0.0);
    assert_eq!(report.avg, 21.0);

    let mut buf = Vec::new();
    emit_report(&[report], Format::Csv, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let row = text.lines().nth(1).unwrap();
    assert_eq!(row, "myciel3,11,20,21,masc,21,4,1.0,21.0,0.0,,30,1");
}

#[test]
fn myciel5_thirty_runs() {
    let (rec, g) = record("myciel5");
    let report = run_instance(&rec, &g, Mode::Masc, 30, 5, &RunConfig::default(), None).unwrap();
    assert_eq!(report.sum_best, 93);
    assert_eq!(report.sr, Some(1.0));
    assert_eq!(report.sigma, 0.0);
}

fn recompute(report: &RunReport) {
    let sums = report.sums();
    let mean = sums.iter().sum::<f64>() / sums.len() as f64;
    let var = sums.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / sums.len() as f64;
    assert_eq!(report.avg, mean);
    assert!((report.sigma - var.sqrt()).abs() < 1e-12);
    assert_eq!(
        report.sum_best as f64,
        sums.iter().cloned().fold(f64::INFINITY, f64::min)
    );
    assert_eq!(report.runs, report.rows.len());
    if let Some(target) = report.best_known {
        let hits = report.rows.iter().filter(|r| r.sum <= target).count();
        assert_eq!(report.sr, Some(hits as f64 / report.runs as f64));
    }
}

#[test]
fn summary_matches_rows_in_every_mode() {
    let (rec, g) = record("queen6.6");
    let mut config = RunConfig::default();
    config.set("generations=3").unwrap();
    config.set("single_budget=3000").unwrap();
    for mode in Mode::ALL {
        let report = run_instance(&rec, &g, mode, 4, 9, &config, None).unwrap();
        recompute(&report);
        let best = report.best.as_ref().unwrap();
        assert!(best.is_proper(&g));
        assert_eq!(best.sum(), report.sum_best);
    }
}

#[test]
fn parallel_runs_match_sequential() {
    let (rec, g) = record("myciel4");
    let mut config = RunConfig::default();
    config.set("generations=5").unwrap();
    let a = run_instance(&rec, &g, Mode::Masc, 4, 3, &config, None).unwrap();
    config.jobs = 3;
    let b = run_instance(&rec, &g, Mode::Masc, 4, 3, &config, None).unwrap();
    assert_eq!(a, b);
}

#[test]
fn warm_start_is_kept() {
    let (rec, g) = record("queen5.5");
    let (opt, _) = {
        let r = run_instance(&rec, &g, Mode::Masc, 1, 0, &RunConfig::default(), None).unwrap();
        (r.best.unwrap(), ())
    };
    assert_eq!(opt.sum(), 75);
    let mut config = RunConfig::default();
    config.set("generations=1").unwrap();
    config.set("single_budget=1").unwrap();
    for mode in Mode::ALL {
        let r = run_instance(&rec, &g, mode, 2, 4, &config, Some(&opt)).unwrap();
        assert_eq!(r.sum_best, 75, "{mode}");
    }
    let improper = Coloring::from_class_indices(vec![0; 25]);
    assert!(run_instance(&rec, &g, Mode::Masc, 1, 0, &config, Some(&improper)).is_err());
}

#[test]
fn cli_solve_writes_reloadable_best() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let best = dir.path().join("best.sol");
    let status = sumcol()
        .arg("solve")
        .arg(instances().join("myciel4.col"))
        .args([
            "--runs",
            "2",
            "--format",
            "json",
            "--param",
            "generations=10",
        ])
        .arg("--out")
        .arg(&out)
        .arg("--best-out")
        .arg(&best)
        .status()
        .unwrap();
    assert!(status.success());
    let reports: Vec<RunReport> =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let (g, _) =
        Graph::parse_dimacs(&std::fs::read_to_string(instances().join("myciel4.col")).unwrap())
            .unwrap();
    let c = Coloring::parse_text(&std::fs::read_to_string(&best).unwrap(), &g).unwrap();
    assert_eq!(c.sum(), reports[0].sum_best);

    let warm = sumcol()
        .arg("solve")
        .arg(instances().join("myciel4.col"))
        .args(["--runs", "1", "--param", "generations=1", "--warm-start"])
        .arg(&best)
        .output()
        .unwrap();
    assert!(warm.status.success());
}

#[test]
fn cli_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.col");
    std::fs::write(&bad, "e 1 2\np edge 2 1\n").unwrap();
    let out = sumcol().arg("solve").arg(&bad).output().unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    let out = sumcol()
        .arg("solve")
        .arg(instances().join("myciel3.col"))
        .args(["--param", "p9=1"])
        .output()
        .unwrap();
    assert!(!out.status.success());

    let sol = dir.path().join("x.sol");
    std::fs::write(&sol, "s 11 1\n").unwrap();
    let out = sumcol()
        .arg("solve")
        .arg(instances().join("myciel3.col"))
        .arg("--warm-start")
        .arg(&sol)
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn cli_bench_and_compare() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = instances().join("vendored.manifest");
    let mut outs = Vec::new();
    for mode in ["dnts", "ts-n2"] {
        let out = dir.path().join(format!("{mode}.json"));
        let status = sumcol()
            .arg("bench")
            .arg(&manifest)
            .args(["--only", "myciel3,queen5.5", "--mode", mode, "--runs", "3"])
            .args(["--param", "single_budget=2000", "--format", "json", "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        outs.push(out);
    }
    let reports: Vec<RunReport> =
        serde_json::from_str(&std::fs::read_to_string(&outs[0]).unwrap()).unwrap();
    assert_eq!(reports.len(), 2);
    let cmp = sumcol().arg("compare").args(&outs).output().unwrap();
    assert!(cmp.status.success());
    let text = String::from_utf8(cmp.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("myciel3,dnts,ts-n2,"));
}
