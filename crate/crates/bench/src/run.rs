//! Multi-seed runs of one instance and their summary report.

use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sumcol_core::dnts::search;
use sumcol_core::init::descend;
use sumcol_core::memetic::masc_observed;
use sumcol_core::{rng_from_seed, Coloring, Graph, MascParams, NeighborhoodMode};

use crate::manifest::InstanceRecord;
use crate::stats::{mean, std_dev};
use crate::BenchError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Masc,
    Dnts,
    TsN1,
    TsN2,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Masc, Mode::Dnts, Mode::TsN1, Mode::TsN2];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Masc => "masc",
            Mode::Dnts => "dnts",
            Mode::TsN1 => "ts-n1",
            Mode::TsN2 => "ts-n2",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| BenchError::Param(format!("unknown mode `{s}`")))
    }
}

/// Everything that shapes a run besides the instance and the seed.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub masc: MascParams,
    /// Iteration budget of the single-solution modes.
    pub single_budget: u64,
    /// Optional wall-clock cap per run (memetic mode only, checked between
    /// generations). Off by default because it breaks reproducibility.
    pub time_limit: Option<Duration>,
    /// Record wall-clock times in the report.
    pub timing: bool,
    /// Worker threads for independent runs.
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            masc: MascParams::default(),
            single_budget: 500_000,
            time_limit: None,
            timing: false,
            jobs: 1,
        }
    }
}

impl RunConfig {
    /// Applies one `key=value` override.
    pub fn set(&mut self, assignment: &str) -> Result<(), BenchError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| BenchError::Param(format!("expected key=value, got `{assignment}`")))?;
        let int = || {
            value
                .parse::<u64>()
                .map_err(|_| BenchError::Param(format!("`{key}` needs an integer, got `{value}`")))
        };
        let float = || {
            value
                .parse::<f64>()
                .map_err(|_| BenchError::Param(format!("`{key}` needs a number, got `{value}`")))
        };
        match key {
            "p1" => self.masc.dnts.p1 = int()?,
            "p2" => self.masc.dnts.p2 = int()?,
            "p3" => self.masc.dnts.p3 = int()?,
            "p4" => self.masc.dnts.p4 = int()?,
            "population" => self.masc.population_size = int()? as usize,
            "generations" => self.masc.max_generations = int()? as usize,
            "tabucol_iterations" => self.masc.tabucol.iteration_budget_per_k = int()?,
            "tabucol_restarts" => self.masc.tabucol.restarts_per_k = int()? as u32,
            "replace_probability" => self.masc.replace_second_worst_probability = float()?,
            "single_budget" => self.single_budget = int()?,
            "time_limit" => self.time_limit = Some(Duration::from_secs_f64(float()?)),
            _ => return Err(BenchError::Param(format!("unknown parameter `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        self.masc
            .validate()
            .map_err(|e| BenchError::Param(e.to_string()))?;
        if self.single_budget == 0 {
            return Err(BenchError::Param("single_budget must be positive".into()));
        }
        Ok(())
    }
}

/// Seed of run `i`: the `i`-th output of a splitmix64 stream started at
/// `base`. Adding runs never changes the seeds of earlier ones.
pub fn run_seed(base: u64, i: u64) -> u64 {
    let mut z = base.wrapping_add((i + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub seed: u64,
    pub sum: u64,
    pub k: usize,
    pub iterations: u64,
    /// Seconds until the run's best was found; present only with timing on.
    pub time_to_best_s: Option<f64>,
    pub wall_s: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub best_known: Option<u64>,
    pub mode: Mode,
    pub sum_best: u64,
    pub k_best: usize,
    /// Fraction of runs at or below the best known sum.
    pub sr: Option<f64>,
    pub avg: f64,
    pub sigma: f64,
    /// Mean minutes to reach `sum_best` over the runs that reached it.
    pub time_min: Option<f64>,
    pub runs: usize,
    pub seed: u64,
    pub rows: Vec<RunRow>,
    #[serde(skip)]
    pub best: Option<Coloring>,
}

impl RunReport {
    /// Builds the summary fields from per-run rows.
    pub fn summarize(
        record: &InstanceRecord,
        mode: Mode,
        base_seed: u64,
        rows: Vec<RunRow>,
        best: Option<Coloring>,
    ) -> Self {
        let sums: Vec<f64> = rows.iter().map(|r| r.sum as f64).collect();
        let best_row = rows.iter().min_by_key(|r| r.sum).expect("at least one run");
        let sum_best = best_row.sum;
        let k_best = best_row.k;
        let sr = record.best_known_sum.map(|target| {
            rows.iter().filter(|r| r.sum <= target).count() as f64 / rows.len() as f64
        });
        let times: Vec<f64> = rows
            .iter()
            .filter(|r| r.sum == sum_best)
            .filter_map(|r| r.time_to_best_s)
            .collect();
        let time_min = (!times.is_empty()).then(|| mean(&times) / 60.0);
        Self {
            name: record.name.clone(),
            n: record.n,
            m: record.m,
            best_known: record.best_known_sum,
            mode,
            sum_best,
            k_best,
            sr,
            avg: mean(&sums),
            sigma: std_dev(&sums),
            time_min,
            runs: rows.len(),
            seed: base_seed,
            rows,
            best,
        }
    }

    pub fn sums(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.sum as f64).collect()
    }
}

struct SingleRun {
    row: RunRow,
    best: Coloring,
}

fn one_run(
    g: &Graph,
    mode: Mode,
    seed: u64,
    config: &RunConfig,
    warm_start: Option<&Coloring>,
) -> Result<SingleRun, BenchError> {
    let mut rng = rng_from_seed(seed);
    let start = Instant::now();
    let (best, iterations, found_at) = match mode {
        Mode::Masc => {
            let mut best_sum = u64::MAX;
            let mut found_at = Duration::ZERO;
            let out = masc_observed(g, &config.masc, warm_start, &mut rng, |view| {
                let elapsed = start.elapsed();
                if view.population.best_sum() < best_sum {
                    best_sum = view.population.best_sum();
                    found_at = elapsed;
                }
                match config.time_limit {
                    Some(limit) if elapsed >= limit => ControlFlow::Break(()),
                    _ => ControlFlow::Continue(()),
                }
            })?;
            (out.best, out.iterations, found_at)
        }
        Mode::Dnts | Mode::TsN1 | Mode::TsN2 => {
            let initial = match warm_start {
                Some(c) => c.canonical_relabel(),
                None => descend(g, &config.masc.tabucol, &mut rng),
            };
            let nb = match mode {
                Mode::TsN1 => NeighborhoodMode::ExchangeOnly,
                Mode::TsN2 => NeighborhoodMode::OneMoveOnly,
                _ => NeighborhoodMode::Both,
            };
            let mut params = config.masc.dnts.clone();
            params.p4 = config.single_budget;
            let out = search(initial, g, &params, nb, &mut rng);
            (out.best, out.iterations, start.elapsed())
        }
    };
    debug_assert!(best.is_proper(g));
    let wall = start.elapsed();
    Ok(SingleRun {
        row: RunRow {
            seed,
            sum: best.sum(),
            k: best.used_colors(),
            iterations,
            time_to_best_s: config.timing.then_some(found_at.as_secs_f64()),
            wall_s: config.timing.then_some(wall.as_secs_f64()),
        },
        best,
    })
}

/// Runs `runs` independent seeds of `mode` on `g`.
pub fn run_instance(
    record: &InstanceRecord,
    g: &Graph,
    mode: Mode,
    runs: usize,
    base_seed: u64,
    config: &RunConfig,
    warm_start: Option<&Coloring>,
) -> Result<RunReport, BenchError> {
    if runs == 0 {
        return Err(BenchError::Param("runs must be at least 1".into()));
    }
    config.validate()?;
    if let Some(c) = warm_start {
        if c.n() != g.n() || !c.is_proper(g) {
            return Err(BenchError::WarmStart(format!(
                "coloring is not proper for instance {}",
                record.name
            )));
        }
    }
    let task = |i: usize| one_run(g, mode, run_seed(base_seed, i as u64), config, warm_start);
    let results: Vec<Result<SingleRun, BenchError>> = if config.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.jobs)
            .build()
            .map_err(|e| BenchError::Param(e.to_string()))?;
        pool.install(|| (0..runs).into_par_iter().map(task).collect())
    } else {
        (0..runs).map(task).collect()
    };
    let mut rows = Vec::with_capacity(runs);
    let mut best: Option<Coloring> = None;
    for r in results {
        let r = r?;
        if best.as_ref().is_none_or(|b| r.best.sum() < b.sum()) {
            best = Some(r.best);
        }
        rows.push(r.row);
    }
    Ok(RunReport::summarize(record, mode, base_seed, rows, best))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_stable_and_distinct() {
        let a: Vec<u64> = (0..5).map(|i| run_seed(42, i)).collect();
        let b: Vec<u64> = (0..10).map(|i| run_seed(42, i)).collect();
        assert_eq!(a[..], b[..5]);
        let mut d = b.clone();
        d.sort_unstable();
        d.dedup();
        assert_eq!(d.len(), 10);
        assert_ne!(run_seed(1, 0), run_seed(2, 0));
    }

    #[test]
    fn mode_roundtrip() {
        for m in Mode::ALL {
            assert_eq!(m.as_str().parse::<Mode>().unwrap(), m);
        }
        assert!("tabu".parse::<Mode>().is_err());
    }

    #[test]
    fn param_overrides() {
        let mut c = RunConfig::default();
        c.set("p4=2000").unwrap();
        assert!(c.validate().is_err());
        c.set("p3=1500").unwrap();
        c.set("population=4").unwrap();
        c.validate().unwrap();
        assert_eq!(c.masc.dnts.p4, 2000);
        assert_eq!(c.masc.population_size, 4);
        c.set("population=1").unwrap();
        assert!(c.validate().is_err());
        assert!(c.set("nope=1").is_err());
        assert!(c.set("p1").is_err());
    }
}
