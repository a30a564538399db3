use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::{apply_overrides, de_error, parse_table, read_config, AlgorithmKind, InnerKind, OracleKind, RunConfig};
use super::metrics::{mean_stderr, MeanStderr};
use super::output::{write_json, write_trajectory_csv};
use super::run::{run_one, RunSummary};
use crate::error::{Error, Result};

/// Axis lists of a sweep. An absent axis keeps the base value; an empty list
/// yields no cells. Cells are the Cartesian product in field order, with
/// later fields varying fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepAxes {
    pub seeds: Vec<u64>,
    pub algorithm: Option<Vec<AlgorithmKind>>,
    pub inner: Option<Vec<InnerKind>>,
    pub d: Option<Vec<usize>>,
    pub k: Option<Vec<usize>>,
    pub m: Option<Vec<usize>>,
    pub tau: Option<Vec<f64>>,
    pub oracle: Option<Vec<OracleKind>>,
    pub p: Option<Vec<f64>>,
    pub votes: Option<Vec<usize>>,
    pub iterations: Option<Vec<usize>>,
    pub alpha0: Option<Vec<f64>>,
    pub alpha: Option<Vec<f64>>,
    pub mu: Option<Vec<f64>>,
    pub epsilon: Option<Vec<f64>>,
    pub relative: Option<Vec<f64>>,
    pub output: Option<PathBuf>,
}

impl Default for SweepAxes {
    fn default() -> Self {
        Self {
            seeds: vec![1, 2, 3, 4, 5],
            algorithm: None,
            inner: None,
            d: None,
            k: None,
            m: None,
            tau: None,
            oracle: None,
            p: None,
            votes: None,
            iterations: None,
            alpha0: None,
            alpha: None,
            mu: None,
            epsilon: None,
            relative: None,
            output: None,
        }
    }
}

/// A base run configuration plus a `[sweep]` table of axes.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub base: RunConfig,
    pub axes: SweepAxes,
}

type Setter = Box<dyn Fn(&mut RunConfig) + Send + Sync>;

fn axis<V: Clone + Send + Sync + 'static>(
    values: &Option<Vec<V>>,
    set: impl Fn(&mut RunConfig, V) + Clone + Send + Sync + 'static,
) -> Option<Vec<Setter>> {
    values.as_ref().map(|vs| {
        vs.iter()
            .map(|v| {
                let (v, set) = (v.clone(), set.clone());
                Box::new(move |c: &mut RunConfig| set(c, v.clone())) as Setter
            })
            .collect()
    })
}

impl SweepPlan {
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table = parse_table(text)?;
        apply_overrides(&mut table, overrides)?;
        let axes = match table.remove("sweep") {
            Some(v) => v.try_into().map_err(de_error)?,
            None => SweepAxes::default(),
        };
        let base: RunConfig = toml::Value::Table(table).try_into().map_err(de_error)?;
        let plan = Self { base, axes };
        plan.cells()?;
        Ok(plan)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = read_config(path)?;
        Self::from_toml_str(&text, overrides).map_err(|e| match e {
            Error::UnknownKey(_) => e,
            other => Error::config(format!("{}: {other}", path.display())),
        })
    }

    /// Expands the axes into cell configurations, validating each.
    pub fn cells(&self) -> Result<Vec<RunConfig>> {
        let a = &self.axes;
        let axes: Vec<Vec<Setter>> = [
            axis(&a.algorithm, |c, v| c.algorithm.kind = v),
            axis(&a.inner, |c, v| c.problem.inner = v),
            axis(&a.d, |c, v| c.problem.d = v),
            axis(&a.k, |c, v| c.problem.k = v),
            axis(&a.m, |c, v| c.problem.m = v),
            axis(&a.tau, |c, v| c.problem.tau = v),
            axis(&a.oracle, |c, v| c.oracle.kind = v),
            axis(&a.p, |c, v| c.oracle.p = v),
            axis(&a.votes, |c, v| c.oracle.votes = v),
            axis(&a.iterations, |c, v| c.algorithm.iterations = v),
            axis(&a.alpha0, |c, v| c.algorithm.alpha0 = v),
            axis(&a.alpha, |c, v| c.algorithm.alpha = Some(v)),
            axis(&a.mu, |c, v| c.algorithm.mu = v),
            axis(&a.epsilon, |c, v| c.target.epsilon = Some(v)),
            axis(&a.relative, |c, v| c.target.relative = Some(v)),
        ]
        .into_iter()
        .flatten()
        .collect();

        let mut cells = vec![self.base.clone()];
        for setters in &axes {
            cells = cells
                .iter()
                .flat_map(|c| {
                    setters.iter().map(move |set| {
                        let mut next = c.clone();
                        set(&mut next);
                        next
                    })
                })
                .collect();
        }
        for (i, c) in cells.iter().enumerate() {
            c.validate().map_err(|e| Error::config(format!("sweep cell {i}: {e}")))?;
        }
        Ok(cells)
    }

    pub fn run_count(&self) -> Result<usize> {
        Ok(self.cells()?.len() * self.axes.seeds.len())
    }
}

/// Stable short identifier of a cell configuration.
pub fn cell_id(config: &RunConfig) -> String {
    let canonical = serde_json::to_string(config).expect("configs always serialize");
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub seed: u64,
    pub error: String,
}

/// Per-cell statistics over seeds. Iteration counts only average runs that
/// reached the target; `reached` says how many did.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellAggregate {
    pub cell: String,
    pub config: RunConfig,
    pub seeds: Vec<u64>,
    pub completed: usize,
    pub failures: Vec<RunFailure>,
    pub reached: usize,
    pub iterations_to_target: Option<MeanStderr>,
    pub epsilon: Option<MeanStderr>,
    pub initial_grad_norm: Option<MeanStderr>,
    pub final_mean_grad_norm: Option<MeanStderr>,
    pub final_mean_grad_norm_sq: Option<MeanStderr>,
    pub best_mean_grad_norm: Option<MeanStderr>,
    pub final_f: Option<MeanStderr>,
    pub total_queries: Option<MeanStderr>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub runs: usize,
    pub failures: usize,
    pub cells: Vec<CellAggregate>,
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub cell: String,
    pub seed: u64,
    pub result: std::result::Result<RunSummary, String>,
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub runs: Vec<RunRecord>,
    pub aggregate: Aggregate,
}

impl SweepResult {
    pub fn summaries(&self) -> impl Iterator<Item = &RunSummary> {
        self.runs.iter().filter_map(|r| r.result.as_ref().ok())
    }
}

fn aggregate_cell(cell: String, config: RunConfig, seeds: &[u64], records: &[RunRecord]) -> CellAggregate {
    let ok: Vec<&RunSummary> = records.iter().filter_map(|r| r.result.as_ref().ok()).collect();
    let failures = records
        .iter()
        .filter_map(|r| r.result.as_ref().err().map(|e| RunFailure { seed: r.seed, error: e.clone() }))
        .collect();
    let stat = |f: &dyn Fn(&RunSummary) -> f64| mean_stderr(&ok.iter().map(|s| f(s)).collect::<Vec<_>>());
    let hits: Vec<f64> = ok.iter().filter_map(|s| s.iterations_to_target.map(|t| t as f64)).collect();
    let eps: Vec<f64> = ok.iter().filter_map(|s| s.epsilon).collect();
    CellAggregate {
        cell,
        config,
        seeds: seeds.to_vec(),
        completed: ok.len(),
        failures,
        reached: hits.len(),
        iterations_to_target: mean_stderr(&hits),
        epsilon: mean_stderr(&eps),
        initial_grad_norm: stat(&|s| s.initial_grad_norm),
        final_mean_grad_norm: stat(&|s| s.final_mean_grad_norm),
        final_mean_grad_norm_sq: stat(&|s| s.final_mean_grad_norm_sq),
        best_mean_grad_norm: stat(&|s| s.best_mean_grad_norm),
        final_f: stat(&|s| s.final_f),
        total_queries: stat(&|s| s.total_queries as f64),
    }
}

/// Runs every (cell, seed) pair on `workers` threads. Results come back in
/// plan order regardless of scheduling, so the aggregate does not depend on
/// `workers`. Failed runs are recorded and the sweep continues.
///
/// With an output directory each run writes `<cell>/<seed>.csv` and
/// `<cell>/<seed>.json`, and the sweep writes `aggregate.json`.
pub fn run_sweep(plan: &SweepPlan, workers: usize, output: Option<&Path>) -> Result<SweepResult> {
    let cells = plan.cells()?;
    let ids: Vec<String> = cells.iter().map(cell_id).collect();
    let seeds = &plan.axes.seeds;
    let jobs: Vec<(usize, u64)> = (0..cells.len()).flat_map(|c| seeds.iter().map(move |&s| (c, s))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?;

    let runs: Vec<RunRecord> = pool.install(|| {
        jobs.par_iter()
            .map(|&(c, seed)| {
                let result = run_one(&cells[c], seed).and_then(|(traj, summary)| {
                    if let Some(dir) = output {
                        let base = dir.join(&ids[c]);
                        write_trajectory_csv(&base.join(format!("{seed}.csv")), &traj)?;
                        write_json(&base.join(format!("{seed}.json")), &summary)?;
                    }
                    Ok(summary)
                });
                RunRecord { cell: ids[c].clone(), seed, result: result.map_err(|e| e.to_string()) }
            })
            .collect()
    });

    let per_cell = seeds.len();
    let cell_aggs: Vec<CellAggregate> = cells
        .into_iter()
        .zip(ids)
        .enumerate()
        .map(|(i, (config, id))| aggregate_cell(id, config, seeds, &runs[i * per_cell..(i + 1) * per_cell]))
        .collect();
    let aggregate = Aggregate {
        runs: runs.len(),
        failures: runs.iter().filter(|r| r.result.is_err()).count(),
        cells: cell_aggs,
    };
    if let Some(dir) = output {
        write_json(&dir.join("aggregate.json"), &aggregate)?;
    }
    Ok(SweepResult { runs, aggregate })
}
