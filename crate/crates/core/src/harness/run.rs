use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{AlgorithmKind, RunConfig};
use super::metrics::iterations_to_target;
use crate::algorithms::{ncrs_run, ncrs_vote_run, rsgf_max_step, rsgf_run, Trajectory, TrajectoryRecorder};
use crate::error::{Error, Result};
use crate::geometry::{RngStream, Subspace};
use crate::objectives::{NuisanceSpec, Objective, RidgeObjective};
use crate::oracles::{ConfidenceOracle, CountingEvaluator, SignOracle};

/// Stream roles. Each gets its own ChaCha stream under the master seed.
pub const ROLE_SUBSPACE: &str = "subspace";
pub const ROLE_NUISANCE: &str = "nuisance";
pub const ROLE_INIT: &str = "init";
pub const ROLE_DIRECTIONS: &str = "directions";
pub const ROLE_ORACLE: &str = "oracle";

/// Run index used for every stream. Cells that share a seed therefore share
/// randomness (common random numbers across a sweep).
const RUN_INDEX: u64 = 0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub config: RunConfig,
    pub seed: u64,
    pub iterations: usize,
    /// Logged iteration indices and the running-average gradient norm there.
    pub logged_t: Vec<usize>,
    pub running_average: Vec<f64>,
    pub initial_grad_norm: f64,
    pub final_f: f64,
    pub final_mean_grad_norm: f64,
    pub final_mean_grad_norm_sq: f64,
    pub best_mean_grad_norm: f64,
    /// Absolute target after resolving `target.relative`.
    pub epsilon: Option<f64>,
    pub iterations_to_target: Option<usize>,
    pub accepted: usize,
    pub total_queries: u64,
    pub wall_time_secs: f64,
    pub warnings: Vec<String>,
}

/// Queries a run of `config` must spend: `T`, `N·T` or `2T`.
pub fn expected_queries(config: &RunConfig) -> u64 {
    let t = config.algorithm.iterations as u64;
    match config.algorithm.kind {
        AlgorithmKind::Ncrs => t,
        AlgorithmKind::NcrsVote => config.oracle.votes as u64 * t,
        AlgorithmKind::Rsgf => 2 * t,
    }
}

/// Builds the objective a run of `config` under `seed` optimizes.
pub fn build_objective(config: &RunConfig, seed: u64) -> Result<RidgeObjective<f64>> {
    let p = &config.problem;
    let mut rng = RngStream::for_role(seed, RUN_INDEX, ROLE_SUBSPACE);
    let active = Subspace::random(&mut rng, p.d, p.k)?;
    let nuisance = if p.has_nuisance() {
        let mut rng = RngStream::for_role(seed, RUN_INDEX, ROLE_NUISANCE);
        let w = Subspace::random_complement(&mut rng, p.m, &active)?;
        Some(NuisanceSpec::new(w, p.tau, &active)?)
    } else {
        None
    };
    RidgeObjective::new(active, p.inner_function(), nuisance)
}

/// Runs one configuration under one master seed. Deterministic in
/// `(config, seed)` apart from `wall_time_secs`.
pub fn run_one(config: &RunConfig, seed: u64) -> Result<(Trajectory, RunSummary)> {
    config.validate()?;
    let start = Instant::now();
    let objective = build_objective(config, seed)?;
    let mut init_rng = RngStream::for_role(seed, RUN_INDEX, ROLE_INIT);
    let theta1 = objective.initial_point(&mut init_rng, config.problem.init_radius())?;
    let mut directions = RngStream::for_role(seed, RUN_INDEX, ROLE_DIRECTIONS);
    let oracle_rng = RngStream::for_role(seed, RUN_INDEX, ROLE_ORACLE);
    let a = &config.algorithm;
    let o = &config.oracle;
    let mut warnings = Vec::new();
    let mut recorder = TrajectoryRecorder::new(&objective, a.iterations);

    let outcome = match a.kind {
        AlgorithmKind::Ncrs => {
            let mut oracle = SignOracle::new(&objective, o.p, oracle_rng)?;
            ncrs_run(&mut oracle, theta1, &config.schedule()?, a.iterations, &mut directions, &mut recorder)?
        }
        AlgorithmKind::NcrsVote => {
            let kind = o.kind.confidence_kind().expect("validated oracle kind");
            let mut oracle = ConfidenceOracle::new(&objective, kind, o.link_function()?, oracle_rng)?;
            let schedule = config.schedule()?;
            ncrs_vote_run(&mut oracle, theta1, &schedule, o.votes, a.iterations, &mut directions, &mut recorder)?
        }
        AlgorithmKind::Rsgf => {
            let alpha = config.rsgf_alpha();
            let bound = rsgf_max_step(objective.smoothness_constant(), config.problem.k);
            if alpha > bound {
                warnings.push(format!("RSGF step {alpha:e} exceeds the descent bound 1/(4L(k+2)) = {bound:e}"));
            }
            let mut oracle = CountingEvaluator::new(&objective);
            rsgf_run(&mut oracle, theta1, alpha, a.mu, a.iterations, &mut directions, &mut recorder)?
        }
    };
    let trajectory = recorder.finish(&outcome);
    if trajectory.queries != expected_queries(config) {
        return Err(Error::domain(format!(
            "query budget mismatch: spent {} but expected {}",
            trajectory.queries,
            expected_queries(config)
        )));
    }

    let first = trajectory.rows.first().expect("T >= 1 gives at least one row");
    let last = trajectory.rows.last().expect("T >= 1 gives at least one row");
    let initial_grad_norm = first.grad_norm;
    let epsilon = match (config.target.epsilon, config.target.relative) {
        (Some(e), _) => Some(e),
        (None, Some(r)) => Some(r * initial_grad_norm),
        (None, None) => None,
    };
    let hit = match epsilon {
        Some(e) if e > 0.0 => iterations_to_target(&trajectory, e),
        _ => None,
    };
    let summary = RunSummary {
        config: config.clone(),
        seed,
        iterations: trajectory.iterations,
        logged_t: trajectory.rows.iter().map(|r| r.t).collect(),
        running_average: trajectory.rows.iter().map(|r| r.mean_grad_norm).collect(),
        initial_grad_norm,
        final_f: objective.value(&trajectory.final_theta),
        final_mean_grad_norm: last.mean_grad_norm,
        final_mean_grad_norm_sq: last.mean_grad_norm_sq,
        best_mean_grad_norm: trajectory.best_mean_grad_norm,
        epsilon,
        iterations_to_target: hit,
        accepted: trajectory.accepted,
        total_queries: trajectory.queries,
        wall_time_secs: start.elapsed().as_secs_f64(),
        warnings,
    };
    Ok((trajectory, summary))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::vector::max_abs_diff;
    use crate::harness::config::{InnerKind, OracleKind};

    fn small() -> RunConfig {
        let mut c = RunConfig::default();
        c.problem.d = 20;
        c.problem.k = 4;
        c.algorithm.iterations = 300;
        c
    }

    #[test]
    fn deterministic_in_config_and_seed() {
        let cfg = small();
        let (a, sa) = run_one(&cfg, 11).unwrap();
        let (b, sb) = run_one(&cfg, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(sa.running_average, sb.running_average);
        let (c, _) = run_one(&cfg, 12).unwrap();
        assert_ne!(a.final_theta, c.final_theta);
    }

    #[test]
    fn perfect_oracle_never_ascends() {
        let mut cfg = small();
        cfg.problem.inner = InnerKind::PureQuadratic;
        let (traj, _) = run_one(&cfg, 3).unwrap();
        for w in traj.rows.windows(2) {
            assert!(w[1].f <= w[0].f, "f rose from {} to {}", w[0].f, w[1].f);
        }
    }

    #[test]
    fn budget_by_algorithm() {
        let mut cfg = small();
        assert_eq!(run_one(&cfg, 1).unwrap().1.total_queries, 300);
        cfg.algorithm.kind = AlgorithmKind::NcrsVote;
        cfg.oracle.kind = OracleKind::EngageAbstain;
        cfg.oracle.votes = 3;
        assert_eq!(run_one(&cfg, 1).unwrap().1.total_queries, 900);
        cfg.algorithm.kind = AlgorithmKind::Rsgf;
        cfg.oracle.kind = OracleKind::Value;
        assert_eq!(run_one(&cfg, 1).unwrap().1.total_queries, 600);
    }

    #[test]
    fn full_rank_matches_dense_objective() {
        let mut cfg = small();
        cfg.problem.k = cfg.problem.d;
        cfg.problem.inner = InnerKind::PureQuadratic;
        let obj = build_objective(&cfg, 5).unwrap();
        let mut rng = RngStream::new(9, 9);
        for _ in 0..20 {
            let x: Vec<f64> = crate::geometry::gaussian_vector(&mut rng, cfg.problem.d);
            let dense = 0.5 * x.iter().map(|v| v * v).sum::<f64>();
            assert!((obj.value(&x) - dense).abs() < 1e-10 * dense.max(1.0));
            assert!(max_abs_diff(&obj.gradient(&x), &x) < 1e-10);
        }
    }

    #[test]
    fn relative_target_resolves_against_start() {
        let mut cfg = small();
        cfg.target.relative = Some(0.5);
        let (traj, s) = run_one(&cfg, 2).unwrap();
        assert_eq!(s.epsilon, Some(0.5 * traj.rows[0].grad_norm));
        if let Some(t) = s.iterations_to_target {
            assert!(s.running_average[t - 1] <= s.epsilon.unwrap());
        }
    }

    #[test]
    fn rsgf_oversized_step_warns() {
        let mut cfg = small();
        cfg.algorithm.kind = AlgorithmKind::Rsgf;
        cfg.oracle.kind = OracleKind::Value;
        cfg.algorithm.alpha = Some(1.0);
        cfg.algorithm.iterations = 3;
        assert_eq!(run_one(&cfg, 1).unwrap().1.warnings.len(), 1);
        cfg.algorithm.alpha = None;
        assert!(run_one(&cfg, 1).unwrap().1.warnings.is_empty());
    }
}
