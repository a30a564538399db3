use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::link::symmetric_grid;
use super::*;
use crate::error::{Error, Result};
use crate::geometry::vector::norm;
use crate::geometry::{gaussian_vector, RngStream, Subspace};
use crate::objectives::{InnerFunction, NuisanceSpec, RidgeObjective};
use crate::oracles::{ConfidenceKind, ConfidenceOracle, LinkFunction, LinkKind};

/// Monte Carlo sample size of the moment checks at scale 1.
pub const DEFAULT_SAMPLES: usize = 1_000_000;
/// One-step simulations per descent configuration at scale 1.
pub const DESCENT_SAMPLES: usize = 100_000;
/// Trials per vote cell at scale 1.
pub const VOTE_TRIALS: usize = 100_000;
/// Random `(θ, α)` configurations per descent family.
pub const DESCENT_CONFIGS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckFamily {
    Identity,
    Descent,
    Vote,
    /// Ranking-penalty checks; only run on request.
    Slow,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Multiplies every default sample size (floored at the minimums).
    pub scale: f64,
    pub include_slow: bool,
    pub workers: usize,
    /// Keep only checks whose name contains this substring.
    pub filter: Option<String>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { seed: 0, scale: 1.0, include_slow: false, workers: 1, filter: None }
    }
}

type CheckFn = Box<dyn Fn(&mut RngStream, f64) -> Result<CheckReport> + Send + Sync>;

/// A named check. The name keys its random stream.
pub struct CheckSpec {
    pub name: String,
    pub family: CheckFamily,
    run: CheckFn,
}

impl CheckSpec {
    fn new(name: String, family: CheckFamily, run: impl Fn(&mut RngStream, f64) -> Result<CheckReport> + Send + Sync + 'static) -> Self {
        Self { name, family, run: Box::new(run) }
    }

    pub fn run(&self, seed: u64, scale: f64) -> CheckReport {
        let mut rng = RngStream::for_role(seed, 0, &self.name);
        match (self.run)(&mut rng, scale) {
            Ok(mut r) => {
                r.name = self.name.clone();
                r
            }
            Err(e) => CheckReport {
                name: self.name.clone(),
                estimates: vec![],
                theory: vec![],
                n_samples: 0,
                std_errors: vec![],
                pass: false,
                rule: format!("error: {e}"),
            },
        }
    }
}

fn scaled(base: usize, scale: f64, min: usize) -> usize {
    ((base as f64 * scale).round() as usize).max(min)
}

fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = norm(&v);
    v.into_iter().map(|x| x / n).collect()
}

fn log_uniform(rng: &mut RngStream, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.uniform() * (hi.ln() - lo.ln())).exp()
}

/// A quadratic_cosine ridge in `d = 20` with `k = 5`, optionally with a
/// nuisance of dimension 4.
fn descent_objective(rng: &mut RngStream, tau: Option<f64>) -> Result<RidgeObjective<f64>> {
    let active = Subspace::random(rng, 20, 5)?;
    let nuisance = match tau {
        Some(tau) => {
            let w = Subspace::random_complement(rng, 4, &active)?;
            Some(NuisanceSpec::new(w, tau, &active)?)
        }
        None => None,
    };
    RidgeObjective::new(active, InnerFunction::default(), nuisance)
}

/// Every check in the suite, in report order.
pub fn suite_specs(include_slow: bool) -> Vec<CheckSpec> {
    use CheckFamily::*;
    let mut specs = Vec::new();

    for (d, k) in [(10, 1), (20, 2), (50, 7)] {
        specs.push(CheckSpec::new(format!("projector_moments/k={k}"), Identity, move |rng, scale| {
            let s = Subspace::random(rng, d, k)?;
            check_projector_moments(&s, scaled(DEFAULT_SAMPLES, scale, MIN_SAMPLES), rng)
        }));
    }
    for case in ["zero", "active", "inactive"] {
        specs.push(CheckSpec::new(format!("cross_moment/{case}"), Identity, move |rng, scale| {
            let s = Subspace::random(rng, 10, 3)?;
            let a = match case {
                "zero" => vec![0.0; 10],
                "active" => unit(s.lift(&gaussian_vector::<f64>(rng, 3))),
                _ => unit(s.reject(&gaussian_vector::<f64>(rng, 10))?),
            };
            check_cross_moment(&s, &a, scaled(DEFAULT_SAMPLES, scale, MIN_SAMPLES), rng)
        }));
    }
    specs.push(CheckSpec::new("halfnormal/unit".into(), Identity, |rng, scale| {
        let g = unit(gaussian_vector(rng, 10));
        check_halfnormal(&g, scaled(DEFAULT_SAMPLES, scale, MIN_SAMPLES), rng)
    }));
    for (kind, scale) in [(LinkKind::Logistic, 1.0), (LinkKind::Probit, 2.0), (LinkKind::Arctan, 1.0)] {
        specs.push(CheckSpec::new(format!("link_reduction/{kind:?}"), Identity, move |_, _| {
            let link = LinkFunction::new(kind, scale)?;
            check_link_reduction(&link, &symmetric_grid(20.0 * scale, 4001))
        }));
    }
    for (label, inner, tau) in [
        ("pure_quadratic", InnerFunction::PureQuadratic, None),
        ("quadratic_cosine", InnerFunction::default(), None),
        ("nearly_ridge", InnerFunction::default(), Some(0.3)),
    ] {
        specs.push(CheckSpec::new(format!("grad_fd/{label}"), Identity, move |rng, _| {
            let active = Subspace::random(rng, 20, 5)?;
            let nuisance = match tau {
                Some(tau) => Some(NuisanceSpec::new(Subspace::random_complement(rng, 4, &active)?, tau, &active)?),
                None => None,
            };
            let obj = RidgeObjective::new(active, inner, nuisance)?;
            check_grad_fd(&obj, 50, 1e-5, rng)
        }));
    }

    for (form, tau) in [("ridge", None), ("nearly_ridge/tau=0.1", Some(0.1)), ("nearly_ridge/tau=0.3", Some(0.3))] {
        for p in [0.1, 0.5] {
            for i in 0..DESCENT_CONFIGS {
                specs.push(CheckSpec::new(format!("descent/{form}/p={p}/{i:02}"), Descent, move |rng, scale| {
                    let obj = descent_objective(rng, tau)?;
                    let mut theta: Vec<f64> = gaussian_vector(rng, 20);
                    theta.iter_mut().for_each(|v| *v *= 2.0);
                    let alpha = log_uniform(rng, 1e-3, 1e-1);
                    check_descent_ncrs(&obj, p, &theta, alpha, scaled(DESCENT_SAMPLES, scale, MIN_SAMPLES), rng)
                }));
            }
        }
    }
    for i in 0..5 {
        specs.push(CheckSpec::new(format!("true_improvement/{i:02}"), Descent, move |rng, scale| {
            let obj = descent_objective(rng, None)?;
            let theta: Vec<f64> = gaussian_vector(rng, 20);
            let alpha = log_uniform(rng, 1e-3, 1e-1);
            check_true_improvement(&obj, &theta, alpha, scaled(DESCENT_SAMPLES, scale, MIN_SAMPLES), rng)
        }));
    }

    for rho in [0.05, 0.2] {
        for votes in [1, 5, 25, 125] {
            specs.push(CheckSpec::new(format!("vote_error/rho={rho}/N={votes}"), Vote, move |rng, scale| {
                let obj = RidgeObjective::exact(Subspace::coordinate_axes(1, &[0])?, InnerFunction::PureQuadratic)?;
                let link = LinkFunction::new(LinkKind::Logistic, 1.0)?;
                let child = RngStream::new(rng.master_seed(), rng.stream_id() ^ 0x766f_7465);
                let mut oracle = ConfidenceOracle::new(obj, ConfidenceKind::EngageAbstain, link, child)?;
                let delta = link.gap_for_rho(rho)?;
                check_vote_error(&mut oracle, delta, votes, scaled(VOTE_TRIALS, scale, MIN_TRIALS))
            }));
        }
    }

    if include_slow {
        for kind in [ConfidenceKind::EngageAbstain, ConfidenceKind::NoisyEngage] {
            for votes in [1, 4, 16] {
                specs.push(CheckSpec::new(format!("rank_penalty/{kind:?}/N={votes}"), Slow, move |rng, scale| {
                    let obj = descent_objective(rng, None)?;
                    let theta: Vec<f64> = gaussian_vector(rng, 20);
                    let link = LinkFunction::new(LinkKind::Logistic, 1.0)?;
                    let n = scaled(DESCENT_SAMPLES, scale, MIN_SAMPLES);
                    check_rank_penalty(&obj, kind, link, &theta, 0.05, votes, n, rng)
                }));
            }
        }
    }
    specs
}

/// Runs the suite on `workers` threads. Reports come back in spec order and
/// do not depend on `workers`.
pub fn run_suite(options: &SuiteOptions) -> Result<Vec<CheckReport>> {
    if !(options.scale > 0.0 && options.scale.is_finite()) {
        return Err(Error::config(format!("suite scale must be > 0, got {}", options.scale)));
    }
    let mut specs = suite_specs(options.include_slow);
    if let Some(f) = &options.filter {
        specs.retain(|s| s.name.contains(f.as_str()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.workers.max(1))
        .build()
        .map_err(|e| Error::domain(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| specs.par_iter().map(|s| s.run(options.seed, options.scale)).collect()))
}
