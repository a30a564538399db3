//! Monte Carlo and deterministic certification of the identities and
//! one-step inequalities the optimizers rely on.
//!
//! Tolerances: equalities pass within 4 standard errors, one-sided vote
//! bounds allow 3, descent bounds allow 4, deterministic identities 1e-12.
//! Every check owns its stream, so a report is a pure function of the
//! master seed and the check name.

mod descent;
mod gradient;
mod link;
mod moments;
mod suite;
mod vote;

use serde::{Deserialize, Serialize};

pub use descent::{check_descent_ncrs, check_rank_penalty, check_true_improvement};
pub use gradient::check_grad_fd;
pub use link::check_link_reduction;
pub use moments::{check_cross_moment, check_halfnormal, check_projector_moments};
pub use suite::{run_suite, suite_specs, CheckFamily, CheckSpec, SuiteOptions, DEFAULT_SAMPLES, DESCENT_CONFIGS, DESCENT_SAMPLES, VOTE_TRIALS};
pub use vote::check_vote_error;

/// Band width for Monte Carlo equalities.
pub const EQUALITY_SE: f64 = 4.0;
/// Slack for the descent inequalities.
pub const DESCENT_SE: f64 = 4.0;
/// Slack for the vote error and ranking-penalty bounds.
pub const BOUND_SE: f64 = 3.0;
/// Absolute tolerance for deterministic identities.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Smallest Monte Carlo sample the moment and descent checks accept.
pub const MIN_SAMPLES: usize = 100_000;
/// Smallest trial count for the vote check.
pub const MIN_TRIALS: usize = 10_000;

/// Outcome of one check. `estimates`, `theory` and `std_errors` line up
/// index by index; for inequalities `theory` holds the bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub estimates: Vec<f64>,
    pub theory: Vec<f64>,
    pub n_samples: usize,
    pub std_errors: Vec<f64>,
    pub pass: bool,
    pub rule: String,
}

impl CheckReport {
    /// Largest `|estimate - theory| / se` over components (0 when exact).
    pub fn max_z(&self) -> f64 {
        self.estimates
            .iter()
            .zip(&self.theory)
            .zip(&self.std_errors)
            .map(|((e, t), s)| {
                let d = (e - t).abs();
                if d == 0.0 {
                    0.0
                } else if *s > 0.0 {
                    d / s
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Running mean and variance (Welford).
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Accumulator {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
        }
    }
}

pub(crate) fn within_band(estimate: f64, theory: f64, se: f64, width: f64) -> bool {
    (estimate - theory).abs() <= width * se
}

pub(crate) fn require_samples(n: usize, min: usize) -> crate::Result<()> {
    if n < min {
        return Err(crate::Error::domain(format!("need at least {min} samples, got {n}")));
    }
    Ok(())
}
