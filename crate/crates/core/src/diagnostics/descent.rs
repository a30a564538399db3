use std::f64::consts::{E, PI};

use rand::RngCore;

use super::{require_samples, Accumulator, CheckReport, BOUND_SE, DESCENT_SE, MIN_SAMPLES};
use crate::algorithms::vote_failure_factor;
use crate::error::{check_dim, Error, Result};
use crate::geometry::vector::{norm, offset};
use crate::geometry::{gaussian_vector, RngStream};
use crate::objectives::{Objective, RidgeObjective};
use crate::oracles::{ConfidenceKind, ConfidenceOracle, LinkFunction, Sign, SignComparator, SignOracle};

fn check_step(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain(format!("step alpha must be finite and > 0, got {alpha}")));
    }
    Ok(())
}

/// Child stream for oracle noise, derived deterministically from `rng`.
fn fork(rng: &mut RngStream) -> RngStream {
    RngStream::new(rng.next_u64(), rng.next_u64())
}

/// One-step NCRS descent at a fixed `θ`:
/// `p α √(2/π) ‖∇f(θ)‖ <= E[f(θ) - f(θ')] + L k α²/2 (+ 2τα√m with a nuisance)`.
///
/// The report's estimate is `E[f(θ) - f(θ')]` over `n` independent steps
/// and its theory value is the implied lower bound on it.
pub fn check_descent_ncrs(
    objective: &RidgeObjective<f64>,
    p: f64,
    theta: &[f64],
    alpha: f64,
    n: usize,
    rng: &mut RngStream,
) -> Result<CheckReport> {
    require_samples(n, MIN_SAMPLES)?;
    check_dim(objective.dim(), theta.len())?;
    check_step(alpha)?;
    let mut oracle = SignOracle::new(objective, p, fork(rng))?;
    let f0 = objective.value(theta);
    let mut acc = Accumulator::default();
    for _ in 0..n {
        let s: Vec<f64> = gaussian_vector(rng, theta.len());
        let y = offset(theta, alpha, &s);
        let drop = if oracle.compare(theta, &y) == Sign::Plus { f0 - objective.value(&y) } else { 0.0 };
        acc.push(drop);
    }
    let l = objective.smoothness();
    let k = objective.intrinsic_dim() as f64;
    let lhs = p * alpha * (2.0 / PI).sqrt() * norm(&objective.gradient(theta));
    let leak = objective.nuisance().map_or(0.0, |w| 2.0 * w.tau() * alpha * (w.m() as f64).sqrt());
    let bound = lhs - l * k * alpha * alpha / 2.0 - leak;
    let pass = acc.mean() >= bound - DESCENT_SE * acc.stderr();
    let form = if objective.nuisance().is_some() { "nearly_ridge" } else { "ridge" };
    Ok(CheckReport {
        name: format!("descent_ncrs[{form},p={p},alpha={alpha:.3e}]"),
        estimates: vec![acc.mean()],
        theory: vec![bound],
        n_samples: n,
        std_errors: vec![acc.stderr()],
        pass,
        rule: format!("E[f - f'] >= p a sqrt(2/pi) |grad f| - L k a^2/2 - 2 tau a sqrt(m) - {DESCENT_SE} SE"),
    })
}

/// Exact-comparator improvement term at a fixed `θ`, with
/// `Δ = f(θ + αs) - f(θ)`: `E[Δ · 1{Δ < 0}] <= -α/√(2π) ‖∇f‖ + L k α²/2`.
pub fn check_true_improvement(
    objective: &RidgeObjective<f64>,
    theta: &[f64],
    alpha: f64,
    n: usize,
    rng: &mut RngStream,
) -> Result<CheckReport> {
    require_samples(n, MIN_SAMPLES)?;
    check_dim(objective.dim(), theta.len())?;
    check_step(alpha)?;
    let f0 = objective.value(theta);
    let mut acc = Accumulator::default();
    for _ in 0..n {
        let s: Vec<f64> = gaussian_vector(rng, theta.len());
        let delta = objective.value(&offset(theta, alpha, &s)) - f0;
        acc.push(delta.min(0.0));
    }
    let l = objective.smoothness();
    let k = objective.intrinsic_dim() as f64;
    let bound = -alpha / (2.0 * PI).sqrt() * norm(&objective.gradient(theta)) + l * k * alpha * alpha / 2.0;
    Ok(CheckReport {
        name: format!("true_improvement[alpha={alpha:.3e}]"),
        estimates: vec![acc.mean()],
        theory: vec![bound],
        n_samples: n,
        std_errors: vec![acc.stderr()],
        pass: acc.mean() <= bound + DESCENT_SE * acc.stderr(),
        rule: format!("E[D 1(D<0)] <= -a/sqrt(2 pi) |grad f| + L k a^2/2 + {DESCENT_SE} SE"),
    })
}

/// Ranking-error penalty of the vote rule at a fixed `θ`:
/// `|E[Δ (1_X - 1_Y)]| <= γ (α √(2/π) ‖∇f‖ + L k α²/2) + (2C + 4/3) / (e c N)`,
/// where `X` is acceptance, `Y = {Δ < 0}`, and `(c, r)` is the certified
/// linearity pair of the oracle (`ρ(t) >= c t` on `[0, r]`).
#[allow(clippy::too_many_arguments)]
pub fn check_rank_penalty(
    objective: &RidgeObjective<f64>,
    kind: ConfidenceKind,
    link: LinkFunction,
    theta: &[f64],
    alpha: f64,
    votes: usize,
    n: usize,
    rng: &mut RngStream,
) -> Result<CheckReport> {
    require_samples(n, MIN_SAMPLES)?;
    check_dim(objective.dim(), theta.len())?;
    check_step(alpha)?;
    if votes == 0 {
        return Err(Error::domain("vote count N must be >= 1"));
    }
    let mut oracle = ConfidenceOracle::new(objective, kind, link, fork(rng))?;
    let consts = oracle.constants();
    // the grid certificate covers ρ(t) >= (c/2) t on [0, r]
    let c_cert = 0.5 * consts.c;
    let big_c = consts.second_moment;
    let gamma = vote_failure_factor(votes, oracle.signal(consts.r), big_c);
    let f0 = objective.value(theta);
    let mut acc = Accumulator::default();
    for _ in 0..n {
        let s: Vec<f64> = gaussian_vector(rng, theta.len());
        let delta = objective.value(&offset(theta, alpha, &s)) - f0;
        let total: f64 = (0..votes).map(|_| oracle.score_for_gap(-delta)).sum();
        let x = total > 0.0;
        let y = delta < 0.0;
        acc.push(delta * (f64::from(u8::from(x)) - f64::from(u8::from(y))));
    }
    let l = objective.smoothness();
    let k = objective.intrinsic_dim() as f64;
    let g = norm(&objective.gradient(theta));
    let bound = gamma * (alpha * (2.0 / PI).sqrt() * g + l * k * alpha * alpha / 2.0)
        + (2.0 * big_c + 4.0 / 3.0) / (E * c_cert * votes as f64);
    let estimate = acc.mean().abs();
    Ok(CheckReport {
        name: format!("rank_penalty[{kind:?},N={votes},alpha={alpha:.3e}]"),
        estimates: vec![estimate],
        theory: vec![bound],
        n_samples: n,
        std_errors: vec![acc.stderr()],
        pass: estimate <= bound + BOUND_SE * acc.stderr(),
        rule: format!("|E[D (1_X - 1_Y)]| <= gamma (a sqrt(2/pi) |grad f| + L k a^2/2) + (2C+4/3)/(e c N) + {BOUND_SE} SE"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Subspace;
    use crate::objectives::{InnerFunction, NuisanceSpec};
    use crate::oracles::LinkKind;

    fn pure(d: usize, k: usize) -> RidgeObjective<f64> {
        let axes: Vec<usize> = (0..k).collect();
        RidgeObjective::exact(Subspace::coordinate_axes(d, &axes).unwrap(), InnerFunction::PureQuadratic).unwrap()
    }

    #[test]
    fn perfect_oracle_quadratic_has_slack() {
        let obj = pure(8, 5);
        let mut theta = vec![0.0; 8];
        theta[0] = 1.0; // ‖∇f‖ = 1
        let mut rng = RngStream::new(1, 1);
        let r = check_descent_ncrs(&obj, 0.5, &theta, 0.01, MIN_SAMPLES, &mut rng).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.estimates[0] > r.theory[0] + 5.0 * r.std_errors[0], "{r:?}");
    }

    #[test]
    fn vanishing_step_degenerates_gracefully() {
        let obj = pure(8, 5);
        let theta = vec![0.3; 8];
        let r = check_descent_ncrs(&obj, 0.1, &theta, 1e-6, MIN_SAMPLES, &mut RngStream::new(2, 2)).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.estimates[0].abs() < 1e-5 && r.theory[0].abs() < 1e-6);
    }

    #[test]
    fn nearly_ridge_form() {
        let mut rng = RngStream::new(3, 3);
        let active = Subspace::random(&mut rng, 20, 5).unwrap();
        let w = Subspace::random_complement(&mut rng, 4, &active).unwrap();
        let nuisance = NuisanceSpec::new(w, 0.3, &active).unwrap();
        let obj = RidgeObjective::new(active, InnerFunction::default(), Some(nuisance)).unwrap();
        let theta: Vec<f64> = gaussian_vector(&mut rng, 20);
        let r = check_descent_ncrs(&obj, 0.25, &theta, 0.02, MIN_SAMPLES, &mut rng).unwrap();
        assert!(r.name.contains("nearly_ridge") && r.pass, "{r:?}");
    }

    #[test]
    fn improvement_term() {
        let obj = RidgeObjective::exact(
            Subspace::random(&mut RngStream::new(4, 4), 12, 3).unwrap(),
            InnerFunction::default(),
        )
        .unwrap();
        let theta: Vec<f64> = gaussian_vector(&mut RngStream::new(5, 5), 12);
        let r = check_true_improvement(&obj, &theta, 0.01, MIN_SAMPLES, &mut RngStream::new(6, 6)).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn rank_penalty_bound() {
        let obj = pure(10, 5);
        let theta = vec![0.5; 10];
        let link = LinkFunction::new(LinkKind::Logistic, 1.0).unwrap();
        for votes in [1, 8] {
            let r = check_rank_penalty(&obj, ConfidenceKind::EngageAbstain, link, &theta, 0.05, votes, MIN_SAMPLES, &mut RngStream::new(7, 7))
                .unwrap();
            assert!(r.pass, "{r:?}");
        }
        assert!(check_rank_penalty(&obj, ConfidenceKind::EngageAbstain, link, &theta, 0.05, 0, MIN_SAMPLES, &mut RngStream::new(7, 7)).is_err());
    }
}
