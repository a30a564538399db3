use crate::error::{Error, Result};
use crate::geometry::vector::offset;
use crate::geometry::{fill_gaussian, RngStream};
use crate::oracles::ValueOracle;
use crate::scalar::Real;

use super::ncrs::validate;
use super::trajectory::{Instrument, RunOutcome, StepRecord};

/// Largest step the one-step RSGF descent bound admits: `1 / (4 L (k+2))`.
pub fn rsgf_max_step(smoothness: f64, k: usize) -> f64 {
    1.0 / (4.0 * smoothness * (k as f64 + 2.0))
}

/// Two-point random gradient-free descent:
/// `θ ← θ - α · (h(θ + μs) - h(θ)) / μ · s` with `s ~ N(0, I_d)`.
/// Every step moves, so `accepted` is always true.
pub fn rsgf_run<T, V, I>(
    oracle: &mut V,
    theta1: Vec<T>,
    alpha: f64,
    mu: f64,
    iterations: usize,
    rng: &mut RngStream,
    instrument: &mut I,
) -> Result<RunOutcome<T>>
where
    T: Real,
    V: ValueOracle<T> + ?Sized,
    I: Instrument<T> + ?Sized,
{
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::config(format!("RSGF step alpha must be > 0, got {alpha}")));
    }
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::config(format!("RSGF smoothing radius mu must be > 0, got {mu}")));
    }
    let d = oracle.dim();
    validate(d, &theta1, iterations, None)?;
    let (alpha_t, mu_t) = (T::lit(alpha), T::lit(mu));
    let mut theta = theta1;
    let mut direction = vec![T::zero(); d];
    for t in 1..=iterations {
        fill_gaussian(rng, &mut direction);
        let probe = offset(&theta, mu_t, &direction);
        let slope = (oracle.value(&probe) - oracle.value(&theta)) / mu_t;
        instrument.observe(&StepRecord { t, theta: &theta, accepted: true, queries: oracle.queries() });
        theta = offset(&theta, -alpha_t * slope, &direction);
    }
    Ok(RunOutcome { final_theta: theta, iterations, accepted: iterations, queries: oracle.queries() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::NoInstrument;
    use crate::geometry::{gaussian_vector, Subspace};
    use crate::objectives::{InnerFunction, Objective, RidgeObjective};
    use crate::oracles::CountingEvaluator;

    #[test]
    fn stationary_flat_point_does_not_move() {
        // ∇h(0) = 0 and the difference quotient is ½μ(Us)², so nothing moves
        let active = Subspace::coordinate_axes(3, &[0]).unwrap();
        let f = RidgeObjective::exact(active, InnerFunction::PureQuadratic).unwrap();
        let mut o = CountingEvaluator::new(&f);
        let out = rsgf_run(&mut o, vec![0.0; 3], 0.01, 1e-12, 5, &mut RngStream::new(0, 0), &mut NoInstrument).unwrap();
        assert!(out.final_theta.iter().all(|x: &f64| x.abs() < 1e-10));
        assert_eq!(out.queries, 10);
    }

    #[test]
    fn kernel_only_objective_never_moves() {
        let mut rng = RngStream::new(4, 0);
        let active = Subspace::random(&mut rng, 6, 2).unwrap();
        // θ in ker(U) and a pure quadratic: along any s, h changes only by ½μ²‖Us‖²
        let f = RidgeObjective::exact(active.clone(), InnerFunction::PureQuadratic).unwrap();
        let theta1 = active.reject(&gaussian_vector::<f64>(&mut rng, 6)).unwrap();
        let mut o = CountingEvaluator::new(&f);
        let out = rsgf_run(&mut o, theta1.clone(), 0.1, 1e-9, 3, &mut rng, &mut NoInstrument).unwrap();
        assert!(f.value(&out.final_theta) < 1e-15);
    }

    #[test]
    fn mean_update_is_minus_alpha_gradient() {
        // E[⟨g,s⟩s] = g, so the averaged update with tiny μ is -α∇h
        let mut rng = RngStream::new(5, 0);
        let active = Subspace::random(&mut rng, 8, 3).unwrap();
        let f = RidgeObjective::exact(active, InnerFunction::PureQuadratic).unwrap();
        let theta = f.initial_point(&mut rng, 2.0).unwrap();
        let grad = f.gradient(&theta);
        let alpha = 0.05;
        let n = 100_000;
        let mut mean = [0.0; 8];
        let mut dirs = RngStream::new(5, 1);
        for _ in 0..n {
            let mut o = CountingEvaluator::new(&f);
            let out = rsgf_run(&mut o, theta.clone(), alpha, 1e-6, 1, &mut dirs, &mut NoInstrument).unwrap();
            for (m, (a, b)) in mean.iter_mut().zip(out.final_theta.iter().zip(&theta)) {
                *m += (a - b) / n as f64;
            }
        }
        let target: Vec<f64> = grad.iter().map(|g| -alpha * g).collect();
        let err: f64 = mean.iter().zip(&target).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let scale: f64 = target.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(err <= 0.02 * scale, "relative error {}", err / scale);
    }

    #[test]
    fn rejects_bad_params() {
        let active = Subspace::coordinate_axes(2, &[0]).unwrap();
        let f = RidgeObjective::exact(active, InnerFunction::PureQuadratic).unwrap();
        let mut o = CountingEvaluator::new(&f);
        let mut rng = RngStream::new(0, 0);
        assert!(rsgf_run(&mut o, vec![0.0; 2], 0.1, 0.0, 3, &mut rng, &mut NoInstrument).is_err());
        assert!(rsgf_run(&mut o, vec![0.0; 2], -0.1, 0.1, 3, &mut rng, &mut NoInstrument).is_err());
        assert_eq!(rsgf_max_step(10.0, 10), 1.0 / 480.0);
    }
}
