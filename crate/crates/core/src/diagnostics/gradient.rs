use super::CheckReport;
use crate::error::{Error, Result};
use crate::geometry::vector::{norm, sub};
use crate::geometry::{gaussian_vector, RngStream};
use crate::objectives::Objective;

/// Largest relative error allowed between analytic and central-difference gradients.
pub const FD_TOL: f64 = 1e-4;
/// Scale of the sampled evaluation points.
const POINT_SCALE: f64 = 2.0;

/// Largest `‖∇f(x) - fd(x)‖ / max(‖∇f(x)‖, 1)` over `points` draws of
/// `x ~ N(0, 4 I)`, with central differences of step `h`.
pub fn check_grad_fd<O: Objective<f64>>(objective: &O, points: usize, h: f64, rng: &mut RngStream) -> Result<CheckReport> {
    if !(1e-7..=1e-3).contains(&h) {
        return Err(Error::domain(format!("finite-difference step must lie in [1e-7, 1e-3], got {h}")));
    }
    if points == 0 {
        return Err(Error::domain("gradient check needs at least one point"));
    }
    let d = objective.dim();
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let mut x: Vec<f64> = gaussian_vector(rng, d);
        x.iter_mut().for_each(|v| *v *= POINT_SCALE);
        let analytic = objective.gradient(&x);
        let fd: Vec<f64> = (0..d)
            .map(|i| {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[i] += h;
                xm[i] -= h;
                (objective.value(&xp) - objective.value(&xm)) / (2.0 * h)
            })
            .collect();
        worst = worst.max(norm(&sub(&analytic, &fd)) / norm(&analytic).max(1.0));
    }
    Ok(CheckReport {
        name: format!("grad_fd[d={d},h={h:e}]"),
        estimates: vec![worst],
        theory: vec![FD_TOL],
        n_samples: points,
        std_errors: vec![0.0],
        pass: worst <= FD_TOL,
        rule: format!("max relative error <= {FD_TOL:e}"),
    })
}
