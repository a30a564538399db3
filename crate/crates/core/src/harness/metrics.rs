use serde::{Deserialize, Serialize};

use crate::algorithms::Trajectory;
use crate::error::{Error, Result};

/// Smallest logged `t` whose running-average gradient norm is `<= epsilon`.
/// Non-positive or non-finite `epsilon` never matches.
pub fn iterations_to_target(trajectory: &Trajectory, epsilon: f64) -> Option<usize> {
    first_below(trajectory.rows.iter().map(|r| (r.t, r.mean_grad_norm)), epsilon)
}

/// Same rule over bare `(t, running average)` pairs.
pub fn first_below(series: impl IntoIterator<Item = (usize, f64)>, epsilon: f64) -> Option<usize> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return None;
    }
    series.into_iter().find(|&(_, v)| v <= epsilon).map(|(t, _)| t)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanStderr {
    pub mean: f64,
    /// Sample standard deviation over `√n`; zero for a single value.
    pub stderr: f64,
    pub n: usize,
}

pub fn mean_stderr(values: &[f64]) -> Option<MeanStderr> {
    let n = values.len();
    if n == 0 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let stderr = if n > 1 {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (var / n as f64).sqrt()
    } else {
        0.0
    };
    Some(MeanStderr { mean, stderr, n })
}

/// One point of a scaling study: axis value `x`, mean `y`, its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingCell {
    pub x: f64,
    pub mean: f64,
    pub stderr: f64,
}

impl ScalingCell {
    pub fn new(x: f64, mean: f64, stderr: f64) -> Self {
        Self { x, mean, stderr }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares of `ln mean` on `ln x`. A perfectly flat response
/// has `r² = 1`.
pub fn fit_scaling(cells: &[ScalingCell]) -> Result<ScalingFit> {
    if cells.len() < 3 {
        return Err(Error::domain(format!("scaling fit needs at least 3 cells, got {}", cells.len())));
    }
    for c in cells {
        if !(c.x > 0.0 && c.mean > 0.0 && c.x.is_finite() && c.mean.is_finite()) {
            return Err(Error::domain(format!("scaling fit needs positive values, got x={} mean={}", c.x, c.mean)));
        }
    }
    let n = cells.len() as f64;
    let xs: Vec<f64> = cells.iter().map(|c| c.x.ln()).collect();
    let ys: Vec<f64> = cells.iter().map(|c| c.mean.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::domain("scaling fit needs at least two distinct x values"));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let ss_res: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Ok(ScalingFit { slope, intercept, r_squared })
}
