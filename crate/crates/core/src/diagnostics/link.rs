use super::{CheckReport, IDENTITY_TOL};
use crate::error::{Error, Result};
use crate::oracles::LinkFunction;

const CERT_POINTS: usize = 1000;

/// Deterministic link identities on `grid`:
/// 0. `|sign(Δ)(2σ(Δ) - 1) - ρ(|Δ|)|`
/// 1. `|σ(-u) - (1 - σ(u))|`
/// 2. largest decrease of `ρ` along the sorted `|Δ|` values
/// 3. `min (ρ(t) - (c/2) t)` over `t = r/1000, ..., r`, which must be `>= 0`
///
/// Components 0 to 2 must stay within 1e-12.
pub fn check_link_reduction(link: &LinkFunction, grid: &[f64]) -> Result<CheckReport> {
    if grid.is_empty() {
        return Err(Error::domain("link check needs a nonempty grid"));
    }
    if grid.iter().any(|d| !d.is_finite()) {
        return Err(Error::domain("link check grid must be finite"));
    }
    link.validate()?;
    let reduction = grid
        .iter()
        .map(|&d| {
            let sign = if d > 0.0 {
                1.0
            } else if d < 0.0 {
                -1.0
            } else {
                0.0
            };
            (sign * (2.0 * link.sigma(d) - 1.0) - link.rho(d.abs())).abs()
        })
        .fold(0.0, f64::max);
    let antisymmetry = grid
        .iter()
        .map(|&u| (link.sigma(-u) - (1.0 - link.sigma(u))).abs())
        .fold(0.0, f64::max);
    let mut gaps: Vec<f64> = grid.iter().map(|d| d.abs()).collect();
    gaps.sort_by(f64::total_cmp);
    let drop = gaps
        .windows(2)
        .map(|w| (link.rho(w[0]) - link.rho(w[1])).max(0.0))
        .fold(0.0, f64::max);
    let (c, r) = link.local_linearity_constants();
    let margin = (1..=CERT_POINTS)
        .map(|i| {
            let t = r * i as f64 / CERT_POINTS as f64;
            link.rho(t) - 0.5 * c * t
        })
        .fold(f64::INFINITY, f64::min);
    let pass = reduction <= IDENTITY_TOL && antisymmetry <= IDENTITY_TOL && drop <= IDENTITY_TOL && margin >= 0.0;
    Ok(CheckReport {
        name: format!("link_reduction[{:?},scale={}]", link.kind, link.scale),
        estimates: vec![reduction, antisymmetry, drop, margin],
        theory: vec![0.0, 0.0, 0.0, 0.0],
        n_samples: grid.len(),
        std_errors: vec![0.0; 4],
        pass,
        rule: format!("reduction, antisymmetry and monotonicity within {IDENTITY_TOL:e}; certificate margin >= 0"),
    })
}

/// `n` points evenly spaced on `[-half_width, half_width]`.
pub(crate) fn symmetric_grid(half_width: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| -half_width + 2.0 * half_width * i as f64 / (n - 1) as f64).collect()
}
