use std::f64::consts::{E, LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Problem constants feeding the vote-NCRS parameter recipe.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoteRecipeInput {
    pub epsilon: f64,
    /// `L_f`
    pub smoothness: f64,
    pub k: usize,
    /// `Δf = f(θ¹) - f★`
    pub delta_f: f64,
    pub c: f64,
    /// Second-moment constant `C`.
    pub big_c: f64,
    /// `ρ(r)`
    pub rho_r: f64,
}

/// `(α, T, N)` that make the vote-NCRS averaged gradient norm at most `ε`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoteParams {
    pub epsilon: f64,
    pub alpha: f64,
    pub iterations: u64,
    pub comparisons: u64,
    pub total_comparisons: u64,
    /// `l_{c,C} = (2C + 4/3) / (e c)`
    pub l_cc: f64,
    /// `⌈(2C + 4/3) ln 2 / ρ(r)⌉`, the vote count that forces `γ_{N,r} <= ½`.
    pub gamma_floor: u64,
}

fn to_count(x: f64, what: &str) -> Result<u64> {
    let c = x.ceil();
    if c.is_finite() && c < u64::MAX as f64 {
        Ok(c as u64)
    } else {
        Err(Error::domain(format!("{what} = {x} does not fit a 64-bit count")))
    }
}

pub fn vote_params(input: &VoteRecipeInput) -> Result<VoteParams> {
    let VoteRecipeInput { epsilon, smoothness, k, delta_f, c, big_c, rho_r } = *input;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    for (name, v) in [("L_f", smoothness), ("delta_f", delta_f), ("c", c), ("C", big_c), ("rho_r", rho_r)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::domain(format!("{name} must be finite and > 0, got {v}")));
        }
    }
    if k == 0 {
        return Err(Error::domain("k must be >= 1"));
    }
    let kf = k as f64;
    let vote_const = 2.0 * big_c + 4.0 / 3.0;
    let l_cc = vote_const / (E * c);
    let alpha = 2.0 * epsilon / (9.0 * (2.0 * PI).sqrt() * smoothness * kf);
    let eps2 = epsilon * epsilon;
    let iterations = to_count(54.0 * PI * smoothness * kf * delta_f / eps2, "T")?;
    let from_penalty = 54.0 * PI * smoothness * kf * l_cc / eps2;
    let from_gamma = vote_const * LN_2 / rho_r;
    let comparisons = to_count(from_penalty.max(from_gamma), "N")?;
    let gamma_floor = to_count(from_gamma, "N")?;
    let total_comparisons = comparisons
        .checked_mul(iterations)
        .ok_or_else(|| Error::domain("N*T overflows a 64-bit count"))?;
    Ok(VoteParams { epsilon, alpha, iterations, comparisons, total_comparisons, l_cc, gamma_floor })
}

/// `γ_{N,r} = exp(-N ρ(r) / (2C + 4/3))`.
pub fn vote_failure_factor(votes: usize, rho_r: f64, big_c: f64) -> f64 {
    (-(votes as f64) * rho_r / (2.0 * big_c + 4.0 / 3.0)).exp()
}
