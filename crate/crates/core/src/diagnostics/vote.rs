use super::{CheckReport, BOUND_SE, MIN_TRIALS};
use crate::algorithms::vote_failure_factor;
use crate::error::{Error, Result};
use crate::objectives::Objective;
use crate::oracles::ConfidenceOracle;

/// Wrong-decision frequency of an `N`-vote aggregate on a frozen pair with
/// gap `Δ = f(x) - f(y)` against `exp(-N ρ(|Δ|) / (2C + 4/3))`.
///
/// A decision is wrong when acceptance (`Σ scores > 0`) disagrees with true
/// improvement (`Δ > 0`); an all-abstain tie on an improving pair counts.
pub fn check_vote_error<O: Objective<f64>>(
    oracle: &mut ConfidenceOracle<f64, O>,
    delta: f64,
    votes: usize,
    trials: usize,
) -> Result<CheckReport> {
    if votes == 0 {
        return Err(Error::domain("vote count N must be >= 1"));
    }
    if delta == 0.0 || !delta.is_finite() {
        return Err(Error::domain(format!("gap must be finite and nonzero, got {delta}")));
    }
    if trials < MIN_TRIALS {
        return Err(Error::domain(format!("need at least {MIN_TRIALS} trials, got {trials}")));
    }
    let improving = delta > 0.0;
    let wrong = (0..trials)
        .filter(|_| {
            let total: f64 = (0..votes).map(|_| oracle.score_for_gap(delta)).sum();
            (total > 0.0) != improving
        })
        .count();
    let q = wrong as f64 / trials as f64;
    let se = (q * (1.0 - q) / trials as f64).sqrt();
    let signal = oracle.signal(delta.abs());
    let bound = vote_failure_factor(votes, signal, oracle.constants().second_moment);
    Ok(CheckReport {
        name: format!("vote_error[{:?},rho={signal:.3},N={votes}]", oracle.kind()),
        estimates: vec![q],
        theory: vec![bound],
        n_samples: trials,
        std_errors: vec![se],
        pass: q <= bound + BOUND_SE * se,
        rule: format!("frequency <= exp(-N rho / (2C + 4/3)) + {BOUND_SE} SE"),
    })
}
