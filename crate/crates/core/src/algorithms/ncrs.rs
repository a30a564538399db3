use crate::error::{check_dim, Error, Result};
use crate::geometry::vector::offset;
use crate::geometry::{fill_gaussian, RngStream};
use crate::oracles::{ScoreComparator, Sign, SignComparator};
use crate::scalar::Real;

use super::schedule::StepSchedule;
use super::trajectory::{Instrument, RunOutcome, StepRecord};

pub(crate) fn validate(d: usize, theta1: &[impl Real], iterations: usize, schedule: Option<&StepSchedule>) -> Result<()> {
    check_dim(d, theta1.len())?;
    if iterations == 0 {
        return Err(Error::config("iteration count T must be >= 1"));
    }
    if let Some(s) = schedule {
        if iterations > s.horizon() {
            return Err(Error::config(format!(
                "T={iterations} exceeds the schedule horizon {}",
                s.horizon()
            )));
        }
    }
    Ok(())
}

/// Noisy-comparison random search.
///
/// Each iteration draws `s ~ N(0, I_d)`, asks `R(θ, θ + α_t s)` once, and
/// moves to the candidate iff the answer is `+1`.
pub fn ncrs_run<T, C, I>(
    oracle: &mut C,
    theta1: Vec<T>,
    schedule: &StepSchedule,
    iterations: usize,
    rng: &mut RngStream,
    instrument: &mut I,
) -> Result<RunOutcome<T>>
where
    T: Real,
    C: SignComparator<T> + ?Sized,
    I: Instrument<T> + ?Sized,
{
    let d = oracle.dim();
    validate(d, &theta1, iterations, Some(schedule))?;
    let mut theta = theta1;
    let mut direction = vec![T::zero(); d];
    let mut accepted = 0;
    for t in 1..=iterations {
        fill_gaussian(rng, &mut direction);
        let step = T::lit(schedule.rate(t));
        let candidate = offset(&theta, step, &direction);
        let take = oracle.compare(&theta, &candidate) == Sign::Plus;
        instrument.observe(&StepRecord { t, theta: &theta, accepted: take, queries: oracle.queries() });
        if take {
            theta = candidate;
            accepted += 1;
        }
    }
    Ok(RunOutcome { final_theta: theta, iterations, accepted, queries: oracle.queries() })
}

/// NCRS with a confidence-weighted vote: `N` scores on the same pair,
/// accept iff their sum is strictly positive.
pub fn ncrs_vote_run<T, C, I>(
    oracle: &mut C,
    theta1: Vec<T>,
    schedule: &StepSchedule,
    votes: usize,
    iterations: usize,
    rng: &mut RngStream,
    instrument: &mut I,
) -> Result<RunOutcome<T>>
where
    T: Real,
    C: ScoreComparator<T> + ?Sized,
    I: Instrument<T> + ?Sized,
{
    if votes == 0 {
        return Err(Error::config("vote count N must be >= 1"));
    }
    let d = oracle.dim();
    validate(d, &theta1, iterations, Some(schedule))?;
    let mut theta = theta1;
    let mut direction = vec![T::zero(); d];
    let mut accepted = 0;
    for t in 1..=iterations {
        fill_gaussian(rng, &mut direction);
        let step = T::lit(schedule.rate(t));
        let candidate = offset(&theta, step, &direction);
        let total: f64 = (0..votes).map(|_| oracle.score(&theta, &candidate)).sum();
        let take = total > 0.0;
        instrument.observe(&StepRecord { t, theta: &theta, accepted: take, queries: oracle.queries() });
        if take {
            theta = candidate;
            accepted += 1;
        }
    }
    Ok(RunOutcome { final_theta: theta, iterations, accepted, queries: oracle.queries() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::NoInstrument;
    use crate::geometry::{gaussian_vector, Subspace};
    use crate::objectives::{InnerFunction, Objective, RidgeObjective};
    use crate::oracles::{ConfidenceKind, ConfidenceOracle, LinkFunction, SignOracle};

    struct Constant(Sign, u64, usize);

    impl SignComparator<f64> for Constant {
        fn dim(&self) -> usize {
            self.2
        }
        fn compare(&mut self, _: &[f64], _: &[f64]) -> Sign {
            self.1 += 1;
            self.0
        }
        fn queries(&self) -> u64 {
            self.1
        }
    }

    struct FixedScores(Vec<f64>, usize, u64);

    impl ScoreComparator<f64> for FixedScores {
        fn dim(&self) -> usize {
            2
        }
        fn score(&mut self, _: &[f64], _: &[f64]) -> f64 {
            let s = self.0[self.1 % self.0.len()];
            self.1 += 1;
            self.2 += 1;
            s
        }
        fn queries(&self) -> u64 {
            self.2
        }
    }

    #[test]
    fn always_minus_never_moves() {
        let mut o = Constant(Sign::Minus, 0, 4);
        let theta1 = vec![1.0, -2.0, 3.0, 0.5];
        let sched = StepSchedule::constant(0.3, 50).unwrap();
        let out = ncrs_run(&mut o, theta1.clone(), &sched, 50, &mut RngStream::new(0, 0), &mut NoInstrument).unwrap();
        assert_eq!(out.final_theta, theta1);
        assert_eq!(out.accepted, 0);
        assert_eq!(out.queries, 50);
    }

    #[test]
    fn always_plus_is_a_random_walk() {
        let mut o = Constant(Sign::Plus, 0, 3);
        let sched = StepSchedule::constant(0.2, 20).unwrap();
        let out = ncrs_run(&mut o, vec![0.0; 3], &sched, 20, &mut RngStream::new(5, 5), &mut NoInstrument).unwrap();
        // replay the same direction stream by hand
        let mut rng = RngStream::new(5, 5);
        let mut theta = vec![0.0; 3];
        for _ in 0..20 {
            let s: Vec<f64> = gaussian_vector(&mut rng, 3);
            theta = offset(&theta, 0.2, &s);
        }
        assert_eq!(out.final_theta, theta);
        assert_eq!(out.accepted, 20);
    }

    #[test]
    fn improve_or_stay_structure() {
        let mut rng = RngStream::new(1, 0);
        let active = Subspace::random(&mut rng, 12, 3).unwrap();
        let f = RidgeObjective::exact(active, InnerFunction::default()).unwrap();
        let mut oracle = SignOracle::new(&f, 0.2, RngStream::new(1, 1)).unwrap();
        let sched = StepSchedule::constant(0.1, 300).unwrap();
        let mut dirs = RngStream::new(1, 2);
        let mut replay = dirs.clone();
        let mut seen: Vec<(Vec<f64>, bool)> = Vec::new();
        let mut hook = |r: &StepRecord<'_, f64>| seen.push((r.theta.to_vec(), r.accepted));
        let theta1 = f.initial_point(&mut rng, 3.0).unwrap();
        let out = ncrs_run(&mut oracle, theta1, &sched, 300, &mut dirs, &mut hook).unwrap();
        let mut next: Vec<Vec<f64>> = seen.iter().skip(1).map(|(th, _)| th.clone()).collect();
        next.push(out.final_theta.clone());
        for ((theta, acc), after) in seen.iter().zip(&next) {
            let s: Vec<f64> = gaussian_vector(&mut replay, 12);
            let candidate = offset(theta, 0.1, &s);
            if *acc {
                assert_eq!(after, &candidate);
            } else {
                assert_eq!(after, theta);
            }
        }
    }

    #[test]
    fn perfect_oracle_is_monotone() {
        let mut rng = RngStream::new(2, 0);
        let active = Subspace::random(&mut rng, 20, 5).unwrap();
        let f = RidgeObjective::exact(active, InnerFunction::PureQuadratic).unwrap();
        let mut oracle = SignOracle::new(&f, 0.5, RngStream::new(2, 1)).unwrap();
        let sched = StepSchedule::constant(0.05, 2000).unwrap();
        let mut values = Vec::new();
        let mut hook = |r: &StepRecord<'_, f64>| values.push(f.value(r.theta));
        let theta1 = f.initial_point(&mut rng, 5.0).unwrap();
        ncrs_run(&mut oracle, theta1, &sched, 2000, &mut RngStream::new(2, 2), &mut hook).unwrap();
        assert!(values.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!(values.last().unwrap() < &values[0]);
    }

    #[test]
    fn vote_tie_stays_and_all_plus_accepts() {
        let sched = StepSchedule::constant(0.5, 10).unwrap();
        let mut o = FixedScores(vec![1.0, -1.0], 0, 0);
        let out = ncrs_vote_run(&mut o, vec![0.0, 0.0], &sched, 2, 10, &mut RngStream::new(0, 0), &mut NoInstrument).unwrap();
        assert_eq!(out.accepted, 0);
        assert_eq!(out.final_theta, vec![0.0, 0.0]);
        assert_eq!(out.queries, 20);
        let mut o = FixedScores(vec![1.0], 0, 0);
        let out = ncrs_vote_run(&mut o, vec![0.0, 0.0], &sched, 3, 10, &mut RngStream::new(0, 0), &mut NoInstrument).unwrap();
        assert_eq!(out.accepted, 10);
        assert_eq!(out.queries, 30);
    }

    #[test]
    fn deterministic_link_never_ascends() {
        let mut rng = RngStream::new(3, 0);
        let active = Subspace::random(&mut rng, 10, 4).unwrap();
        let f = RidgeObjective::exact(active, InnerFunction::default()).unwrap();
        let mut oracle =
            ConfidenceOracle::new(&f, ConfidenceKind::DeterministicLink, LinkFunction::default(), RngStream::new(3, 1))
                .unwrap();
        let sched = StepSchedule::constant(0.1, 1000).unwrap();
        let mut values = Vec::new();
        let mut hook = |r: &StepRecord<'_, f64>| values.push(f.value(r.theta));
        let theta1 = f.initial_point(&mut rng, 4.0).unwrap();
        let out = ncrs_vote_run(&mut oracle, theta1, &sched, 1, 1000, &mut RngStream::new(3, 2), &mut hook).unwrap();
        assert!(values.windows(2).all(|w| w[1] <= w[0]));
        assert!(out.accepted > 0);
    }

    #[test]
    fn rejects_bad_config() {
        let sched = StepSchedule::constant(0.1, 5).unwrap();
        let mut o = Constant(Sign::Plus, 0, 3);
        let mut rng = RngStream::new(0, 0);
        assert!(ncrs_run(&mut o, vec![0.0; 2], &sched, 5, &mut rng, &mut NoInstrument).is_err());
        assert!(ncrs_run(&mut o, vec![0.0; 3], &sched, 0, &mut rng, &mut NoInstrument).is_err());
        assert!(ncrs_run(&mut o, vec![0.0; 3], &sched, 6, &mut rng, &mut NoInstrument).is_err());
        let mut s = FixedScores(vec![1.0], 0, 0);
        assert!(ncrs_vote_run(&mut s, vec![0.0; 2], &sched, 0, 5, &mut rng, &mut NoInstrument).is_err());
        assert_eq!(o.queries(), 0);
    }
}
