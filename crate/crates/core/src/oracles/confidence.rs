use std::marker::PhantomData;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Result};
use crate::geometry::RngStream;
use crate::objectives::Objective;
use crate::scalar::Real;

use super::{LinkFunction, ScoreComparator};

/// How a confidence score is produced from the gap `Δ = f(x) - f(y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConfidenceKind {
    /// `2σ(Δ) - 1`, no randomness.
    DeterministicLink,
    /// `sign(Δ)` with probability `ρ(|Δ|)`, otherwise 0.
    EngageAbstain,
    /// With probability `ρ(|Δ|)` return `sign(Δ)·B`, `B = +1` w.p. ¾ and
    /// `-1` w.p. ¼; otherwise 0.
    NoisyEngage,
}

impl ConfidenceKind {
    /// Certified signal function: `ρ` for the first two kinds, `ρ/2` for
    /// `noisy_engage`.
    pub fn signal(self, link: &LinkFunction, t: f64) -> f64 {
        match self {
            ConfidenceKind::NoisyEngage => 0.5 * link.rho(t),
            _ => link.rho(t),
        }
    }

    pub fn constants(self, link: &LinkFunction) -> AssumptionConstants {
        let (c, r) = link.local_linearity_constants();
        match self {
            ConfidenceKind::DeterministicLink | ConfidenceKind::EngageAbstain => {
                AssumptionConstants { second_moment: 1.0, c, r }
            }
            ConfidenceKind::NoisyEngage => AssumptionConstants { second_moment: 2.0, c: 0.5 * c, r },
        }
    }
}

/// Constants under which an oracle kind satisfies the gap-dependent
/// confidence model: aligned mean `>= signal(|Δ|)`, second moment
/// `<= second_moment * signal(|Δ|)`, and `signal(t) >= c t` on `[0, r]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssumptionConstants {
    pub second_moment: f64,
    pub c: f64,
    pub r: f64,
}

#[derive(Clone, Debug)]
pub struct ConfidenceOracle<T, O> {
    objective: O,
    kind: ConfidenceKind,
    link: LinkFunction,
    rng: RngStream,
    queries: u64,
    _scalar: PhantomData<T>,
}

impl<T: Real, O: Objective<T>> ConfidenceOracle<T, O> {
    pub fn new(objective: O, kind: ConfidenceKind, link: LinkFunction, rng: RngStream) -> Result<Self> {
        link.validate()?;
        Ok(Self { objective, kind, link, rng, queries: 0, _scalar: PhantomData })
    }

    pub fn kind(&self) -> ConfidenceKind {
        self.kind
    }

    pub fn link(&self) -> LinkFunction {
        self.link
    }

    pub fn objective(&self) -> &O {
        &self.objective
    }

    /// Checked variant of [`ScoreComparator::score`].
    pub fn confidence_compare(&mut self, x: &[T], y: &[T]) -> Result<f64> {
        check_dim(self.objective.dim(), x.len())?;
        check_dim(self.objective.dim(), y.len())?;
        Ok(self.score(x, y))
    }

    /// One query on a frozen pair whose gap is `delta`.
    pub fn score_for_gap(&mut self, delta: f64) -> f64 {
        self.queries += 1;
        let rho = self.link.rho(delta.abs());
        let sign = if delta > 0.0 {
            1.0
        } else if delta < 0.0 {
            -1.0
        } else {
            0.0
        };
        match self.kind {
            ConfidenceKind::DeterministicLink => self.link.score(delta),
            ConfidenceKind::EngageAbstain => {
                let engage = self.rng.uniform() < rho;
                if engage {
                    sign
                } else {
                    0.0
                }
            }
            ConfidenceKind::NoisyEngage => {
                let engage = self.rng.uniform() < rho;
                let agree = self.rng.uniform() < 0.75;
                match (engage, agree) {
                    (false, _) => 0.0,
                    (true, true) => sign,
                    (true, false) => -sign,
                }
            }
        }
    }

    /// Certified signal function of this oracle, see [`ConfidenceKind::signal`].
    pub fn signal(&self, t: f64) -> f64 {
        self.kind.signal(&self.link, t)
    }

    pub fn constants(&self) -> AssumptionConstants {
        self.kind.constants(&self.link)
    }
}

impl<T: Real, O: Objective<T>> ScoreComparator<T> for ConfidenceOracle<T, O> {
    fn dim(&self) -> usize {
        self.objective.dim()
    }

    fn score(&mut self, x: &[T], y: &[T]) -> f64 {
        let delta = (self.objective.value(x) - self.objective.value(y)).as_f64();
        self.score_for_gap(delta)
    }

    fn queries(&self) -> u64 {
        self.queries
    }
}
