use std::marker::PhantomData;

use crate::error::{check_dim, Error, Result};
use crate::geometry::RngStream;
use crate::objectives::Objective;
use crate::scalar::Real;

use super::{Sign, SignComparator};

/// Returns the true ordering with probability exactly `½ + p` and the
/// flipped one otherwise. Ties are a fair coin.
#[derive(Clone, Debug)]
pub struct SignOracle<T, O> {
    objective: O,
    advantage: f64,
    rng: RngStream,
    queries: u64,
    _scalar: PhantomData<T>,
}

impl<T: Real, O: Objective<T>> SignOracle<T, O> {
    pub fn new(objective: O, advantage: f64, rng: RngStream) -> Result<Self> {
        if !(advantage > 0.0 && advantage <= 0.5) {
            return Err(Error::config(format!("oracle advantage p must lie in (0, 0.5], got {advantage}")));
        }
        Ok(Self { objective, advantage, rng, queries: 0, _scalar: PhantomData })
    }

    pub fn advantage(&self) -> f64 {
        self.advantage
    }

    pub fn objective(&self) -> &O {
        &self.objective
    }

    /// Checked variant of [`SignComparator::compare`].
    pub fn sign_compare(&mut self, x: &[T], y: &[T]) -> Result<Sign> {
        check_dim(self.objective.dim(), x.len())?;
        check_dim(self.objective.dim(), y.len())?;
        Ok(self.compare(x, y))
    }
}

impl<T: Real, O: Objective<T>> SignComparator<T> for SignOracle<T, O> {
    fn dim(&self) -> usize {
        self.objective.dim()
    }

    fn compare(&mut self, x: &[T], y: &[T]) -> Sign {
        self.queries += 1;
        let delta = (self.objective.value(x) - self.objective.value(y)).as_f64();
        // one uniform per query keeps the stream aligned across outcomes
        let u = self.rng.uniform();
        match Sign::of(delta) {
            Some(truth) if u < 0.5 + self.advantage => truth,
            Some(truth) => truth.flip(),
            None if u < 0.5 => Sign::Plus,
            None => Sign::Minus,
        }
    }

    fn queries(&self) -> u64 {
        self.queries
    }
}
