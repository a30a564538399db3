//! Noisy comparison oracles. Optimizers only ever see these interfaces and
//! the ambient dimension; none of them exposes values or gradients, except
//! [`ValueOracle`], which exists for the two-point baseline.

mod confidence;
mod link;
mod sign;

pub use confidence::{AssumptionConstants, ConfidenceKind, ConfidenceOracle};
pub use link::{LinkFunction, LinkKind};
pub use sign::SignOracle;

use std::marker::PhantomData;

use crate::objectives::Objective;
use crate::scalar::Real;

/// A binary comparison outcome. `Plus` for `R(x, y)` means `f(x) > f(y)`,
/// i.e. the second argument is preferred.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Minus => -1,
            Sign::Plus => 1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }

    /// Sign of a nonzero gap; `None` on ties.
    pub fn of(delta: f64) -> Option<Self> {
        if delta > 0.0 {
            Some(Sign::Plus)
        } else if delta < 0.0 {
            Some(Sign::Minus)
        } else {
            None
        }
    }
}

/// Uniform-margin comparisons returning a label in `{-1, +1}`.
pub trait SignComparator<T> {
    fn dim(&self) -> usize;
    fn compare(&mut self, x: &[T], y: &[T]) -> Sign;
    fn queries(&self) -> u64;
}

/// Gap-dependent comparisons returning a signed confidence in `[-1, 1]`.
/// Positive means the second argument is preferred.
pub trait ScoreComparator<T> {
    fn dim(&self) -> usize;
    fn score(&mut self, x: &[T], y: &[T]) -> f64;
    fn queries(&self) -> u64;
}

/// Exact objective values with query accounting.
pub trait ValueOracle<T> {
    fn dim(&self) -> usize;
    fn value(&mut self, x: &[T]) -> T;
    fn queries(&self) -> u64;
}

impl<T, S: SignComparator<T> + ?Sized> SignComparator<T> for &mut S {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn compare(&mut self, x: &[T], y: &[T]) -> Sign {
        (**self).compare(x, y)
    }
    fn queries(&self) -> u64 {
        (**self).queries()
    }
}

impl<T, S: ScoreComparator<T> + ?Sized> ScoreComparator<T> for &mut S {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn score(&mut self, x: &[T], y: &[T]) -> f64 {
        (**self).score(x, y)
    }
    fn queries(&self) -> u64 {
        (**self).queries()
    }
}

/// Wraps an objective as a counted [`ValueOracle`].
#[derive(Clone, Debug)]
pub struct CountingEvaluator<T, O> {
    objective: O,
    queries: u64,
    _scalar: PhantomData<T>,
}

impl<T: Real, O: Objective<T>> CountingEvaluator<T, O> {
    pub fn new(objective: O) -> Self {
        Self { objective, queries: 0, _scalar: PhantomData }
    }

    pub fn objective(&self) -> &O {
        &self.objective
    }
}

impl<T: Real, O: Objective<T>> ValueOracle<T> for CountingEvaluator<T, O> {
    fn dim(&self) -> usize {
        self.objective.dim()
    }

    fn value(&mut self, x: &[T]) -> T {
        self.queries += 1;
        self.objective.value(x)
    }

    fn queries(&self) -> u64 {
        self.queries
    }
}
