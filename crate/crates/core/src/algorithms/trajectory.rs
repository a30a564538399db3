use serde::{Deserialize, Serialize};

use crate::geometry::vector::norm;
use crate::objectives::Objective;
use crate::scalar::Real;

/// What an optimizer reports to its instrument at iteration `t`: the iterate
/// `θᵗ` before the step, whether step `t` moved, and cumulative queries
/// after it.
#[derive(Debug)]
pub struct StepRecord<'a, T> {
    pub t: usize,
    pub theta: &'a [T],
    pub accepted: bool,
    pub queries: u64,
}

/// Observer hook. Optimizers never read anything back from it.
pub trait Instrument<T> {
    fn observe(&mut self, record: &StepRecord<'_, T>);
}

/// Instrument that discards everything.
#[derive(Clone, Copy, Debug, Default)]
pub struct NoInstrument;

impl<T> Instrument<T> for NoInstrument {
    fn observe(&mut self, _: &StepRecord<'_, T>) {}
}

impl<T, F: FnMut(&StepRecord<'_, T>)> Instrument<T> for F {
    fn observe(&mut self, record: &StepRecord<'_, T>) {
        self(record)
    }
}

/// Result of an optimizer run, independent of any instrumentation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome<T> {
    pub final_theta: Vec<T>,
    pub iterations: usize,
    pub accepted: usize,
    pub queries: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: usize,
    pub f: f64,
    pub grad_norm: f64,
    pub accepted: bool,
    pub queries: u64,
    /// `(1/t) Σ_{i<=t} ‖∇f(θⁱ)‖`
    pub mean_grad_norm: f64,
    /// `(1/t) Σ_{i<=t} ‖∇f(θⁱ)‖²`
    pub mean_grad_norm_sq: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub rows: Vec<TrajectoryRow>,
    pub stride: usize,
    pub iterations: usize,
    pub accepted: usize,
    pub queries: u64,
    pub final_theta: Vec<f64>,
    /// Lowest running-average gradient norm over every iteration, logged or not.
    pub best_mean_grad_norm: f64,
}

impl Trajectory {
    pub fn final_mean_grad_norm(&self) -> Option<f64> {
        self.rows.last().map(|r| r.mean_grad_norm)
    }

    pub fn final_mean_grad_norm_sq(&self) -> Option<f64> {
        self.rows.last().map(|r| r.mean_grad_norm_sq)
    }
}

/// Logging stride: every iteration below 10⁵ iterations, else `⌈T/10⁴⌉`.
pub fn log_stride(iterations: usize) -> usize {
    if iterations < 100_000 {
        1
    } else {
        iterations.div_ceil(10_000)
    }
}

/// Instrument that evaluates `f` and `‖∇f‖` at every iterate and keeps rows
/// at the logging stride. Owned by the harness; the optimizer only sees it
/// through [`Instrument`].
pub struct TrajectoryRecorder<'o, T, O> {
    objective: &'o O,
    iterations: usize,
    stride: usize,
    rows: Vec<TrajectoryRow>,
    sum: f64,
    sum_sq: f64,
    best_mean: f64,
    cached: Option<(Vec<T>, f64, f64)>,
}

impl<'o, T: Real, O: Objective<T>> TrajectoryRecorder<'o, T, O> {
    pub fn new(objective: &'o O, iterations: usize) -> Self {
        let stride = log_stride(iterations);
        Self {
            objective,
            iterations,
            stride,
            rows: Vec::with_capacity(iterations / stride + 2),
            sum: 0.0,
            sum_sq: 0.0,
            best_mean: f64::INFINITY,
            cached: None,
        }
    }

    fn evaluate(&mut self, theta: &[T]) -> (f64, f64) {
        if let Some((prev, f, g)) = &self.cached {
            if prev.as_slice() == theta {
                return (*f, *g);
            }
        }
        let f = self.objective.value(theta).as_f64();
        let g = norm(&self.objective.gradient(theta)).as_f64();
        self.cached = Some((theta.to_vec(), f, g));
        (f, g)
    }

    pub fn finish(self, outcome: &RunOutcome<T>) -> Trajectory {
        Trajectory {
            rows: self.rows,
            stride: self.stride,
            iterations: outcome.iterations,
            accepted: outcome.accepted,
            queries: outcome.queries,
            final_theta: outcome.final_theta.iter().map(|x| x.as_f64()).collect(),
            best_mean_grad_norm: self.best_mean,
        }
    }
}

impl<T: Real, O: Objective<T>> Instrument<T> for TrajectoryRecorder<'_, T, O> {
    fn observe(&mut self, record: &StepRecord<'_, T>) {
        let (f, g) = self.evaluate(record.theta);
        self.sum += g;
        self.sum_sq += g * g;
        let t = record.t;
        let mean = self.sum / t as f64;
        self.best_mean = self.best_mean.min(mean);
        if t == 1 || t.is_multiple_of(self.stride) || t == self.iterations {
            self.rows.push(TrajectoryRow {
                t,
                f,
                grad_norm: g,
                accepted: record.accepted,
                queries: record.queries,
                mean_grad_norm: mean,
                mean_grad_norm_sq: self.sum_sq / t as f64,
            });
        }
    }
}
