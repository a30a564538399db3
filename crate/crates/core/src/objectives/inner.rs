use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Separable inner functions `g: R^k -> R` of a ridge objective.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InnerFunction {
    /// `½‖z‖²`
    PureQuadratic,
    /// `½‖z‖² + a Σ cos(ω zᵢ)`
    QuadraticCosine { amplitude: f64, frequency: f64 },
    /// `Σ zᵢ² / (1 + zᵢ²)`
    BoundedWell,
}

impl Default for InnerFunction {
    fn default() -> Self {
        InnerFunction::QuadraticCosine { amplitude: 1.0, frequency: 3.0 }
    }
}

impl InnerFunction {
    pub fn name(&self) -> &'static str {
        match self {
            InnerFunction::PureQuadratic => "pure_quadratic",
            InnerFunction::QuadraticCosine { .. } => "quadratic_cosine",
            InnerFunction::BoundedWell => "bounded_well",
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        if let InnerFunction::QuadraticCosine { amplitude, frequency } = *self {
            if !(amplitude >= 0.0 && amplitude.is_finite()) {
                return Err(crate::Error::config(format!(
                    "quadratic_cosine amplitude must be finite and >= 0, got {amplitude}"
                )));
            }
            if !(frequency > 0.0 && frequency.is_finite()) {
                return Err(crate::Error::config(format!(
                    "quadratic_cosine frequency must be finite and > 0, got {frequency}"
                )));
            }
        }
        Ok(())
    }

    pub fn value<T: Real>(&self, z: &[T]) -> T {
        match *self {
            InnerFunction::PureQuadratic => T::lit(0.5) * z.iter().map(|&x| x * x).sum::<T>(),
            InnerFunction::QuadraticCosine { amplitude, frequency } => {
                let (a, w) = (T::lit(amplitude), T::lit(frequency));
                z.iter()
                    .map(|&x| T::lit(0.5) * x * x + a * (w * x).cos())
                    .sum()
            }
            InnerFunction::BoundedWell => z
                .iter()
                .map(|&x| {
                    let x2 = x * x;
                    x2 / (T::one() + x2)
                })
                .sum(),
        }
    }

    pub fn gradient<T: Real>(&self, z: &[T]) -> Vec<T> {
        match *self {
            InnerFunction::PureQuadratic => z.to_vec(),
            InnerFunction::QuadraticCosine { amplitude, frequency } => {
                let (a, w) = (T::lit(amplitude), T::lit(frequency));
                z.iter().map(|&x| x - a * w * (w * x).sin()).collect()
            }
            InnerFunction::BoundedWell => z
                .iter()
                .map(|&x| {
                    let q = T::one() + x * x;
                    T::lit(2.0) * x / (q * q)
                })
                .collect(),
        }
    }

    /// Diagonal of the Hessian (all kinds are separable).
    pub fn hessian_diag<T: Real>(&self, z: &[T]) -> Vec<T> {
        match *self {
            InnerFunction::PureQuadratic => vec![T::one(); z.len()],
            InnerFunction::QuadraticCosine { amplitude, frequency } => {
                let (a, w) = (T::lit(amplitude), T::lit(frequency));
                z.iter().map(|&x| T::one() - a * w * w * (w * x).cos()).collect()
            }
            InnerFunction::BoundedWell => z
                .iter()
                .map(|&x| {
                    let x2 = x * x;
                    let q = T::one() + x2;
                    T::lit(2.0) * (T::one() - T::lit(3.0) * x2) / (q * q * q)
                })
                .collect(),
        }
    }

    /// Global bound on `‖∇²g‖₂`.
    pub fn smoothness(&self) -> f64 {
        match *self {
            InnerFunction::PureQuadratic => 1.0,
            InnerFunction::QuadraticCosine { amplitude, frequency } => 1.0 + amplitude * frequency * frequency,
            InnerFunction::BoundedWell => 2.0,
        }
    }

    /// A finite lower bound on `g` over `R^k`.
    pub fn lower_bound(&self, k: usize) -> f64 {
        match *self {
            InnerFunction::PureQuadratic | InnerFunction::BoundedWell => 0.0,
            InnerFunction::QuadraticCosine { amplitude, .. } => -amplitude * k as f64,
        }
    }
}
