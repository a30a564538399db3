use crate::error::{Error, Result};
use crate::geometry::vector::dot;
use crate::geometry::Subspace;
use crate::scalar::Real;

/// Inactive-direction leakage `η(x) = (τ/√m) Σⱼ sin(⟨wⱼ, x⟩)`.
///
/// `∇η(x) = (τ/√m) Σⱼ cos(⟨wⱼ, x⟩) wⱼ` lies in `W = span(wⱼ)` and has norm
/// at most `τ` because the `wⱼ` are orthonormal.
#[derive(Clone, Debug, PartialEq)]
pub struct NuisanceSpec<T> {
    subspace: Subspace<T>,
    tau: f64,
}

impl<T: Real> NuisanceSpec<T> {
    /// `subspace` must be orthogonal to `active` (checked to 1e-9).
    pub fn new(subspace: Subspace<T>, tau: f64, active: &Subspace<T>) -> Result<Self> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::config(format!("tau must be finite and >= 0, got {tau}")));
        }
        if subspace.ambient_dim() != active.ambient_dim() {
            return Err(Error::DimensionMismatch {
                expected: active.ambient_dim(),
                got: subspace.ambient_dim(),
            });
        }
        let tol = T::orthonormal_tol().max(1e-9);
        for w in subspace.rows() {
            for u in active.rows() {
                let c = dot(w, u).as_f64().abs();
                if c > tol {
                    return Err(Error::config(format!(
                        "nuisance subspace is not orthogonal to the active subspace (|⟨w,u⟩| = {c:e})"
                    )));
                }
            }
        }
        Ok(Self { subspace, tau })
    }

    pub fn subspace(&self) -> &Subspace<T> {
        &self.subspace
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn m(&self) -> usize {
        self.subspace.rank()
    }

    fn weight(&self) -> T {
        T::lit(self.tau / (self.m() as f64).sqrt())
    }

    pub fn eta(&self, x: &[T]) -> T {
        if self.tau == 0.0 {
            return T::zero();
        }
        self.weight() * self.subspace.coords(x).into_iter().map(|c| c.sin()).sum::<T>()
    }

    pub fn eta_gradient(&self, x: &[T]) -> Vec<T> {
        if self.tau == 0.0 {
            return vec![T::zero(); x.len()];
        }
        let w = self.weight();
        let cos: Vec<T> = self.subspace.coords(x).into_iter().map(|c| w * c.cos()).collect();
        self.subspace.lift(&cos)
    }

    /// `sup ‖∇²η‖₂ <= τ/√m <= τ`; `τ` is what enters the certified `L_f`.
    pub fn smoothness(&self) -> f64 {
        self.tau
    }

    /// `η >= -τ√m`.
    pub fn lower_bound(&self) -> f64 {
        -self.tau * (self.m() as f64).sqrt()
    }
}

/// Convenience: `η` evaluated directly from a spec.
pub fn nuisance_eta<T: Real>(spec: &NuisanceSpec<T>, x: &[T]) -> T {
    spec.eta(x)
}
