//! Synthetic ridge and nearly-ridge objectives with analytic gradients.

mod inner;
mod nuisance;

pub use inner::InnerFunction;
pub use nuisance::{nuisance_eta, NuisanceSpec};

use crate::error::{check_dim, Error, Result};
use crate::geometry::vector::norm;
use crate::geometry::{gaussian_vector, RngStream, Subspace};
use crate::scalar::Real;

/// What the oracles and the instrumentation need from a test function.
///
/// `value`/`gradient` panic on a length mismatch; use the checked methods on
/// the concrete type at API boundaries.
pub trait Objective<T: Real> {
    fn dim(&self) -> usize;
    fn value(&self, x: &[T]) -> T;
    fn gradient(&self, x: &[T]) -> Vec<T>;
    /// Certified global smoothness constant `L_f`.
    fn smoothness(&self) -> f64;
    /// Certified lower bound `f★`.
    fn lower_bound(&self) -> f64;
}

impl<T: Real, O: Objective<T> + ?Sized> Objective<T> for &O {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn value(&self, x: &[T]) -> T {
        (**self).value(x)
    }
    fn gradient(&self, x: &[T]) -> Vec<T> {
        (**self).gradient(x)
    }
    fn smoothness(&self) -> f64 {
        (**self).smoothness()
    }
    fn lower_bound(&self) -> f64 {
        (**self).lower_bound()
    }
}

/// `f(x) = g(Ux) + η(x)`, with `η` absent for an exact ridge.
#[derive(Clone, Debug, PartialEq)]
pub struct RidgeObjective<T> {
    active: Subspace<T>,
    inner: InnerFunction,
    nuisance: Option<NuisanceSpec<T>>,
    smoothness: f64,
    lower_bound: f64,
}

impl<T: Real> RidgeObjective<T> {
    pub fn new(active: Subspace<T>, inner: InnerFunction, nuisance: Option<NuisanceSpec<T>>) -> Result<Self> {
        inner.validate()?;
        if let Some(n) = &nuisance {
            check_dim(active.ambient_dim(), n.subspace().ambient_dim())?;
        }
        let k = active.rank();
        let smoothness = inner.smoothness() + nuisance.as_ref().map_or(0.0, |n| n.smoothness());
        let lower_bound = inner.lower_bound(k) + nuisance.as_ref().map_or(0.0, |n| n.lower_bound());
        Ok(Self { active, inner, nuisance, smoothness, lower_bound })
    }

    pub fn exact(active: Subspace<T>, inner: InnerFunction) -> Result<Self> {
        Self::new(active, inner, None)
    }

    pub fn active(&self) -> &Subspace<T> {
        &self.active
    }

    pub fn inner(&self) -> InnerFunction {
        self.inner
    }

    pub fn nuisance(&self) -> Option<&NuisanceSpec<T>> {
        self.nuisance.as_ref()
    }

    pub fn intrinsic_dim(&self) -> usize {
        self.active.rank()
    }

    pub fn eval(&self, x: &[T]) -> Result<T> {
        check_dim(self.active.ambient_dim(), x.len())?;
        Ok(self.value(x))
    }

    pub fn grad(&self, x: &[T]) -> Result<Vec<T>> {
        check_dim(self.active.ambient_dim(), x.len())?;
        Ok(self.gradient(x))
    }

    pub fn smoothness_constant(&self) -> f64 {
        self.smoothness
    }

    /// The exact ridge part `h(x) = g(Ux)` without the nuisance term.
    pub fn ridge_part(&self) -> RidgeObjective<T> {
        Self::exact(self.active.clone(), self.inner).expect("validated at construction")
    }

    /// Uniform draw on the sphere of `radius` inside `range(Uᵀ)`.
    pub fn initial_point(&self, rng: &mut RngStream, radius: f64) -> Result<Vec<T>> {
        if !(radius >= 0.0 && radius.is_finite()) {
            return Err(Error::config(format!("init radius must be finite and >= 0, got {radius}")));
        }
        let k = self.active.rank();
        let mut z: Vec<T> = gaussian_vector(rng, k);
        let n = norm(&z);
        let scale = T::lit(radius) / n;
        z.iter_mut().for_each(|v| *v = *v * scale);
        Ok(self.active.lift(&z))
    }
}

/// Default start radius `3√k`.
pub fn default_init_radius(k: usize) -> f64 {
    3.0 * (k as f64).sqrt()
}

impl<T: Real> Objective<T> for RidgeObjective<T> {
    fn dim(&self) -> usize {
        self.active.ambient_dim()
    }

    fn value(&self, x: &[T]) -> T {
        let z = self.active.coords(x);
        let mut v = self.inner.value(&z);
        if let Some(n) = &self.nuisance {
            v = v + n.eta(x);
        }
        v
    }

    fn gradient(&self, x: &[T]) -> Vec<T> {
        let z = self.active.coords(x);
        let mut g = self.active.lift(&self.inner.gradient(&z));
        if let Some(n) = &self.nuisance {
            for (gi, ei) in g.iter_mut().zip(n.eta_gradient(x)) {
                *gi = *gi + ei;
            }
        }
        g
    }

    fn smoothness(&self) -> f64 {
        self.smoothness
    }

    fn lower_bound(&self) -> f64 {
        self.lower_bound
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::vector::{dot, max_abs_diff, offset};

    fn ridge(inner: InnerFunction, d: usize, k: usize, seed: u64) -> RidgeObjective<f64> {
        let active = Subspace::random(&mut RngStream::new(seed, 0), d, k).unwrap();
        RidgeObjective::exact(active, inner).unwrap()
    }

    #[test]
    fn kernel_points_are_zero_for_pure_quadratic() {
        let f = ridge(InnerFunction::PureQuadratic, 12, 3, 1);
        let v: Vec<f64> = gaussian_vector(&mut RngStream::new(2, 0), 12);
        let x = f.active().reject(&v).unwrap();
        assert!(f.eval(&x).unwrap().abs() <= 1e-20);
        assert!(norm(&f.grad(&x).unwrap()) <= 1e-10);
    }

    #[test]
    fn quadratic_cosine_at_origin_is_k() {
        let f = ridge(InnerFunction::QuadraticCosine { amplitude: 1.0, frequency: 1.0 }, 9, 4, 3);
        assert_eq!(f.eval(&[0.0; 9]).unwrap(), 4.0);
    }

    #[test]
    fn pure_quadratic_gradient_formula() {
        let f = ridge(InnerFunction::PureQuadratic, 10, 3, 4);
        let x: Vec<f64> = gaussian_vector(&mut RngStream::new(5, 0), 10);
        let expected = f.active().project(&x).unwrap();
        assert!(max_abs_diff(&f.grad(&x).unwrap(), &expected) <= 1e-12);
    }

    #[test]
    fn kernel_translation_invariance() {
        let f = ridge(InnerFunction::default(), 15, 5, 6);
        let mut rng = RngStream::new(7, 0);
        for _ in 0..100 {
            let x: Vec<f64> = gaussian_vector(&mut rng, 15);
            let v = f.active().reject(&gaussian_vector::<f64>(&mut rng, 15)).unwrap();
            let a = f.eval(&x).unwrap();
            let b = f.eval(&offset(&x, 1.0, &v)).unwrap();
            assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn gradient_matches_central_differences() {
        let mut rng = RngStream::new(8, 0);
        let active = Subspace::random(&mut rng, 12, 4).unwrap();
        let w = Subspace::random_complement(&mut rng, 2, &active).unwrap();
        let nuisance = NuisanceSpec::new(w, 0.3, &active).unwrap();
        for inner in [InnerFunction::PureQuadratic, InnerFunction::default(), InnerFunction::BoundedWell] {
            let f = RidgeObjective::new(active.clone(), inner, Some(nuisance.clone())).unwrap();
            let h = 1e-5;
            for _ in 0..100 {
                let x: Vec<f64> = gaussian_vector(&mut rng, 12);
                let g = f.grad(&x).unwrap();
                let fd: Vec<f64> = (0..12)
                    .map(|i| {
                        let mut xp = x.clone();
                        let mut xm = x.clone();
                        xp[i] += h;
                        xm[i] -= h;
                        (f.value(&xp) - f.value(&xm)) / (2.0 * h)
                    })
                    .collect();
                let rel = max_abs_diff(&g, &fd) / norm(&g).max(1.0);
                assert!(rel <= 1e-5, "{} rel err {rel}", inner.name());
            }
        }
    }

    #[test]
    fn descent_lemma_holds_for_certified_constant() {
        let mut rng = RngStream::new(9, 0);
        let active = Subspace::random(&mut rng, 10, 3).unwrap();
        let w = Subspace::random_complement(&mut rng, 2, &active).unwrap();
        let nuisance = NuisanceSpec::new(w, 0.3, &active).unwrap();
        for inner in [InnerFunction::PureQuadratic, InnerFunction::default(), InnerFunction::BoundedWell] {
            let f = RidgeObjective::new(active.clone(), inner, Some(nuisance.clone())).unwrap();
            let l = f.smoothness_constant();
            for _ in 0..10_000 {
                let x: Vec<f64> = gaussian_vector(&mut rng, 10);
                let dir: Vec<f64> = gaussian_vector(&mut rng, 10);
                let step = 0.5 * rng.uniform();
                let y = offset(&x, step, &dir);
                let diff: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
                let rhs = f.value(&x) + dot(&f.gradient(&x), &diff) + 0.5 * l * dot(&diff, &diff);
                assert!(f.value(&y) <= rhs + 1e-12 * (1.0 + rhs.abs()));
                assert!(f.value(&y) >= f.lower_bound());
            }
        }
    }

    #[test]
    fn smoothness_with_nuisance_adds_tau() {
        let mut rng = RngStream::new(10, 0);
        let active = Subspace::<f64>::random(&mut rng, 10, 3).unwrap();
        let w = Subspace::random_complement(&mut rng, 2, &active).unwrap();
        let n = NuisanceSpec::new(w, 0.3, &active).unwrap();
        let f = RidgeObjective::new(active, InnerFunction::PureQuadratic, Some(n)).unwrap();
        assert!((f.smoothness_constant() - 1.3).abs() < 1e-15);
        assert_eq!(f.ridge_part().smoothness_constant(), 1.0);
    }

    #[test]
    fn init_on_sphere_in_range() {
        let f = ridge(InnerFunction::PureQuadratic, 30, 6, 11);
        let x = f.initial_point(&mut RngStream::new(1, 2), default_init_radius(6)).unwrap();
        assert!((norm(&x) - 3.0 * 6f64.sqrt()).abs() <= 1e-10);
        assert!(norm(&f.active().reject(&x).unwrap()) <= 1e-10);
    }

    #[test]
    fn dimension_mismatch() {
        let f = ridge(InnerFunction::PureQuadratic, 5, 2, 12);
        assert!(f.eval(&[0.0; 4]).is_err());
        assert!(f.grad(&[0.0; 6]).is_err());
    }
}
