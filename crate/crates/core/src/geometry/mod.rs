//! Seeded randomness, dense vector helpers and orthonormal subspaces.

mod rng;
mod subspace;
pub mod vector;

pub use rng::{stream_id, RngStream};
pub use subspace::Subspace;

use crate::scalar::Real;

/// `d` i.i.d. standard normal draws.
///
/// Draws are always generated in `f64` and then narrowed, so an `f32` and an
/// `f64` run on the same stream see the same directions up to rounding.
pub fn gaussian_vector<T: Real>(rng: &mut RngStream, d: usize) -> Vec<T> {
    (0..d).map(|_| T::lit(rng.standard_normal())).collect()
}

/// Overwrites `out` with fresh standard normal draws.
pub fn fill_gaussian<T: Real>(rng: &mut RngStream, out: &mut [T]) {
    for v in out.iter_mut() {
        *v = T::lit(rng.standard_normal());
    }
}
