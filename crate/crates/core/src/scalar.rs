//! Floating-point abstraction shared by the numeric modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating point: f32 or f64.
pub trait Real:
    Float + FromPrimitive + ToPrimitive + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal is representable")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("finite float converts to f64")
    }

    /// Tolerance used for orthonormality checks at this precision.
    fn orthonormal_tol() -> f64 {
        (Self::epsilon().as_f64() * 1e3).max(1e-10)
    }
}

impl Real for f32 {}
impl Real for f64 {}
