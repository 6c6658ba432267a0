//! Scalar abstraction for the numeric substrate.
//!
//! The MLP stack and small numeric kernels are generic over [`Scalar`] so the
//! same code instantiates at `f32` or `f64`. Everything that touches files or
//! physics uses the crate-level [`crate::Real`] alias (`f64`): checkpoints are
//! endianness-fixed `f64` payloads and the determinism guarantees are stated
//! at `f64` precision.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssignOps};

/// Floating-point scalar usable by the neural substrate.
pub trait Scalar:
    Float + NumAssignOps + FromPrimitive + Sum<Self> + Debug + Display + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, for literals and hyperparameters.
    fn from_f64_lossy(v: f64) -> Self;
    /// Widening conversion to `f64`, for reporting and serialization.
    fn to_f64_lossy(self) -> f64;
}

macro_rules! impl_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            #[inline]
            fn from_f64_lossy(v: f64) -> Self {
                v as $t
            }
            #[inline]
            fn to_f64_lossy(self) -> f64 {
                self as f64
            }
        }
    )*};
}

impl_scalar!(f32, f64);

/// Shorthand for converting an `f64` literal into a generic scalar.
#[inline]
pub fn lit<F: Scalar>(v: f64) -> F {
    F::from_f64_lossy(v)
}
