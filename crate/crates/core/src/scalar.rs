//! Floating point abstraction shared by every module.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real scalar used for coordinates: `f32` or `f64`.
///
/// The default relative tolerance differs per precision; `f64` uses `1e-9`,
/// `f32` a looser `1e-4` since its machine epsilon is roughly `1.2e-7`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Default + Debug + Display + Send + Sync + 'static
{
    /// Default relative tolerance for nullity tests.
    const DEFAULT_TAU: f64;

    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {
    const DEFAULT_TAU: f64 = 1e-4;
}

impl Scalar for f64 {
    const DEFAULT_TAU: f64 = 1e-9;
}
