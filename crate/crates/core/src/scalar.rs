use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::Serialize;

/// Floating point type the equilibrium math runs on: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Serialize + Send + Sync + 'static
{
    /// Converts an `f64` literal.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 literal representable in every Scalar")
    }

    fn from_count(count: usize) -> Self {
        Self::from_usize(count).expect("count representable in every Scalar")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Absolute tolerance used when snapping quantities that are zero
    /// algebraically: 1e-12 for `f64`, a few ulps of 1 for narrower types.
    fn snap_tolerance() -> Self {
        Self::lit(1e-12).max(Self::epsilon() * Self::lit(64.0))
    }

    /// Relative tolerance for closed-form comparisons (1e-9 for `f64`).
    fn rel_tolerance() -> Self {
        Self::lit(1e-9).max(Self::epsilon() * Self::lit(1024.0))
    }

    /// `a` and `b` agree within [`Scalar::rel_tolerance`] relative to their
    /// magnitude, with an absolute floor of [`Scalar::snap_tolerance`].
    fn approx_eq(self, other: Self) -> bool {
        let scale = self.abs().max(other.abs()).max(Self::one());
        (self - other).abs() <= Self::rel_tolerance() * scale || (self - other).abs() <= Self::snap_tolerance()
    }

    fn clamp_unit(self) -> Self {
        self.max(Self::zero()).min(Self::one())
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// `base` raised to a non-negative integer power.
pub(crate) fn powi<T: Scalar>(base: T, exp: usize) -> T {
    base.powi(exp as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerances_scale_with_precision() {
        assert_eq!(f64::snap_tolerance(), 1e-12);
        assert_eq!(f64::rel_tolerance(), 1e-9);
        assert!(f32::snap_tolerance() > 1e-6);
    }

    #[test]
    fn approx_eq_has_absolute_floor() {
        assert!(0.0f64.approx_eq(1e-13));
        assert!(!0.0f64.approx_eq(1e-8));
        assert!(1000.0f64.approx_eq(1000.0 + 1e-7));
    }
}
