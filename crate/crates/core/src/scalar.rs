use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating-point type used for gate angles: `f32` or `f64`.
pub trait Scalar: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Tolerance used when deciding that an angle is a multiple of 2π.
    fn angle_tolerance() -> Self;

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).unwrap_or_else(Self::nan)
    }
}

impl Scalar for f64 {
    fn angle_tolerance() -> Self {
        1e-9
    }
}

impl Scalar for f32 {
    fn angle_tolerance() -> Self {
        1e-5
    }
}

/// Reduces an angle into `[0, 2π)`, snapping values within tolerance of 2π to zero.
pub fn normalize_angle<T: Scalar>(angle: T) -> T {
    let two_pi = T::TAU();
    let mut a = angle % two_pi;
    if a < T::zero() {
        a = a + two_pi;
    }
    if a.abs() < T::angle_tolerance() || (two_pi - a).abs() < T::angle_tolerance() {
        T::zero()
    } else {
        a
    }
}

/// True when the angle is congruent to zero modulo 2π.
pub fn is_zero_angle<T: Scalar>(angle: T) -> bool {
    normalize_angle(angle) == T::zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn normalizes_into_range() {
        assert!((normalize_angle(-PI / 2.0) - 1.5 * PI).abs() < 1e-12);
        assert_eq!(normalize_angle(2.0 * PI), 0.0);
        assert_eq!(normalize_angle(-4.0 * PI + 1e-12), 0.0);
        assert!(is_zero_angle(6.0 * PI));
        assert!(!is_zero_angle(PI));
        assert!(is_zero_angle(2.0f32 * std::f32::consts::PI));
    }
}
