//! Floating-point scalar abstraction.
//!
//! All numerical code in this crate is written against [`Scalar`], which is
//! implemented for `f32` and `f64`. The crate root exposes `f64` aliases for
//! the common case.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real scalar usable by the solvers: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into this scalar type.
    #[inline]
    fn lit(v: f64) -> Self {
        <Self as FromPrimitive>::from_f64(v).expect("f64 literal representable")
    }

    /// Lossless widening to `f64`.
    #[inline]
    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).expect("scalar converts to f64")
    }

    #[inline]
    fn from_usize(v: usize) -> Self {
        <Self as FromPrimitive>::from_usize(v).expect("usize representable")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Euclidean inner product.
#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// Euclidean norm.
#[inline]
pub fn norm<T: Scalar>(a: &[T]) -> T {
    // scaled to avoid overflow for large entries
    let scale = a.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if scale == T::zero() || !scale.is_finite() {
        return scale;
    }
    let s: T = a.iter().map(|&v| (v / scale) * (v / scale)).sum();
    scale * s.sqrt()
}

/// Euclidean distance between two points.
#[inline]
pub fn dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    let d: Vec<T> = a.iter().zip(b).map(|(&x, &y)| x - y).collect();
    norm(&d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_handles_scale() {
        assert_eq!(norm(&[3.0_f64, 4.0]), 5.0);
        assert_eq!(norm::<f64>(&[]), 0.0);
        let big = norm(&[3.0e200_f64, 4.0e200]);
        assert!((big / 5.0e200 - 1.0).abs() < 1e-15);
        assert_eq!(norm(&[3.0_f32, 4.0]), 5.0);
    }

    #[test]
    fn lit_round_trips() {
        assert_eq!(f32::lit(0.5), 0.5_f32);
        assert_eq!(f64::lit(0.1).as_f64(), 0.1);
    }
}
