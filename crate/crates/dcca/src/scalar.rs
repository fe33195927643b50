//! Scalar abstraction for the numeric kernels.
//!
//! All matrix construction, estimator and population-moment code is generic
//! over the floating type; `f64` and `f32` both qualify. Concrete `f64`
//! aliases for the public types live at the crate root.

use nalgebra::RealField;
use num_traits::{FromPrimitive, ToPrimitive};

/// Floating scalar usable by every kernel in this crate.
pub trait Scalar: RealField + FromPrimitive + ToPrimitive + Copy + std::iter::Sum {}

impl<T> Scalar for T where T: RealField + FromPrimitive + ToPrimitive + Copy + std::iter::Sum {}

pub(crate) fn from_usize<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("usize value representable in scalar type")
}

pub(crate) fn from_f64<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 constant representable in scalar type")
}
