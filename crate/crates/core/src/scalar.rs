//! Floating-point scalar abstraction shared by the numerical modules.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real scalar usable by the generic numerical core (`f32` or `f64`).
pub trait Scalar:
  Float + FloatConst + FromPrimitive + Default + Debug + Display + Sum + Send + Sync + 'static
{
  /// Converts an `f64` literal.
  #[inline]
  fn lit(x: f64) -> Self {
    Self::from_f64(x).expect("literal representable in scalar type")
  }

  /// A tolerance of `x`, never below a small multiple of machine epsilon.
  #[inline]
  fn tol(x: f64) -> Self {
    Self::lit(x).max(Self::epsilon() * Self::lit(16.0))
  }

  /// Converts to `f64`.
  #[inline]
  fn as_f64(self) -> f64 {
    self.to_f64().expect("scalar converts to f64")
  }

  /// `2π`.
  #[inline]
  fn two_pi() -> Self {
    Self::TAU()
  }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
