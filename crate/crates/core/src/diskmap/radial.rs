use crate::scalar::Scalar;

use super::hamiltonian::RadialPolynomial;

/// A profile `h(r)` with two derivatives.
pub trait RadialProfile<T: Scalar> {
  fn h(&self, r: T) -> T;
  fn dh(&self, r: T) -> T;
  fn d2h(&self, r: T) -> T;
}

impl<T: Scalar> RadialProfile<T> for RadialPolynomial<T> {
  fn h(&self, r: T) -> T {
    RadialPolynomial::h(self, r)
  }
  fn dh(&self, r: T) -> T {
    RadialPolynomial::dh(self, r)
  }
  fn d2h(&self, r: T) -> T {
    RadialPolynomial::d2h(self, r)
  }
}

/// Action of the time-one map of `H = h(|z|)`: `h(r) − ½ r h′(r)`.
pub fn radial_action<T: Scalar, P: RadialProfile<T> + ?Sized>(p: &P, r: T) -> T {
  p.h(r) - T::lit(0.5) * r * p.dh(r)
}

/// Rotation of the time-one map of `H = h(|z|)`: `−h′(r)/(2πr)`, with the
/// limit `−h″(0)/2π` at the origin.
pub fn radial_rotation<T: Scalar, P: RadialProfile<T> + ?Sized>(p: &P, r: T) -> T {
  if r <= T::tol(1e-12) {
    -p.d2h(T::zero()) / T::two_pi()
  } else {
    -p.dh(r) / (T::two_pi() * r)
  }
}

/// Angular speed `−h′(r)/r` of the flow of `h(|z − p|)`, radians per unit time.
pub fn radial_angular_speed<T: Scalar, P: RadialProfile<T> + ?Sized>(p: &P, r: T) -> T {
  if r <= T::tol(1e-12) {
    -p.d2h(T::zero())
  } else {
    -p.dh(r) / r
  }
}

/// `u_p(x, y) = (b x − a y)/2` for `p = (a, b)`.
pub fn u_p<T: Scalar>(p: [T; 2], z: [T; 2]) -> T {
  T::lit(0.5) * (p[1] * z[0] - p[0] * z[1])
}

/// Exact time-`t` flow of `H = h(|z − p|)`: rotation about `p`.
pub fn off_center_flow<T: Scalar, P: RadialProfile<T> + ?Sized>(prof: &P, p: [T; 2], z: [T; 2], t: T) -> [T; 2] {
  let w = [z[0] - p[0], z[1] - p[1]];
  let r = (w[0] * w[0] + w[1] * w[1]).sqrt();
  let (s, c) = (radial_angular_speed(prof, r) * t).sin_cos();
  [p[0] + c * w[0] - s * w[1], p[1] + s * w[0] + c * w[1]]
}

/// Action of the time-one map of `H = h(|z − p|)` at `z`:
/// `h(r_p) − ½ r_p h′(r_p) + u_p(z) − u_p(φ(z))`.
pub fn off_center_action<T: Scalar, P: RadialProfile<T> + ?Sized>(prof: &P, p: [T; 2], z: [T; 2]) -> T {
  let r = ((z[0] - p[0]).powi(2) + (z[1] - p[1]).powi(2)).sqrt();
  let img = off_center_flow(prof, p, z, T::one());
  radial_action(prof, r) + u_p(p, z) - u_p(p, img)
}
