use serde::{Deserialize, Serialize};

use super::body::{bilinear, dot, norm, scale, ConvexBody, Vec4};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Multiplication by `i` on `C²`.
pub fn quat_i<T: Scalar>(v: Vec4<T>) -> Vec4<T> {
  [-v[1], v[0], -v[3], v[2]]
}

pub fn quat_j<T: Scalar>(v: Vec4<T>) -> Vec4<T> {
  [-v[2], v[3], v[0], -v[1]]
}

/// `K = IJ`.
pub fn quat_k<T: Scalar>(v: Vec4<T>) -> Vec4<T> {
  [-v[3], -v[2], v[1], v[0]]
}

/// Orthonormal frame `(ν, Iν, Jν, Kν)` at a boundary point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuaternionFrame<T> {
  pub nu: Vec4<T>,
  pub i_nu: Vec4<T>,
  pub j_nu: Vec4<T>,
  pub k_nu: Vec4<T>,
  /// `⟨Z, ν⟩` with `Z = y/2`.
  pub z_dot_nu: T,
}

impl<T: Scalar> QuaternionFrame<T> {
  pub fn new(y: Vec4<T>, nu: Vec4<T>) -> Self {
    Self { nu, i_nu: quat_i(nu), j_nu: quat_j(nu), k_nu: quat_k(nu), z_dot_nu: T::lit(0.5) * dot(y, nu) }
  }

  /// `R = Iν/⟨Z,ν⟩`.
  pub fn reeb(&self) -> Vec4<T> {
    scale(T::one() / self.z_dot_nu, self.i_nu)
  }

  pub fn tangent(&self) -> [Vec4<T>; 3] {
    [self.i_nu, self.j_nu, self.k_nu]
  }
}

/// Second fundamental form in the basis `(Iν, Jν, Kν)` and mean curvature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureData<T> {
  pub s: [[T; 3]; 3],
  pub mean: T,
}

impl<T: Scalar> CurvatureData<T> {
  pub fn min_eigenvalue(&self) -> f64 {
    let m = nalgebra::Matrix3::from_fn(|i, j| self.s[i][j].as_f64());
    m.symmetric_eigenvalues().min()
  }

  /// `|∇_{Iν}Iν| = |(S(Iν,Iν), S(Iν,Jν), S(Iν,Kν))|`.
  pub fn iv_acceleration(&self) -> T {
    let r = self.s[0];
    (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt()
  }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Geometry<T> {
  pub point: Vec4<T>,
  pub frame: QuaternionFrame<T>,
  pub curvature: CurvatureData<T>,
}

impl<T: Scalar> Geometry<T> {
  /// `ρ_τ(y, s)` in turns per unit time, `s` in turns.
  pub fn rotation_density(&self, s: T) -> T {
    density(&self.curvature.s, self.frame.z_dot_nu, s)
  }
}

fn density<T: Scalar>(s: &[[T; 3]; 3], z_dot_nu: T, angle: T) -> T {
  let (sn, cs) = (T::two_pi() * angle).sin_cos();
  let rotated = cs * cs * s[1][1] + T::lit(2.0) * sn * cs * s[1][2] + sn * sn * s[2][2];
  (s[0][0] + rotated) / (T::two_pi() * z_dot_nu)
}

/// Frame and curvature at `y` without checking that `y` lies on the level set.
pub(crate) fn geometry_unchecked<T: Scalar, B: ConvexBody<T> + ?Sized>(body: &B, y: Vec4<T>) -> Result<Geometry<T>> {
  let g = body.gradient(y);
  let gn = norm(g);
  if !(gn.as_f64() >= 1e-12) {
    return Err(Error::DegenerateGradient(gn.as_f64()));
  }
  let nu = scale(T::one() / gn, g);
  let frame = QuaternionFrame::new(y, nu);
  let h = body.hessian(y);
  let basis = frame.tangent();
  let mut s = [[T::zero(); 3]; 3];
  for a in 0..3 {
    for b in a..3 {
      let v = bilinear(&h, basis[a], basis[b]) / gn;
      s[a][b] = v;
      s[b][a] = v;
    }
  }
  let mean = (s[0][0] + s[1][1] + s[2][2]) / T::lit(3.0);
  Ok(Geometry { point: y, frame, curvature: CurvatureData { s, mean } })
}

/// Frame, second fundamental form `S = Hess F|_{TY} / |∇F|` and `H = tr S / 3`.
pub fn geometry_at<T: Scalar, B: ConvexBody<T> + ?Sized>(body: &B, y: Vec4<T>) -> Result<Geometry<T>> {
  let f = body.value(y) - T::one();
  if f.abs().as_f64() > 1e-10 {
    return Err(Error::InvalidInput(format!("point is off the boundary by {:e}", f.as_f64())));
  }
  geometry_unchecked(body, y)
}

/// `ρ_τ(y, s) = (S(Iν,Iν) + S(e^{2πis}Jν, e^{2πis}Jν)) / (2π⟨Z,ν⟩)`.
pub fn rotation_density<T: Scalar, B: ConvexBody<T> + ?Sized>(body: &B, y: Vec4<T>, s: T) -> Result<T> {
  Ok(geometry_at(body, y)?.rotation_density(s))
}

/// Reeb field and rotation density at an arbitrary point near the boundary.
pub(crate) fn reeb_rhs<T: Scalar, B: ConvexBody<T> + ?Sized>(body: &B, y: Vec4<T>, angle: T) -> (Vec4<T>, T) {
  let g = body.gradient(y);
  let gn = norm(g);
  let nu = scale(T::one() / gn, g);
  let zn = T::lit(0.5) * dot(y, nu);
  let h = body.hessian(y);
  let (iv, jv, kv) = (quat_i(nu), quat_j(nu), quat_k(nu));
  let s = [
    [bilinear(&h, iv, iv) / gn, T::zero(), T::zero()],
    [T::zero(), bilinear(&h, jv, jv) / gn, bilinear(&h, jv, kv) / gn],
    [T::zero(), T::zero(), bilinear(&h, kv, kv) / gn],
  ];
  (scale(T::one() / zn, iv), density(&s, zn, angle))
}
