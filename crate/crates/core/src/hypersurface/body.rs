use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Vec4<T> = [T; 4];
pub type Mat4<T> = [[T; 4]; 4];

pub(crate) fn dot<T: Scalar>(a: Vec4<T>, b: Vec4<T>) -> T {
  a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

pub(crate) fn norm<T: Scalar>(a: Vec4<T>) -> T {
  dot(a, a).sqrt()
}

pub(crate) fn axpy<T: Scalar>(a: T, x: Vec4<T>, y: Vec4<T>) -> Vec4<T> {
  [a * x[0] + y[0], a * x[1] + y[1], a * x[2] + y[2], a * x[3] + y[3]]
}

pub(crate) fn scale<T: Scalar>(a: T, x: Vec4<T>) -> Vec4<T> {
  [a * x[0], a * x[1], a * x[2], a * x[3]]
}

pub(crate) fn mat_vec<T: Scalar>(m: &Mat4<T>, v: Vec4<T>) -> Vec4<T> {
  [dot(m[0], v), dot(m[1], v), dot(m[2], v), dot(m[3], v)]
}

/// `uᵀ M w`.
pub(crate) fn bilinear<T: Scalar>(m: &Mat4<T>, u: Vec4<T>, w: Vec4<T>) -> T {
  dot(u, mat_vec(m, w))
}

/// A compact domain `X = {F ≤ 1}` in `R⁴ = C²`, with coordinates
/// `(x₁, y₁, x₂, y₂)`, star-shaped about the origin.
pub trait ConvexBody<T: Scalar>: Send + Sync {
  fn value(&self, x: Vec4<T>) -> T;
  fn gradient(&self, x: Vec4<T>) -> Vec4<T>;
  fn hessian(&self, x: Vec4<T>) -> Mat4<T>;
}

impl<T: Scalar, B: ConvexBody<T> + ?Sized> ConvexBody<T> for &B {
  fn value(&self, x: Vec4<T>) -> T {
    (**self).value(x)
  }
  fn gradient(&self, x: Vec4<T>) -> Vec4<T> {
    (**self).gradient(x)
  }
  fn hessian(&self, x: Vec4<T>) -> Mat4<T> {
    (**self).hessian(x)
  }
}

/// `F(x) = (x−c)ᵀQ(x−c) + Σ cₖ⟨uₖ, x−c⟩⁴` with `Q` positive definite and
/// `cₖ ≥ 0`; convex as a sum of convex functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar + Deserialize<'de>"))]
pub struct QuarticBody<T> {
  pub q: Mat4<T>,
  #[serde(default = "zero4")]
  pub center: Vec4<T>,
  /// Pairs `(uₖ, cₖ)`.
  #[serde(default)]
  pub quartic: Vec<(Vec4<T>, T)>,
}

fn zero4<T: Scalar>() -> Vec4<T> {
  [T::zero(); 4]
}

impl<T: Scalar> QuarticBody<T> {
  /// The standard ellipsoid `E(a, b) = {π|z₁|²/a + π|z₂|²/b ≤ 1}`.
  pub fn ellipsoid(a: T, b: T) -> Self {
    let pi = T::PI();
    let (p, r) = (pi / a, pi / b);
    let z = T::zero();
    Self { q: [[p, z, z, z], [z, p, z, z], [z, z, r, z], [z, z, z, r]], center: zero4(), quartic: Vec::new() }
  }

  /// Ball of radius `r` about the origin.
  pub fn ball(r: T) -> Self {
    let a = T::PI() * r * r;
    Self::ellipsoid(a, a)
  }

  pub fn translated(mut self, c: Vec4<T>) -> Self {
    for i in 0..4 {
      self.center[i] = self.center[i] + c[i];
    }
    self
  }

  /// Checks symmetry and positive definiteness of `Q` and `cₖ ≥ 0`.
  pub fn validate(&self) -> Result<()> {
    let m = Matrix4::from_fn(|i, j| self.q[i][j].as_f64());
    if (m - m.transpose()).abs().max() > 1e-12 * (1.0 + m.abs().max()) {
      return Err(Error::InvalidInput("quadratic part is not symmetric".into()));
    }
    if m.cholesky().is_none() {
      return Err(Error::InvalidInput("quadratic part is not positive definite".into()));
    }
    if self.quartic.iter().any(|(_, c)| !(c.as_f64() >= 0.0)) {
      return Err(Error::InvalidInput("quartic coefficients must be non-negative".into()));
    }
    if !(self.value(zero4()).as_f64() < 1.0) {
      return Err(Error::InvalidInput("origin must lie in the interior".into()));
    }
    Ok(())
  }
}

impl<T: Scalar> ConvexBody<T> for QuarticBody<T> {
  fn value(&self, x: Vec4<T>) -> T {
    let d = axpy(-T::one(), self.center, x);
    let mut f = bilinear(&self.q, d, d);
    for (u, c) in &self.quartic {
      let t = dot(*u, d);
      f = f + *c * (t * t) * (t * t);
    }
    f
  }

  fn gradient(&self, x: Vec4<T>) -> Vec4<T> {
    let d = axpy(-T::one(), self.center, x);
    let mut g = scale(T::lit(2.0), mat_vec(&self.q, d));
    for (u, c) in &self.quartic {
      let t = dot(*u, d);
      g = axpy(T::lit(4.0) * *c * t * t * t, *u, g);
    }
    g
  }

  fn hessian(&self, x: Vec4<T>) -> Mat4<T> {
    let d = axpy(-T::one(), self.center, x);
    let mut h = [[T::zero(); 4]; 4];
    for i in 0..4 {
      for j in 0..4 {
        h[i][j] = T::lit(2.0) * self.q[i][j];
      }
    }
    for (u, c) in &self.quartic {
      let t = dot(*u, d);
      let k = T::lit(12.0) * *c * t * t;
      for i in 0..4 {
        for j in 0..4 {
          h[i][j] = h[i][j] + k * u[i] * u[j];
        }
      }
    }
    h
  }
}

/// The image `{c + P w}` of a body seen in the coordinates `w`:
/// `F′(w) = F(c + P w)`.
#[derive(Debug, Clone)]
pub struct AffineImage<B, T> {
  pub body: B,
  pub center: Vec4<T>,
  pub map: Mat4<T>,
}

impl<B, T: Scalar> AffineImage<B, T> {
  fn to_body(&self, w: Vec4<T>) -> Vec4<T> {
    axpy(T::one(), self.center, mat_vec(&self.map, w))
  }

  fn pull_vec(&self, g: Vec4<T>) -> Vec4<T> {
    let mut out = [T::zero(); 4];
    for (j, o) in out.iter_mut().enumerate() {
      *o = (0..4).map(|i| self.map[i][j] * g[i]).sum();
    }
    out
  }
}

impl<T: Scalar, B: ConvexBody<T>> ConvexBody<T> for AffineImage<B, T> {
  fn value(&self, w: Vec4<T>) -> T {
    self.body.value(self.to_body(w))
  }

  fn gradient(&self, w: Vec4<T>) -> Vec4<T> {
    self.pull_vec(self.body.gradient(self.to_body(w)))
  }

  fn hessian(&self, w: Vec4<T>) -> Mat4<T> {
    let h = self.body.hessian(self.to_body(w));
    let p = &self.map;
    let mut out = [[T::zero(); 4]; 4];
    for a in 0..4 {
      for b in 0..4 {
        let mut s = T::zero();
        for i in 0..4 {
          for j in 0..4 {
            s = s + p[i][a] * h[i][j] * p[j][b];
          }
        }
        out[a][b] = s;
      }
    }
    out
  }
}

/// The boundary point `r·θ` on the ray through the unit vector `θ`.
pub fn boundary_point<T: Scalar, B: ConvexBody<T> + ?Sized>(body: &B, theta: Vec4<T>) -> Result<Vec4<T>> {
  Ok(scale(radial_distance(body, theta)?, theta))
}

/// Distance `r(θ)` from the origin to the boundary along `θ`.
pub fn radial_distance<T: Scalar, B: ConvexBody<T> + ?Sized>(body: &B, theta: Vec4<T>) -> Result<T> {
  let one = T::one();
  if !(body.value([T::zero(); 4]) < one) {
    return Err(Error::InvalidInput("origin is not inside the body".into()));
  }
  let (mut lo, mut hi) = (T::zero(), one);
  let mut doublings = 0;
  while body.value(scale(hi, theta)) < one {
    lo = hi;
    hi = hi * T::lit(2.0);
    doublings += 1;
    if doublings > 200 {
      return Err(Error::InvalidInput("body is unbounded along a ray".into()));
    }
  }
  // Safeguarded Newton on f(t) = F(tθ) − 1.
  let mut t = T::lit(0.5) * (lo + hi);
  for _ in 0..200 {
    let p = scale(t, theta);
    let f = body.value(p) - one;
    if f < T::zero() {
      lo = t;
    } else {
      hi = t;
    }
    let df = dot(body.gradient(p), theta);
    let mut next = if df > T::zero() { t - f / df } else { T::lit(0.5) * (lo + hi) };
    if !(next > lo && next < hi) {
      next = T::lit(0.5) * (lo + hi);
    }
    if (next - t).abs() <= T::epsilon() * T::lit(4.0) * t || hi - lo <= T::epsilon() * T::lit(4.0) * hi {
      return Ok(next);
    }
    t = next;
  }
  Ok(t)
}

/// Moves `y` back onto `{F = 1}` by Newton steps along `∇F`.
pub fn project_to_boundary<T: Scalar, B: ConvexBody<T> + ?Sized>(body: &B, y: Vec4<T>) -> Vec4<T> {
  let mut y = y;
  for _ in 0..4 {
    let f = body.value(y) - T::one();
    if f.abs() <= T::epsilon() * T::lit(8.0) {
      break;
    }
    let g = body.gradient(y);
    y = axpy(-f / dot(g, g), g, y);
  }
  y
}

/// Parameters of [`random_convex_body`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RandomBodySettings {
  /// Symplectic radii of the quadratic part are drawn log-uniformly from this range.
  pub radii: (f64, f64),
  /// Number of quartic terms.
  pub quartic_terms: usize,
  /// Quartic coefficients relative to the quadratic scale, drawn from `[0, max]`.
  pub quartic_strength: f64,
  /// Largest offset of the quadratic center from the origin, relative to the inradius.
  pub offset: f64,
}

impl Default for RandomBodySettings {
  fn default() -> Self {
    Self { radii: (0.5, 3.0), quartic_terms: 3, quartic_strength: 1.0, offset: 0.2 }
  }
}

fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Vector4<f64> {
  loop {
    let v: Vector4<f64> = Vector4::from_fn(|_, _| StandardNormal.sample(rng));
    let n: f64 = v.norm();
    if n > 1e-6 {
      return v / n;
    }
  }
}

/// A smooth convex body: a randomly rotated ellipsoid with random symplectic
/// radii, plus non-negative quartic ridges `cₖ⟨uₖ, x⟩⁴`.
pub fn random_convex_body<R: Rng + ?Sized>(rng: &mut R, settings: &RandomBodySettings) -> QuarticBody<f64> {
  let (lo, hi) = settings.radii;
  let mut d = [0.0; 4];
  for k in 0..2 {
    let a: f64 = (lo.ln() + (hi.ln() - lo.ln()) * rng.gen::<f64>()).exp();
    d[2 * k] = PI / a;
    d[2 * k + 1] = PI / a;
  }
  let g: Matrix4<f64> = Matrix4::from_fn(|_, _| StandardNormal.sample(rng));
  let o = g.qr().q();
  let q = o * Matrix4::from_diagonal(&Vector4::from(d)) * o.transpose();
  let scale_q = d.iter().copied().fold(0.0, f64::max);
  let quartic = (0..settings.quartic_terms)
    .map(|_| {
      let u = random_unit(rng);
      let c = settings.quartic_strength * scale_q * scale_q * rng.gen::<f64>();
      ([u[0], u[1], u[2], u[3]], c)
    })
    .collect();
  let inradius = (1.0 / scale_q).sqrt();
  let c = random_unit(rng) * (settings.offset * inradius * rng.gen::<f64>());
  QuarticBody {
    q: std::array::from_fn(|i| std::array::from_fn(|j| q[(i, j)])),
    center: [c[0], c[1], c[2], c[3]],
    quartic,
  }
}

/// `ε|x|² + Σᵢ (xᵢ/s)⁴`: a smoothed hypercube of half-width about `s`.
pub fn smoothed_cube(s: f64, eps: f64) -> QuarticBody<f64> {
  let mut q = [[0.0; 4]; 4];
  for (i, row) in q.iter_mut().enumerate() {
    row[i] = eps / (s * s);
  }
  let quartic = (0..4)
    .map(|i| {
      let mut u = [0.0; 4];
      u[i] = 1.0 / s;
      (u, 1.0)
    })
    .collect();
  QuarticBody { q, center: [0.0; 4], quartic }
}
