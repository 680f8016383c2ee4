use serde::{Deserialize, Serialize};

use super::body::{dot, radial_distance, scale, ConvexBody, Vec4};
use super::frame::{geometry_at, Geometry};
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::scalar::Scalar;

/// Node counts in `(u, φ₁, φ₂)` for `θ = (√(1−u) e^{iφ₁}, √u e^{iφ₂})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSize {
  pub u: usize,
  pub phi1: usize,
  pub phi2: usize,
}

impl QuadratureSize {
  pub const fn new(u: usize, phi1: usize, phi2: usize) -> Self {
    Self { u, phi1, phi2 }
  }

  pub fn count(&self) -> usize {
    self.u * self.phi1 * self.phi2
  }
}

impl Default for QuadratureSize {
  fn default() -> Self {
    Self::new(64, 32, 32)
  }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceNode<T> {
  pub theta: Vec4<T>,
  pub geometry: Geometry<T>,
  /// Weight for `dvol_σ`.
  pub area_weight: T,
  /// Weight for `λ ∧ dλ = ⟨Z,ν⟩ dvol_σ`.
  pub contact_weight: T,
}

/// Product rule on `S³` (Gauss–Legendre in `u`, uniform in the angles)
/// pushed to the boundary along rays: `dvol_σ = r³/⟨θ,ν⟩ dΩ`, `dΩ = ½ du dφ₁ dφ₂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceQuadrature<T> {
  pub size: QuadratureSize,
  pub nodes: Vec<SurfaceNode<T>>,
}

/// Unit vector with product-angle coordinates.
pub fn sphere_point<T: Scalar>(u: T, phi1: T, phi2: T) -> Vec4<T> {
  let (c, s) = ((T::one() - u).max(T::zero()).sqrt(), u.max(T::zero()).sqrt());
  [c * phi1.cos(), c * phi1.sin(), s * phi2.cos(), s * phi2.sin()]
}

impl<T: Scalar> SurfaceQuadrature<T> {
  pub fn new<B: ConvexBody<T> + ?Sized>(body: &B, size: QuadratureSize) -> Result<Self> {
    if size.count() == 0 {
      return Err(Error::InvalidInput("quadrature needs at least one node per coordinate".into()));
    }
    let us = gauss_legendre(size.u, T::zero(), T::one());
    let (d1, d2) = (T::two_pi() / T::lit(size.phi1 as f64), T::two_pi() / T::lit(size.phi2 as f64));
    let mut nodes = Vec::with_capacity(size.count());
    for &(u, wu) in &us {
      let w = T::lit(0.5) * wu * d1 * d2;
      for i in 0..size.phi1 {
        let p1 = d1 * T::lit(i as f64 + 0.5);
        for j in 0..size.phi2 {
          let p2 = d2 * T::lit(j as f64 + 0.5);
          let theta = sphere_point(u, p1, p2);
          let r = radial_distance(body, theta)?;
          let y = scale(r, theta);
          let geometry = geometry_at(body, y)?;
          let cos = dot(theta, geometry.frame.nu);
          let r3 = r * r * r;
          nodes.push(SurfaceNode {
            theta,
            geometry,
            area_weight: r3 / cos * w,
            contact_weight: T::lit(0.5) * r3 * r * w,
          });
        }
      }
    }
    Ok(Self { size, nodes })
  }

  pub fn area(&self) -> T {
    self.nodes.iter().map(|n| n.area_weight).sum()
  }

  pub fn contact_volume(&self) -> T {
    self.nodes.iter().map(|n| n.contact_weight).sum()
  }

  /// `∫_Y f dvol_σ`.
  pub fn integrate_area(&self, f: impl Fn(&SurfaceNode<T>) -> T) -> T {
    self.nodes.iter().map(|n| f(n) * n.area_weight).sum()
  }

  /// `∫_Y f λ∧dλ`.
  pub fn integrate_contact(&self, f: impl Fn(&SurfaceNode<T>) -> T) -> T {
    self.nodes.iter().map(|n| f(n) * n.contact_weight).sum()
  }
}

/// Star-shapedness and convexity evidence over a sample of boundary points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BodyCertificate {
  pub samples: usize,
  pub min_z_dot_nu: f64,
  /// Smallest eigenvalue of `S` over the sample.
  pub min_curvature: f64,
  pub star_shaped: bool,
  pub convex: bool,
}

pub const CONVEXITY_TOLERANCE: f64 = -1e-9;

pub fn certify<T: Scalar>(quad: &SurfaceQuadrature<T>) -> BodyCertificate {
  let mut min_z = f64::INFINITY;
  let mut min_k = f64::INFINITY;
  for n in &quad.nodes {
    min_z = min_z.min(n.geometry.frame.z_dot_nu.as_f64());
    min_k = min_k.min(n.geometry.curvature.min_eigenvalue());
  }
  BodyCertificate {
    samples: quad.nodes.len(),
    min_z_dot_nu: min_z,
    min_curvature: min_k,
    star_shaped: min_z > 0.0,
    convex: min_k >= CONVEXITY_TOLERANCE,
  }
}
