use nalgebra::{Matrix5, Vector5};
use serde::{Deserialize, Serialize};

use super::body::{dot, norm, radial_distance, scale, ConvexBody, Vec4};
use super::surface::{sphere_point, SurfaceQuadrature};
use crate::error::Result;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvatureIntegrals {
  pub area: f64,
  pub total_h: f64,
  /// `∫ S(Iν,Iν) dvol_σ`.
  pub s_iv_integral: f64,
  pub vol_x: f64,
  pub contact_vol: f64,
  pub diam: f64,
}

impl CurvatureIntegrals {
  /// `((1/2π)∫S(Iν,Iν), (3/2π)∫H)`, the bracket around `Ru`.
  pub fn ruelle_bracket(&self) -> (f64, f64) {
    let tau = std::f64::consts::TAU;
    (self.s_iv_integral / tau, 3.0 * self.total_h / tau)
  }

  /// `area² / (3·diam²·∫H)`, a lower bound for `∫S(Iν,Iν)`.
  pub fn s_iv_lower_bound(&self) -> f64 {
    self.area * self.area / (3.0 * self.diam * self.diam * self.total_h)
  }
}

/// Number of directions used for the support function.
pub const SUPPORT_DIRECTIONS: usize = 4096;

pub fn curvature_integrals<T: Scalar, B: ConvexBody<T> + ?Sized>(body: &B, quad: &SurfaceQuadrature<T>) -> Result<CurvatureIntegrals> {
  let contact_vol = quad.contact_volume().as_f64();
  Ok(CurvatureIntegrals {
    area: quad.area().as_f64(),
    total_h: quad.integrate_area(|n| n.geometry.curvature.mean).as_f64(),
    s_iv_integral: quad.integrate_area(|n| n.geometry.curvature.s[0][0]).as_f64(),
    vol_x: 0.5 * contact_vol,
    contact_vol,
    diam: diameter(body, SUPPORT_DIRECTIONS)?,
  })
}

/// Deterministic directions on `S³` from a product grid of about `count` points.
pub fn sphere_directions(count: usize) -> Vec<Vec4<f64>> {
  let side = ((count as f64).cbrt().round() as usize).max(1);
  let tau = std::f64::consts::TAU;
  let mut out = Vec::with_capacity(side * side * side);
  for i in 0..side {
    let u = (i as f64 + 0.5) / side as f64;
    for j in 0..side {
      for k in 0..side {
        // Offset the second angle per row so directions do not line up.
        let p1 = tau * (j as f64 + 0.5) / side as f64;
        let p2 = tau * (k as f64 + 0.5 + 0.5 * j as f64 / side as f64) / side as f64;
        out.push(sphere_point(u, p1, p2));
      }
    }
  }
  out
}

/// Support point `argmax_{y ∈ Y} ⟨y, u⟩` and the value `h(u)`, for unit `u`.
pub fn support<T: Scalar, B: ConvexBody<T> + ?Sized>(body: &B, u: Vec4<f64>) -> Result<(Vec4<f64>, f64)> {
  let ut = u.map(T::lit);
  let mut y = scale(radial_distance(body, ut)?, ut).map(|v| v.as_f64());
  let mut best = (y, dot(y, u));
  let g0 = body.gradient(y.map(T::lit)).map(|v| v.as_f64());
  // Lagrange system μ∇F(y) = u, F(y) = 1, solved by damped Newton.
  let mut mu = 1.0 / norm(g0);
  let residual = |y: Vec4<f64>, mu: f64| -> (Vec5, f64) {
    let yt = y.map(T::lit);
    let g = body.gradient(yt).map(|v| v.as_f64());
    let f = body.value(yt).as_f64() - 1.0;
    let r = Vector5::new(mu * g[0] - u[0], mu * g[1] - u[1], mu * g[2] - u[2], mu * g[3] - u[3], f);
    let n = r.norm();
    (r, n)
  };
  let (mut r, mut rn) = residual(y, mu);
  for _ in 0..50 {
    if rn < 1e-14 {
      break;
    }
    let yt = y.map(T::lit);
    let g = body.gradient(yt).map(|v| v.as_f64());
    let h = body.hessian(yt);
    let mut jac = Matrix5::zeros();
    for i in 0..4 {
      for j in 0..4 {
        jac[(i, j)] = mu * h[i][j].as_f64();
      }
      jac[(i, 4)] = g[i];
      jac[(4, i)] = g[i];
    }
    let Some(d) = jac.lu().solve(&(-r)) else { break };
    let mut t = 1.0;
    let mut moved = false;
    for _ in 0..30 {
      let ny = [y[0] + t * d[0], y[1] + t * d[1], y[2] + t * d[2], y[3] + t * d[3]];
      let nmu = mu + t * d[4];
      let (nr, nrn) = residual(ny, nmu);
      if nmu > 0.0 && nrn < rn {
        y = ny;
        mu = nmu;
        r = nr;
        rn = nrn;
        moved = true;
        break;
      }
      t *= 0.5;
    }
    if !moved {
      break;
    }
  }
  // Snap to the level set along the ray through the origin and keep the better candidate.
  let dir = scale(1.0 / norm(y), y);
  let on = scale(radial_distance(body, dir.map(T::lit))?.as_f64(), dir);
  let h = dot(on, u);
  if h > best.1 {
    best = (on, h);
  }
  Ok(best)
}

type Vec5 = Vector5<f64>;

/// `max_u (h(u) + h(−u))` over sampled directions.
pub fn diameter<T: Scalar, B: ConvexBody<T> + ?Sized>(body: &B, directions: usize) -> Result<f64> {
  let mut d = 0.0f64;
  for u in sphere_directions(directions) {
    let (_, hp) = support(body, u)?;
    let (_, hm) = support(body, u.map(|v| -v))?;
    d = d.max(hp + hm);
  }
  Ok(d)
}
