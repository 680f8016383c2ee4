use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Symplectic radii `0 < a ≤ b` of `E(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidSpec {
  pub a: f64,
  pub b: f64,
}

impl EllipsoidSpec {
  pub fn new(a: f64, b: f64) -> Result<Self> {
    if !(a > 0.0 && a.is_finite() && b.is_finite()) || a > b {
      return Err(Error::InvalidInput(format!("ellipsoid radii need 0 < a <= b, got a = {a}, b = {b}")));
    }
    Ok(Self { a, b })
  }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipsoidQuantities {
  pub diam: f64,
  pub area: f64,
  pub total_mean_curvature: f64,
  pub vol_x: f64,
  pub contact_vol: f64,
  pub min_action: f64,
  pub sys: f64,
  pub ruelle: f64,
}

/// Closed forms for `∂E(a, b)`.
pub fn ellipsoid_quantities(e: EllipsoidSpec) -> EllipsoidQuantities {
  let EllipsoidSpec { a, b } = e;
  let t = b / a;
  // Relative gap below which the a = b limits are used; the series error is O(gap²).
  let near = (t - 1.0).abs() < 1e-6;
  let area = if near {
    2.0 * PI.sqrt() * a.powf(1.5) * (1.0 + 0.75 * (t - 1.0))
  } else {
    4.0 * PI.sqrt() / 3.0 * (b * b * a.sqrt() - b.sqrt() * a * a) / (b - a)
  };
  // ab/(b−a)·ln(b/a) = a·t·ln t/(t−1).
  let log_term = if near {
    let d = t - 1.0;
    a * (1.0 + d / 2.0 - d * d / 6.0)
  } else {
    a * b / (b - a) * t.ln()
  };
  EllipsoidQuantities {
    diam: 2.0 * (b / PI).sqrt(),
    area,
    total_mean_curvature: 2.0 * PI / 3.0 * (a + b + log_term),
    vol_x: a * b / 2.0,
    contact_vol: a * b,
    min_action: a,
    sys: a / b,
    ruelle: a + b,
  }
}

/// Mean curvature of `∂E(1, b)` at `μ₁ = π|z₁|²`.
pub fn ellipsoid_mean_curvature(b: f64, mu1: f64) -> f64 {
  PI.sqrt() / (3.0 * b.sqrt()) * ((2.0 * b + 1.0) + (b * b - 1.0) * mu1) / (1.0 + (b - 1.0) * mu1).powf(1.5)
}
