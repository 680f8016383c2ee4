pub mod body;
pub mod bound_scan;
pub mod counterexample;
pub mod diskmap;
pub mod ellipsoid;

use ruelle_core::hypersurface::QuadratureSize;
use serde::Serialize;

/// Quadrature with about `nodes` nodes in the proportions `u : φ₁ : φ₂ = 1 : 2 : 2`.
pub fn quadrature_for(nodes: usize) -> QuadratureSize {
  let u = ((nodes as f64 / 4.0).cbrt().round() as usize).max(1);
  QuadratureSize::new(u, 2 * u, 2 * u)
}

#[derive(Debug, Clone, Serialize)]
pub struct Comparison {
  pub quantity: &'static str,
  pub expected: f64,
  pub numeric: f64,
  pub relative_error: f64,
}

impl Comparison {
  pub fn new(quantity: &'static str, expected: f64, numeric: f64) -> Self {
    Self { quantity, expected, numeric, relative_error: ((numeric - expected) / expected).abs() }
  }
}

#[cfg(test)]
mod tests {
  use super::*;

  #[test]
  fn node_counts_map_to_proportional_grids() {
    assert_eq!(quadrature_for(2048), QuadratureSize::new(8, 16, 16));
    assert_eq!(quadrature_for(1), QuadratureSize::new(1, 2, 2));
  }
}
