use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::diskmap::{find_periodic_points, sweep_nodes, DiskQuadrature, PeriodicPoint};
use crate::error::Result;

use super::system::SpecialSystem;

/// Sampling and search budgets for [`verify_special_lemmas`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LemmaSettings {
  /// Rings of the polar grid on which `σ_φ` and `r_k` are sampled.
  pub resolution: usize,
  /// Iterates `k` behind `r_k`; the pointwise error of `r_k` is `O(1/k)`.
  pub iterations: usize,
  /// Defaults to `3n`.
  pub period_bound: Option<usize>,
  /// Rings of the seed grid of the periodic-point search.
  pub seed_resolution: usize,
}

impl Default for LemmaSettings {
  fn default() -> Self {
    Self { resolution: 160, iterations: 256, period_bound: None, seed_resolution: 24 }
  }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicSummary {
  pub period_bound: usize,
  pub isolated: usize,
  pub non_isolated: usize,
  pub min_action: f64,
  pub min_rotation_plus_period: f64,
  /// Points with `A < π − 10⁻⁶` or `ρ + L ≤ 1`.
  pub violations: Vec<PeriodicPoint<f64>>,
  pub center: Option<PeriodicPoint<f64>>,
  /// Isolated points followed by the retained non-isolated ones.
  pub points: Vec<PeriodicPoint<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
  pub n: usize,
  pub twist: f64,
  pub max_diameter: f64,
  /// `max(10⁻³, 2·d(U))`.
  pub tolerance: f64,
  /// Grid nodes off `N(∂U)`.
  pub samples: usize,
  pub max_action_deviation: f64,
  pub max_rotation_deviation: f64,
  /// `max_action_deviation / d(U)`.
  pub action_constant: f64,
  pub min_action: f64,
  pub min_rotation: f64,
  pub max_rotation: f64,
  pub calabi: f64,
  pub calabi_predicted: f64,
  pub ruelle: f64,
  pub ruelle_predicted: f64,
  pub periodic: PeriodicSummary,
  pub warnings: Vec<String>,
  pub action_ok: bool,
  pub rotation_ok: bool,
  pub periodic_ok: bool,
}

impl LemmaReport {
  pub fn passed(&self) -> bool {
    self.action_ok && self.rotation_ok && self.periodic_ok
  }
}

/// Tolerance on the pointwise rotation bounds `B + min(0,R) ≤ r_k ≤ B + max(0,R)`.
pub const ROTATION_BOUND_TOL: f64 = 5e-3;

/// Compares sampled `σ_φ` and `r_k` with `πB + R·area(D)·χ_D` and
/// `B + R·χ_U` away from `N(∂U)`, checks the global bounds on `σ_φ` and `r_k`,
/// and enumerates periodic points up to the period bound.
pub fn verify_special_lemmas(sys: &SpecialSystem, settings: &LemmaSettings) -> Result<LemmaReport> {
  let p = &sys.params;
  let map = &sys.map;
  let b = p.boundary_coefficient();
  let twist = p.twist;
  let d_u = p.max_diameter();
  let tolerance = (2.0 * d_u).max(1e-3);

  let q = DiskQuadrature::polar(settings.resolution, p.n);
  let mut samples = 0;
  let (mut dev_s, mut dev_r) = (0.0f64, 0.0f64);
  let (mut min_s, mut min_r, mut max_r) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY);
  let (mut cal, mut ru) = (0.0, 0.0);
  sweep_nodes(map, &q, settings.iterations, |z, w, s, r, _| {
    cal += w * s;
    ru += w * r;
    min_s = min_s.min(s);
    min_r = min_r.min(r);
    max_r = max_r.max(r);
    if map.collar_distance(z).is_some_and(|d| d <= p.delta) {
      return;
    }
    samples += 1;
    let (s_pred, r_pred) = match map.disk_containing(z) {
      Some((_, area)) => (PI * b + twist * area, b + twist),
      None => (PI * b, b),
    };
    dev_s = dev_s.max((s - s_pred).abs());
    dev_r = dev_r.max((r - r_pred).abs());
  })?;

  let mut warnings = Vec::new();
  if twist <= -2.0 {
    warnings.push(format!("R = {twist} violates R > -2; the periodic-point bounds need not hold"));
  }
  let k = settings.period_bound.unwrap_or(3 * p.n);
  let found = find_periodic_points(map, k, settings.seed_resolution)?;
  let min_a = found.min_action;
  let min_rl = found.min_rotation_plus_period;
  let violations: Vec<_> =
    found.all().filter(|pt| pt.action < PI - 1e-6 || pt.rotation + pt.period as f64 <= 1.0).cloned().collect();
  let center =
    found.all().find(|pt| pt.period == 1 && pt.location[0].hypot(pt.location[1]) < 1e-9).cloned();

  let lo = b + twist.min(0.0) - ROTATION_BOUND_TOL;
  let hi = b + twist.max(0.0) + ROTATION_BOUND_TOL;
  let action_ok = dev_s <= tolerance && min_s > 0.0;
  let rotation_ok = dev_r <= tolerance && min_r >= lo && max_r <= hi;
  let periodic_ok = twist <= -2.0 || (violations.is_empty() && min_a >= PI - 1e-6 && min_rl > 1.0);
  Ok(LemmaReport {
    n: p.n,
    twist,
    max_diameter: d_u,
    tolerance,
    samples,
    max_action_deviation: dev_s,
    max_rotation_deviation: dev_r,
    action_constant: if d_u > 0.0 { dev_s / d_u } else { 0.0 },
    min_action: min_s,
    min_rotation: min_r,
    max_rotation: max_r,
    calabi: cal,
    calabi_predicted: PI * PI * b + twist * p.sum_area_squared(),
    ruelle: ru,
    ruelle_predicted: PI * b + twist * p.total_area(),
    periodic: PeriodicSummary {
      period_bound: k,
      isolated: found.points.len(),
      non_isolated: found.non_isolated_count,
      min_action: min_a,
      min_rotation_plus_period: min_rl,
      violations,
      center,
      points: found.all().cloned().collect(),
    },
    warnings,
    action_ok,
    rotation_ok,
    periodic_ok,
  })
}
