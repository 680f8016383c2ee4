use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::body::{random_convex_body, ConvexBody, QuarticBody, RandomBodySettings};
use super::curvature::{curvature_integrals, CurvatureIntegrals};
use super::ellipsoid::{ellipsoid_quantities, EllipsoidSpec};
use super::john::{john_ellipsoid, JohnEllipsoid, JohnSettings};
use super::orbits::{closed_orbit_search, OrbitSearch, OrbitSearchSettings};
use super::reeb::{iv_flow_averages, ruelle_invariant, ReebSettings, RuelleEstimate};
use super::surface::{certify, BodyCertificate, QuadratureSize, SurfaceQuadrature};
use crate::error::{Error, Result};

/// Ratios outside `[1/C_MAX, C_MAX]` are flagged.
pub const C_MAX: f64 = 256.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichEntry {
  pub quantity: String,
  pub value: f64,
  /// The `(a, b)` expression the quantity is compared with.
  pub prediction: f64,
  pub ratio: f64,
  pub anomalous: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichReport {
  pub a: f64,
  pub b: f64,
  pub entries: Vec<SandwichEntry>,
}

impl SandwichReport {
  pub fn flags_clear(&self) -> bool {
    self.entries.iter().all(|e| !e.anomalous)
  }
}

/// Compares measured quantities with `b^{1/2}`, `ba^{1/2}`, `b`, `ab`, `a`, `a/b`.
pub fn sandwich_report(john: &JohnEllipsoid, integrals: &CurvatureIntegrals, min_action: Option<f64>) -> SandwichReport {
  let (a, b) = (john.a, john.b);
  let mut rows = vec![
    ("diam", integrals.diam, b.sqrt()),
    ("area", integrals.area, b * a.sqrt()),
    ("total_mean_curvature", integrals.total_h, b),
    ("vol_x", integrals.vol_x, a * b),
  ];
  if let Some(c) = min_action {
    rows.push(("min_action", c, a));
    rows.push(("sys", c * c / integrals.contact_vol, a / b));
  }
  let entries = rows
    .into_iter()
    .map(|(name, value, prediction)| {
      let ratio = value / prediction;
      SandwichEntry {
        quantity: name.to_string(),
        value,
        prediction,
        ratio,
        anomalous: !(ratio >= 1.0 / C_MAX && ratio <= C_MAX),
      }
    })
    .collect();
  SandwichReport { a, b, entries }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnalysisSettings {
  pub quadrature: QuadratureSize,
  /// Nodes for the Ruelle time averages.
  pub ruelle_nodes: QuadratureSize,
  /// Ruelle horizon as a multiple of the John radius `a`.
  pub horizon_factor: f64,
  /// Absolute Ruelle horizon; overrides `horizon_factor` when set.
  pub horizon: Option<f64>,
  pub reeb: ReebSettings,
  pub john: JohnSettings,
  pub orbits: OrbitSearchSettings,
}

impl Default for AnalysisSettings {
  fn default() -> Self {
    Self {
      quadrature: QuadratureSize::default(),
      ruelle_nodes: QuadratureSize::new(8, 16, 16),
      horizon_factor: 200.0,
      horizon: None,
      reeb: ReebSettings::default(),
      john: JohnSettings::default(),
      orbits: OrbitSearchSettings::default(),
    }
  }
}

impl AnalysisSettings {
  /// Coarser settings for scans over many bodies.
  pub fn scan() -> Self {
    Self {
      quadrature: QuadratureSize::new(16, 16, 16),
      ruelle_nodes: QuadratureSize::new(12, 6, 6),
      horizon_factor: 40.0,
      horizon: None,
      reeb: ReebSettings { step_scale: 4e-3, step: None },
      john: JohnSettings { samples: 1000, ..JohnSettings::default() },
      orbits: OrbitSearchSettings { random_seeds: 3, ..OrbitSearchSettings::default() },
    }
  }
}

/// Full analysis of one convex body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyAnalysis {
  pub certificate: BodyCertificate,
  pub integrals: CurvatureIntegrals,
  pub john: JohnEllipsoid,
  pub ruelle: RuelleEstimate,
  pub orbits: OrbitSearch,
  /// `min_action² / contact volume`, an upper bound when the search is inconclusive.
  pub sys: Option<f64>,
  /// `Ru / (contact volume)^{1/2}`.
  pub ru: f64,
  pub product: Option<f64>,
  pub bracket: (f64, f64),
  pub bracket_ok: bool,
  pub sandwich: SandwichReport,
}

/// Relative slack of the curvature bracket around `Ru`.
pub const BRACKET_SLACK: f64 = 0.02;

pub fn analyze_body<B: ConvexBody<f64> + ?Sized>(body: &B, settings: &AnalysisSettings) -> Result<BodyAnalysis> {
  let quad = SurfaceQuadrature::new(body, settings.quadrature)?;
  let certificate = certify(&quad);
  if !certificate.star_shaped {
    return Err(Error::InvalidInput(format!("boundary is not star-shaped (min <Z,nu> = {:e})", certificate.min_z_dot_nu)));
  }
  if !certificate.convex {
    return Err(Error::NotConvex(format!("second fundamental form reaches {:e}", certificate.min_curvature)));
  }
  let integrals = curvature_integrals(body, &quad)?;
  let john = john_ellipsoid(body, &settings.john)?;
  let nodes = SurfaceQuadrature::new(body, settings.ruelle_nodes)?;
  let horizon = settings.horizon.unwrap_or(settings.horizon_factor * john.a);
  let ruelle = ruelle_invariant(body, &nodes, horizon, &settings.reeb)?;
  let orbits = closed_orbit_search(body, Some(&john), integrals.contact_vol, &settings.orbits)?;
  let vol = integrals.contact_vol;
  let sys = orbits.min_action.map(|c| c * c / vol);
  let ru = ruelle.value / vol.sqrt();
  let bracket = integrals.ruelle_bracket();
  let bracket_ok = ruelle.value >= bracket.0 * (1.0 - BRACKET_SLACK) && ruelle.value <= bracket.1 * (1.0 + BRACKET_SLACK);
  let sandwich = sandwich_report(&john, &integrals, orbits.min_action);
  Ok(BodyAnalysis {
    certificate,
    integrals,
    john,
    ruelle,
    sys,
    ru,
    product: sys.map(|s| ru * s.sqrt()),
    bracket,
    bracket_ok,
    sandwich,
    orbits,
  })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowKind {
  EllipsoidClosedForm,
  Ellipsoid,
  Random,
}

/// One row of the `sys`–`ru` table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
  pub kind: RowKind,
  pub label: String,
  pub sys: f64,
  pub ru: f64,
  pub product: f64,
  /// False when no closed orbit was found; `sys` is then `NaN`.
  pub orbit_search_conclusive: bool,
  pub bracket_ok: bool,
  pub ruelle_diagnostic: f64,
}

impl BoundRow {
  /// Closed-form row for `E(a, b)`: `ru·sys^{1/2} = sys + 1`.
  pub fn ellipsoid(e: EllipsoidSpec) -> Self {
    let q = ellipsoid_quantities(e);
    let ru = q.ruelle / q.contact_vol.sqrt();
    Self {
      kind: RowKind::EllipsoidClosedForm,
      label: format!("E({}, {})", e.a, e.b),
      sys: q.sys,
      ru,
      product: ru * q.sys.sqrt(),
      orbit_search_conclusive: true,
      bracket_ok: true,
      ruelle_diagnostic: 0.0,
    }
  }

  pub fn from_analysis(kind: RowKind, label: String, an: &BodyAnalysis) -> Self {
    Self {
      kind,
      label,
      sys: an.sys.unwrap_or(f64::NAN),
      ru: an.ru,
      product: an.product.unwrap_or(f64::NAN),
      orbit_search_conclusive: an.orbits.conclusive(),
      bracket_ok: an.bracket_ok,
      ruelle_diagnostic: an.ruelle.diagnostic,
    }
  }
}

/// Ratios `b/a` of the ellipsoid rows.
pub const ELLIPSOID_RATIOS: [f64; 4] = [1.0, 2.0, 5.0, 10.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundExperimentSpec {
  pub samples: usize,
  pub seed: u64,
  pub ellipsoids_only: bool,
  pub bodies: RandomBodySettings,
  pub analysis: AnalysisSettings,
}

impl Default for BoundExperimentSpec {
  fn default() -> Self {
    Self {
      samples: 30,
      seed: 7,
      ellipsoids_only: false,
      bodies: RandomBodySettings::default(),
      analysis: AnalysisSettings::scan(),
    }
  }
}

/// The random bodies of a scan, reproducible from the seed.
pub fn scan_bodies(spec: &BoundExperimentSpec) -> Vec<QuarticBody<f64>> {
  let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
  (0..spec.samples).map(|_| random_convex_body(&mut rng, &spec.bodies)).collect()
}

/// Ellipsoid rows `E(1, r)` cycling through [`ELLIPSOID_RATIOS`], then random bodies.
pub fn bound_experiment(spec: &BoundExperimentSpec) -> Result<Vec<BoundRow>> {
  if spec.samples == 0 {
    return Err(Error::InvalidInput("samples must be at least 1".into()));
  }
  if spec.ellipsoids_only {
    return (0..spec.samples)
      .map(|i| Ok(BoundRow::ellipsoid(EllipsoidSpec::new(1.0, ELLIPSOID_RATIOS[i % ELLIPSOID_RATIOS.len()])?)))
      .collect();
  }
  let mut rows = Vec::with_capacity(spec.samples + ELLIPSOID_RATIOS.len());
  for r in ELLIPSOID_RATIOS {
    let body = QuarticBody::ellipsoid(1.0, r);
    let an = analyze_body(&body, &spec.analysis)?;
    rows.push(BoundRow::from_analysis(RowKind::Ellipsoid, format!("E(1, {r})"), &an));
  }
  for (i, body) in scan_bodies(spec).iter().enumerate() {
    let an = analyze_body(body, &spec.analysis)?;
    rows.push(BoundRow::from_analysis(RowKind::Random, format!("random-{i}"), &an));
  }
  Ok(rows)
}

/// Smallest `A_T` over a grid of starting points in the band
/// `Σ = {π|z₂|² < b/2}` of `∂E(a, b)`.
pub fn band_min_acceleration(e: EllipsoidSpec, time: f64, grid: usize, step: f64) -> Result<f64> {
  let body = QuarticBody::ellipsoid(e.a, e.b);
  let mut min = f64::INFINITY;
  for i in 0..grid {
    // π|z₂|² = b·t with t below 1/2.
    let t = 0.5 * (i as f64 + 0.5) / grid as f64;
    let (r1, r2) = ((e.a * (1.0 - t) / PI).sqrt(), (e.b * t / PI).sqrt());
    for j in 0..grid {
      let phi = 2.0 * PI * j as f64 / grid as f64;
      let y = [r1, 0.0, r2 * phi.cos(), r2 * phi.sin()];
      min = min.min(iv_flow_averages(&body, y, time, step)?.a_t);
    }
  }
  Ok(min)
}
