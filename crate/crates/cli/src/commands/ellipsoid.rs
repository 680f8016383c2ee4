use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use ruelle_core::hypersurface::{
  certify, closed_orbit_search, curvature_integrals, ellipsoid_quantities, john_ellipsoid, ruelle_invariant,
  EllipsoidQuantities, EllipsoidSpec, JohnSettings, OrbitSearch, OrbitSearchSettings, QuadratureSize, QuarticBody,
  ReebSettings, RuelleEstimate, SurfaceQuadrature,
};

use super::{quadrature_for, Comparison};
use crate::error::CliResult;
use crate::output::{emit, ResultEnvelope};

/// Closed forms for `∂E(a, b)` with numerical cross-checks.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct EllipsoidArgs {
  #[arg(long, default_value_t = 1.0)]
  pub a: f64,
  #[arg(long, default_value_t = 2.0)]
  pub b: f64,
  /// Ruelle time horizon `T`.
  #[arg(long, default_value_t = 40.0)]
  pub horizon: f64,
  /// Approximate number of starting points for the Ruelle average.
  #[arg(long, default_value_t = 512)]
  pub nodes: usize,
  /// Nodes `u,φ₁,φ₂` of the curvature quadrature.
  #[arg(long, value_parser = parse_size, default_value = "64,32,32")]
  pub quadrature: QuadratureSize,
  /// Also write the envelope here.
  #[arg(long)]
  pub json: Option<PathBuf>,
}

impl Default for EllipsoidArgs {
  fn default() -> Self {
    Self { a: 1.0, b: 2.0, horizon: 40.0, nodes: 512, quadrature: QuadratureSize::default(), json: None }
  }
}

pub fn parse_size(s: &str) -> Result<QuadratureSize, String> {
  let v: Vec<usize> = s.split(',').map(|t| t.trim().parse::<usize>().map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
  match v[..] {
    [u, p1, p2] if u > 0 && p1 > 0 && p2 > 0 => Ok(QuadratureSize::new(u, p1, p2)),
    _ => Err(format!("expected three positive integers u,phi1,phi2, got `{s}`")),
  }
}

#[derive(Debug, Serialize)]
struct Results {
  closed_form: EllipsoidQuantities,
  numeric: Numeric,
  comparisons: Vec<Comparison>,
}

#[derive(Debug, Serialize)]
struct Numeric {
  area: f64,
  total_mean_curvature: f64,
  vol_x: f64,
  contact_vol: f64,
  diam: f64,
  ruelle: f64,
  min_action: Option<f64>,
  sys: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Diagnostics {
  ruelle: RuelleEstimate,
  min_z_dot_nu: f64,
  min_curvature: f64,
  orbit_search: OrbitSearch,
}

pub fn run(args: &EllipsoidArgs) -> CliResult<()> {
  let e = EllipsoidSpec::new(args.a, args.b)?;
  let closed = ellipsoid_quantities(e);
  let body = QuarticBody::ellipsoid(e.a, e.b);
  let quad = SurfaceQuadrature::new(&body, args.quadrature)?;
  let cert = certify(&quad);
  let integrals = curvature_integrals(&body, &quad)?;
  let nodes = SurfaceQuadrature::new(&body, quadrature_for(args.nodes))?;
  let ruelle = ruelle_invariant(&body, &nodes, args.horizon, &ReebSettings::default())?;
  let john = john_ellipsoid(&body, &JohnSettings::default())?;
  let orbits = closed_orbit_search(&body, Some(&john), integrals.contact_vol, &OrbitSearchSettings::default())?;
  let sys = orbits.min_action.map(|c| c * c / integrals.contact_vol);

  let mut comparisons = vec![
    Comparison::new("area", closed.area, integrals.area),
    Comparison::new("total_mean_curvature", closed.total_mean_curvature, integrals.total_h),
    Comparison::new("vol_x", closed.vol_x, integrals.vol_x),
    Comparison::new("contact_vol", closed.contact_vol, integrals.contact_vol),
    Comparison::new("diam", closed.diam, integrals.diam),
    Comparison::new("ruelle", closed.ruelle, ruelle.value),
  ];
  if let (Some(c), Some(s)) = (orbits.min_action, sys) {
    comparisons.push(Comparison::new("min_action", closed.min_action, c));
    comparisons.push(Comparison::new("sys", closed.sys, s));
  }
  let results = Results {
    closed_form: closed,
    numeric: Numeric {
      area: integrals.area,
      total_mean_curvature: integrals.total_h,
      vol_x: integrals.vol_x,
      contact_vol: integrals.contact_vol,
      diam: integrals.diam,
      ruelle: ruelle.value,
      min_action: orbits.min_action,
      sys,
    },
    comparisons,
  };
  let diagnostics = Diagnostics {
    ruelle,
    min_z_dot_nu: cert.min_z_dot_nu,
    min_curvature: cert.min_curvature,
    orbit_search: orbits,
  };
  emit(&ResultEnvelope::new("ellipsoid", args, results, diagnostics, None), args.json.as_deref())
}
