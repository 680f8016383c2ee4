use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use ruelle_core::hypersurface::{bound_experiment, BoundExperimentSpec, BoundRow, RowKind};

use crate::error::{CliError, CliResult};
use crate::output::{emit, sig17, write_file, ResultEnvelope};
use crate::svg::scatter_svg;

/// Scan of `(sys, ru)` over ellipsoids and random convex bodies.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundScanArgs {
  /// Random bodies, or ellipsoid rows with `--ellipsoids-only`.
  #[arg(long, default_value_t = 30)]
  pub samples: usize,
  #[arg(long, default_value_t = 7)]
  pub seed: u64,
  #[arg(long, default_value = "bound-scan.csv")]
  pub csv: PathBuf,
  #[arg(long)]
  pub svg: Option<PathBuf>,
  /// Closed-form ellipsoid rows only.
  #[arg(long)]
  pub ellipsoids_only: bool,
  #[arg(long)]
  pub json: Option<PathBuf>,
}

impl Default for BoundScanArgs {
  fn default() -> Self {
    Self { samples: 30, seed: 7, csv: "bound-scan.csv".into(), svg: None, ellipsoids_only: false, json: None }
  }
}

pub const CSV_HEADER: [&str; 3] = ["sys", "ru", "product"];

pub fn write_csv(path: &Path, rows: &[BoundRow]) -> CliResult<()> {
  let io = |e: csv::Error| CliError::io(path, e);
  let mut w = csv::Writer::from_path(path).map_err(io)?;
  w.write_record(CSV_HEADER).map_err(io)?;
  for r in rows {
    w.write_record([sig17(r.sys), sig17(r.ru), sig17(r.product)]).map_err(io)?;
  }
  w.flush().map_err(|e| CliError::io(path, e))
}

#[derive(Debug, Serialize)]
struct Summary {
  rows: usize,
  all_products_finite_positive: bool,
  min_product: f64,
  max_product: f64,
  /// Largest `|ru·sys^{1/2} − (sys + 1)| / (sys + 1)` over ellipsoid rows.
  ellipsoid_identity_error: f64,
  brackets_ok: bool,
}

#[derive(Debug, Serialize)]
struct Results {
  rows: Vec<BoundRow>,
  summary: Summary,
}

#[derive(Debug, Serialize)]
struct Diagnostics {
  inconclusive_orbit_searches: usize,
  max_ruelle_diagnostic: f64,
  spec: BoundExperimentSpec,
}

pub fn run(args: &BoundScanArgs) -> CliResult<()> {
  let spec = BoundExperimentSpec {
    samples: args.samples,
    seed: args.seed,
    ellipsoids_only: args.ellipsoids_only,
    ..Default::default()
  };
  let rows = bound_experiment(&spec)?;
  write_csv(&args.csv, &rows)?;
  if let Some(path) = &args.svg {
    write_file(path, &scatter_svg(&rows))?;
  }
  let products = rows.iter().map(|r| r.product);
  let summary = Summary {
    rows: rows.len(),
    all_products_finite_positive: rows.iter().all(|r| r.product.is_finite() && r.product > 0.0),
    min_product: products.clone().fold(f64::INFINITY, f64::min),
    max_product: products.fold(f64::NEG_INFINITY, f64::max),
    ellipsoid_identity_error: rows
      .iter()
      .filter(|r| r.kind != RowKind::Random)
      .map(|r| ((r.product - (r.sys + 1.0)) / (r.sys + 1.0)).abs())
      .fold(0.0, f64::max),
    brackets_ok: rows.iter().all(|r| r.bracket_ok),
  };
  let diagnostics = Diagnostics {
    inconclusive_orbit_searches: rows.iter().filter(|r| !r.orbit_search_conclusive).count(),
    max_ruelle_diagnostic: rows.iter().map(|r| r.ruelle_diagnostic).fold(0.0, f64::max),
    spec,
  };
  let results = Results { rows, summary };
  emit(&ResultEnvelope::new("bound-scan", args, results, diagnostics, Some(args.seed)), args.json.as_deref())
}
