use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use ruelle_core::special::{build_special_hamiltonian, verify_special_lemmas, LemmaSettings};

use crate::config::{read_json, DiskmapConfig};
use crate::error::CliResult;
use crate::output::{emit, ResultEnvelope};

/// Invariants and lemma checks of a special disk map.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct DiskmapArgs {
  #[arg(long, default_value = "diskmap.json")]
  pub config: PathBuf,
  /// Iterates behind the rotation averages.
  #[arg(long, default_value_t = 256)]
  pub iters: usize,
  /// Rings of the sampling grid.
  #[arg(long, default_value_t = 160)]
  pub grid: usize,
  /// Period bound of the periodic-point search; `3n` when absent.
  #[arg(long)]
  pub period_bound: Option<usize>,
  #[arg(long)]
  pub json: Option<PathBuf>,
}

impl Default for DiskmapArgs {
  fn default() -> Self {
    Self { config: "diskmap.json".into(), iters: 256, grid: 160, period_bound: None, json: None }
  }
}

#[derive(Debug, Serialize)]
struct Inputs<'a> {
  args: &'a DiskmapArgs,
  config: DiskmapConfig,
}

#[derive(Debug, Serialize)]
struct Setup {
  n: usize,
  disk_count: usize,
  total_area: f64,
  max_diameter: f64,
  delta: f64,
  #[serde(rename = "R")]
  twist: f64,
  boundary_coefficient: f64,
}

/// `σ_φ` and `r_k` over the grid, away from the collars of `∂U`.
#[derive(Debug, Serialize)]
struct Statistics {
  samples: usize,
  tolerance: f64,
  min_action: f64,
  max_action_deviation: f64,
  action_constant: f64,
  min_rotation: f64,
  max_rotation: f64,
  max_rotation_deviation: f64,
}

#[derive(Debug, Serialize)]
struct PeriodicRow {
  period: usize,
  action: f64,
  rotation: f64,
  location: [f64; 2],
  isolated: bool,
  residual: f64,
}

#[derive(Debug, Serialize)]
struct Results {
  setup: Setup,
  sigma: Statistics,
  calabi: f64,
  calabi_predicted: f64,
  ruelle: f64,
  ruelle_predicted: f64,
  periodic_points: Vec<PeriodicRow>,
  action_ok: bool,
  rotation_ok: bool,
  periodic_ok: bool,
}

#[derive(Debug, Serialize)]
struct Diagnostics {
  warnings: Vec<String>,
  period_bound: usize,
  isolated: usize,
  non_isolated: usize,
  settings: LemmaSettings,
}

pub fn run(args: &DiskmapArgs) -> CliResult<()> {
  let config: DiskmapConfig = read_json(&args.config)?;
  let (params, _) = config.into_params()?;
  let system = build_special_hamiltonian(&params)?;
  let settings = LemmaSettings {
    resolution: args.grid,
    iterations: args.iters,
    period_bound: args.period_bound,
    ..Default::default()
  };
  let report = verify_special_lemmas(&system, &settings)?;
  for w in &report.warnings {
    eprintln!("warning: {w}");
  }
  let results = Results {
    setup: Setup {
      n: params.n,
      disk_count: params.disks.len(),
      total_area: params.total_area(),
      max_diameter: params.max_diameter(),
      delta: params.delta,
      twist: params.twist,
      boundary_coefficient: params.boundary_coefficient(),
    },
    sigma: Statistics {
      samples: report.samples,
      tolerance: report.tolerance,
      min_action: report.min_action,
      max_action_deviation: report.max_action_deviation,
      action_constant: report.action_constant,
      min_rotation: report.min_rotation,
      max_rotation: report.max_rotation,
      max_rotation_deviation: report.max_rotation_deviation,
    },
    calabi: report.calabi,
    calabi_predicted: report.calabi_predicted,
    ruelle: report.ruelle,
    ruelle_predicted: report.ruelle_predicted,
    periodic_points: report
      .periodic
      .points
      .iter()
      .map(|p| PeriodicRow {
        period: p.period,
        action: p.action,
        rotation: p.rotation,
        location: p.location,
        isolated: p.isolated,
        residual: p.residual,
      })
      .collect(),
    action_ok: report.action_ok,
    rotation_ok: report.rotation_ok,
    periodic_ok: report.periodic_ok,
  };
  let diagnostics = Diagnostics {
    warnings: report.warnings.clone(),
    period_bound: report.periodic.period_bound,
    isolated: report.periodic.isolated,
    non_isolated: report.periodic.non_isolated,
    settings,
  };
  let inputs = Inputs { args, config };
  emit(&ResultEnvelope::new("diskmap", inputs, results, diagnostics, None), args.json.as_deref())
}
