use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use ruelle_core::hypersurface::{analyze_body, BodyAnalysis, QuarticBody};

use super::quadrature_for;
use crate::config::{read_json, BodyConfig};
use crate::error::CliResult;
use crate::output::{emit, ResultEnvelope};

/// Full analysis of one convex body, including the sandwich check.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct BodyArgs {
  #[arg(long, default_value = "body.json")]
  pub config: PathBuf,
  /// Ruelle time horizon; overrides the config.
  #[arg(long)]
  pub time_horizon: Option<f64>,
  /// Approximate number of Ruelle starting points; overrides the config.
  #[arg(long)]
  pub nodes: Option<usize>,
  #[arg(long)]
  pub json: Option<PathBuf>,
}

impl Default for BodyArgs {
  fn default() -> Self {
    Self { config: "body.json".into(), time_horizon: None, nodes: None, json: None }
  }
}

#[derive(Debug, Serialize)]
struct Inputs<'a> {
  args: &'a BodyArgs,
  config: BodyConfig,
}

#[derive(Debug, Serialize)]
struct Results {
  body: QuarticBody<f64>,
  analysis: BodyAnalysis,
}

#[derive(Debug, Serialize)]
struct Diagnostics {
  ruelle_diagnostic: f64,
  max_drift: f64,
  orbit_search_conclusive: bool,
  sandwich_flags_clear: bool,
  bracket_ok: bool,
}

pub fn run(args: &BodyArgs) -> CliResult<()> {
  let mut config: BodyConfig = read_json(&args.config)?;
  if let Some(t) = args.time_horizon {
    config.analysis.horizon = Some(t);
  }
  if let Some(n) = args.nodes {
    config.analysis.ruelle_nodes = quadrature_for(n);
  }
  let body = config.body.build()?;
  let analysis = analyze_body(&body, &config.analysis)?;
  let diagnostics = Diagnostics {
    ruelle_diagnostic: analysis.ruelle.diagnostic,
    max_drift: analysis.ruelle.max_drift,
    orbit_search_conclusive: analysis.orbits.conclusive(),
    sandwich_flags_clear: analysis.sandwich.flags_clear(),
    bracket_ok: analysis.bracket_ok,
  };
  let seed = config.body.seed();
  let inputs = Inputs { args, config };
  emit(&ResultEnvelope::new("body", inputs, Results { body, analysis }, diagnostics, seed), args.json.as_deref())
}
