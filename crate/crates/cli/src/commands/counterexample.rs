use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use ruelle_core::openbook::{counterexample, ContactSettings, CounterexampleMode, CounterexampleReport, Verdict};

use crate::error::CliResult;
use crate::output::{emit, ResultEnvelope};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
  Small,
  Large,
}

impl From<Mode> for CounterexampleMode {
  fn from(m: Mode) -> Self {
    match m {
      Mode::Small => CounterexampleMode::Small,
      Mode::Large => CounterexampleMode::Large,
    }
  }
}

/// Contact forms on `S³` with prescribed Ruelle invariant and systolic ratio.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(default)]
pub struct CounterexampleArgs {
  #[arg(long, value_enum, default_value_t = Mode::Small)]
  pub mode: Mode,
  #[arg(long, default_value_t = 20.0)]
  pub kappa: f64,
  /// Period bound `K` of the orbit search; `3n` when absent.
  #[arg(long)]
  pub period_bound: Option<usize>,
  /// Rings of the disk quadrature.
  #[arg(long, default_value_t = 200)]
  pub resolution: usize,
  #[arg(long)]
  pub json: Option<PathBuf>,
}

impl Default for CounterexampleArgs {
  fn default() -> Self {
    Self { mode: Mode::Small, kappa: 20.0, period_bound: None, resolution: 200, json: None }
  }
}

#[derive(Debug, Serialize)]
struct Results {
  volume: f64,
  systolic_ratio: f64,
  ruelle: f64,
  dynamically_convex: Verdict,
  report: CounterexampleReport,
}

#[derive(Debug, Serialize)]
struct Diagnostics {
  period_bound: usize,
  ruelle_diagnostic: f64,
  non_isolated_orbits: usize,
  settings: ContactSettings,
}

pub fn run(args: &CounterexampleArgs) -> CliResult<()> {
  let settings = ContactSettings { resolution: args.resolution, period_bound: args.period_bound, ..Default::default() };
  let report = counterexample(args.mode.into(), args.kappa, None, &settings)?;
  let n = &report.normalized;
  let diagnostics = Diagnostics {
    period_bound: n.period_bound,
    ruelle_diagnostic: n.ruelle_diagnostic,
    non_isolated_orbits: n.non_isolated_count,
    settings,
  };
  let results = Results {
    volume: n.volume,
    systolic_ratio: n.systolic_ratio,
    ruelle: n.ruelle,
    dynamically_convex: n.dynamically_convex,
    report,
  };
  emit(&ResultEnvelope::new("counterexample", args, results, diagnostics, None), args.json.as_deref())
}
