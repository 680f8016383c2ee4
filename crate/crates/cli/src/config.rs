//! Config files of the `diskmap` and `body` commands.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use ruelle_core::hypersurface::{
  scan_bodies, smoothed_cube, AnalysisSettings, BoundExperimentSpec, EllipsoidSpec, QuarticBody, RandomBodySettings,
};
use ruelle_core::special::{pack_rings, validate_setup, Disk, Packing, SpecialParams};

use crate::error::{CliError, CliResult};

/// Parses JSON, naming the offending field path and source location on failure.
pub fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T, String> {
  let de = &mut serde_json::Deserializer::from_str(text);
  serde_path_to_error::deserialize(de).map_err(|e| {
    let path = e.path().to_string();
    if path == "." {
      e.inner().to_string()
    } else {
      format!("at `{path}`: {}", e.inner())
    }
  })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
  let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
  parse_json(&text).map_err(|m| CliError::bad_input(format!("{}: {m}", path.display())))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PackingConfig {
  /// Largest total disk area; the fullest ring packing when absent.
  pub target_area: Option<f64>,
  /// Disk radius; `0.3/n` when absent.
  pub radius: Option<f64>,
}

/// Parameters of a special map: explicit `disks` or a `packing` target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiskmapConfig {
  pub n: usize,
  pub disks: Vec<Disk>,
  pub delta: f64,
  #[serde(rename = "R")]
  pub twist: f64,
  pub mollifier_width: Option<f64>,
  pub packing: Option<PackingConfig>,
}

impl Default for DiskmapConfig {
  fn default() -> Self {
    Self { n: 10, disks: Vec::new(), delta: 0.002, twist: 1.0, mollifier_width: None, packing: None }
  }
}

/// Default packing radius for `n` sectors.
pub fn default_radius(n: usize) -> f64 {
  0.3 / n as f64
}

impl DiskmapConfig {
  /// Resolves the disks and validates the setup, reporting every failure
  /// with the field path it refers to.
  pub fn into_params(&self) -> CliResult<(SpecialParams, Option<Packing>)> {
    let mut problems = Vec::new();
    if self.n < 10 {
      problems.push(format!("n: must be at least 10, got {}", self.n));
    }
    if !(self.delta.is_finite() && self.delta > 0.0) {
      problems.push(format!("delta: must be positive, got {}", self.delta));
    }
    if !self.twist.is_finite() {
      problems.push(format!("R: must be finite, got {}", self.twist));
    }
    if let Some(w) = self.mollifier_width {
      if !(w > 0.0 && w <= self.delta) {
        problems.push(format!("mollifier_width: must lie in (0, delta], got {w}"));
      }
    }
    for (i, d) in self.disks.iter().enumerate() {
      if !(d.radius.is_finite() && d.radius > 0.0) {
        problems.push(format!("disks[{i}].radius: must be positive, got {}", d.radius));
      }
      if !d.center.iter().all(|c| c.is_finite()) {
        problems.push(format!("disks[{i}].center: must be finite"));
      }
    }
    if self.packing.is_some() && !self.disks.is_empty() {
      problems.push("packing: give either disks or packing, not both".into());
    }
    if let Some(r) = self.packing.as_ref().and_then(|p| p.radius) {
      if !(r.is_finite() && r > 0.0) {
        problems.push(format!("packing.radius: must be positive, got {r}"));
      }
    }
    if !problems.is_empty() {
      return Err(CliError::bad_input(problems.join("; ")));
    }

    let packing = match &self.packing {
      Some(pc) => {
        let s = pc.radius.unwrap_or_else(|| default_radius(self.n));
        let packing = pack_rings(self.n, s, self.delta, pc.target_area).map_err(|e| {
          let mut err = CliError::from(e);
          err.message = format!("packing: {}", err.message);
          err
        })?;
        Some(packing)
      }
      None => None,
    };
    let disks = packing.as_ref().map_or_else(|| self.disks.clone(), |p| p.disks.clone());
    let params = SpecialParams { n: self.n, disks, delta: self.delta, twist: self.twist, mollifier_width: self.mollifier_width };
    let report = validate_setup(&params);
    if !report.passed() {
      let field = if packing.is_some() { "packing.disks" } else { "disks" };
      let problems: Vec<String> = report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| match (c.name.as_str(), c.offending.is_empty()) {
          ("n_at_least_10", _) => "n: must be at least 10".to_string(),
          ("mollifier_width", _) => "mollifier_width: must lie in (0, delta]".to_string(),
          (name, true) => format!("{name}: failed"),
          (name, false) => {
            let idx: Vec<String> = c.offending.iter().map(|i| format!("{field}[{i}]")).collect();
            format!("{}: {name} fails", idx.join(", "))
          }
        })
        .collect();
      return Err(CliError::bad_input(problems.join("; ")));
    }
    Ok((params, packing))
  }
}

/// A convex body in `R⁴`, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
  /// `E(a, b)`.
  Ellipsoid { a: f64, b: f64 },
  /// `(x−c)ᵀQ(x−c) + Σ cₖ⟨uₖ, x−c⟩⁴ ≤ 1`.
  Quartic(QuarticBody<f64>),
  /// Body `index` of a bound scan with this seed and these settings.
  Random {
    seed: u64,
    #[serde(default)]
    index: usize,
    #[serde(default)]
    settings: RandomBodySettings,
  },
  SmoothedCube { s: f64, eps: f64 },
}

impl BodySpec {
  pub fn seed(&self) -> Option<u64> {
    match self {
      BodySpec::Random { seed, .. } => Some(*seed),
      _ => None,
    }
  }

  pub fn build(&self) -> CliResult<QuarticBody<f64>> {
    let body = match self {
      BodySpec::Ellipsoid { a, b } => {
        let e = EllipsoidSpec::new(*a, *b)?;
        QuarticBody::ellipsoid(e.a, e.b)
      }
      BodySpec::Quartic(q) => q.clone(),
      BodySpec::Random { seed, index, settings } => {
        let spec = BoundExperimentSpec { samples: index + 1, seed: *seed, bodies: *settings, ..Default::default() };
        scan_bodies(&spec).pop().expect("at least one body")
      }
      BodySpec::SmoothedCube { s, eps } => {
        if !(*s > 0.0 && *eps > 0.0) {
          return Err(CliError::bad_input("body: s and eps must be positive"));
        }
        smoothed_cube(*s, *eps)
      }
    };
    body.validate()?;
    Ok(body)
  }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BodyConfig {
  pub body: BodySpec,
  pub analysis: AnalysisSettings,
}

impl Default for BodyConfig {
  fn default() -> Self {
    Self { body: BodySpec::Ellipsoid { a: 1.0, b: 2.0 }, analysis: AnalysisSettings::default() }
  }
}

#[cfg(test)]
mod tests {
  use super::*;

  #[test]
  fn configs_round_trip() {
    let d = DiskmapConfig {
      disks: vec![Disk { center: [0.5, 0.1], radius: 0.02 }],
      packing: None,
      ..Default::default()
    };
    let back: DiskmapConfig = parse_json(&serde_json::to_string(&d).unwrap()).unwrap();
    assert_eq!(back, d);
    let p = DiskmapConfig { packing: Some(PackingConfig { target_area: Some(0.1), radius: None }), ..Default::default() };
    assert_eq!(parse_json::<DiskmapConfig>(&serde_json::to_string(&p).unwrap()).unwrap(), p);
    for body in [
      BodySpec::Ellipsoid { a: 1.0, b: 3.0 },
      BodySpec::Quartic(QuarticBody::ellipsoid(1.0, 2.0)),
      BodySpec::Random { seed: 4, index: 2, settings: RandomBodySettings::default() },
      BodySpec::SmoothedCube { s: 0.6, eps: 0.2 },
    ] {
      let c = BodyConfig { body, ..Default::default() };
      assert_eq!(parse_json::<BodyConfig>(&serde_json::to_string(&c).unwrap()).unwrap(), c);
    }
  }

  #[test]
  fn empty_objects_take_defaults() {
    assert_eq!(parse_json::<DiskmapConfig>("{}").unwrap(), DiskmapConfig::default());
    assert_eq!(parse_json::<BodyConfig>("{}").unwrap(), BodyConfig::default());
  }

  #[test]
  fn parse_errors_name_the_field() {
    let e = parse_json::<DiskmapConfig>(r#"{"n": 10, "disks": [{"center": [0.5], "radius": 0.1}]}"#).unwrap_err();
    assert!(e.contains("disks[0].center"), "{e}");
    let e = parse_json::<DiskmapConfig>("{\"n\": 10,\n \"delta\": }").unwrap_err();
    assert!(e.contains("line 2"), "{e}");
  }

  #[test]
  fn validation_errors_name_the_field() {
    let c = DiskmapConfig { n: 4, delta: -1.0, ..Default::default() };
    let e = c.into_params().unwrap_err().message;
    assert!(e.contains("n:") && e.contains("delta:"), "{e}");
    let c = DiskmapConfig { disks: vec![Disk { center: [0.5, 0.1], radius: 0.02 }], ..Default::default() };
    let e = c.into_params().unwrap_err().message;
    assert!(e.contains("disks[0]") && e.contains("rotation_symmetry"), "{e}");
  }

  #[test]
  fn packing_targets_resolve_to_disks() {
    let c = DiskmapConfig { packing: Some(PackingConfig { target_area: Some(0.05), radius: None }), ..Default::default() };
    let (p, packing) = c.into_params().unwrap();
    assert!(packing.is_some());
    assert!(!p.disks.is_empty() && p.total_area() <= 0.05);
  }
}
