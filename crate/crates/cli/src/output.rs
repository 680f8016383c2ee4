//! Result envelopes and deterministic JSON with 17 significant digits.

use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
  pub tool: &'static str,
  pub version: &'static str,
  pub core_version: &'static str,
  pub seed: Option<u64>,
}

impl Provenance {
  pub fn new(seed: Option<u64>) -> Self {
    Self { tool: "ruelle", version: env!("CARGO_PKG_VERSION"), core_version: ruelle_core::VERSION, seed }
  }
}

/// Everything a command reports. Contains no wall-clock data, so equal
/// inputs give byte-identical output.
#[derive(Debug, Clone, Serialize)]
pub struct ResultEnvelope<I, R, D> {
  pub schema_version: u32,
  pub command: &'static str,
  pub inputs: I,
  pub results: R,
  pub diagnostics: D,
  pub provenance: Provenance,
}

impl<I: Serialize, R: Serialize, D: Serialize> ResultEnvelope<I, R, D> {
  pub fn new(command: &'static str, inputs: I, results: R, diagnostics: D, seed: Option<u64>) -> Self {
    Self { schema_version: SCHEMA_VERSION, command, inputs, results, diagnostics, provenance: Provenance::new(seed) }
  }
}

/// Pretty printer writing every float as `d.dddddddddddddddde±x`.
pub struct FixedDigits<'a>(PrettyFormatter<'a>);

impl Default for FixedDigits<'_> {
  fn default() -> Self {
    Self(PrettyFormatter::with_indent(b"  "))
  }
}

/// `x` with 17 significant digits.
pub fn sig17(x: f64) -> String {
  format!("{x:.16e}")
}

impl Formatter for FixedDigits<'_> {
  fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
    w.write_all(sig17(value).as_bytes())
  }

  fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
    self.write_f64(w, value as f64)
  }

  fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
    self.0.begin_array(w)
  }

  fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
    self.0.end_array(w)
  }

  fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
    self.0.begin_array_value(w, first)
  }

  fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
    self.0.end_array_value(w)
  }

  fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
    self.0.begin_object(w)
  }

  fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
    self.0.end_object(w)
  }

  fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
    self.0.begin_object_key(w, first)
  }

  fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
    self.0.begin_object_value(w)
  }

  fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
    self.0.end_object_value(w)
  }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
  let mut buf = Vec::new();
  let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedDigits::default());
  value.serialize(&mut ser).expect("serializing to memory cannot fail");
  buf.push(b'\n');
  String::from_utf8(buf).expect("serde_json emits UTF-8")
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
  std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

/// Prints the envelope and, when asked, writes it to `json`.
pub fn emit<T: Serialize>(envelope: &T, json: Option<&Path>) -> CliResult<()> {
  let text = to_json(envelope);
  if let Some(path) = json {
    write_file(path, &text)?;
  }
  print!("{text}");
  Ok(())
}

#[cfg(test)]
mod tests {
  use super::*;

  #[test]
  fn floats_carry_seventeen_significant_digits() {
    assert_eq!(sig17(0.1), "1.0000000000000001e-1");
    assert_eq!(sig17(3.0), "3.0000000000000000e0");
    for x in [0.1, 1.0 / 3.0, std::f64::consts::PI, -2.5e-300, 6.02e23] {
      assert_eq!(sig17(x).parse::<f64>().unwrap(), x);
    }
  }

  #[test]
  fn json_round_trips_floats_and_maps_non_finite_to_null() {
    let v = serde_json::json!({"x": [0.1, 2.0], "n": 3, "s": "a"});
    let text = to_json(&v);
    let back: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(back, v);
    assert!(text.contains("1.0000000000000001e-1"));
    assert_eq!(to_json(&f64::NAN).trim(), "null");
  }
}
