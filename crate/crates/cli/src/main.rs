//! `ruelle`: command-line driver for the invariants toolkit.
//!
//! Every command prints a JSON result envelope on stdout. Exit codes: 0 ok,
//! 2 bad input, 3 IO, 4 infeasible construction, 5 numeric instability.

mod commands;
mod config;
mod error;
mod output;
mod svg;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{body, bound_scan, counterexample, diskmap, ellipsoid};
use error::Exit;

#[derive(Debug, Parser)]
#[command(name = "ruelle", version, about = "Ruelle invariant, systolic ratio and disk-map experiments")]
struct Cli {
  #[command(subcommand)]
  command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
  /// Closed forms for the ellipsoid E(a, b) with numerical cross-checks.
  Ellipsoid(ellipsoid::EllipsoidArgs),
  /// Scan of (sys, ru) over ellipsoids and random convex bodies.
  BoundScan(bound_scan::BoundScanArgs),
  /// Contact forms on S³ with small or large Ruelle invariant.
  Counterexample(counterexample::CounterexampleArgs),
  /// Invariants and lemma checks of a special disk map.
  Diskmap(diskmap::DiskmapArgs),
  /// Full analysis of a convex body from a config file.
  Body(body::BodyArgs),
}

fn main() -> ExitCode {
  let cli = Cli::parse();
  let result = match &cli.command {
    Command::Ellipsoid(a) => ellipsoid::run(a),
    Command::BoundScan(a) => bound_scan::run(a),
    Command::Counterexample(a) => counterexample::run(a),
    Command::Diskmap(a) => diskmap::run(a),
    Command::Body(a) => body::run(a),
  };
  match result {
    Ok(()) => ExitCode::from(Exit::Ok as u8),
    Err(e) => {
      eprintln!("error: {e}");
      ExitCode::from(e.exit as u8)
    }
  }
}

#[cfg(test)]
mod tests {
  use super::*;
  use config::parse_json;

  fn parsed(args: &[&str]) -> Command {
    Cli::try_parse_from(std::iter::once("ruelle").chain(args.iter().copied())).unwrap().command
  }

  #[test]
  fn defaults_agree_between_flags_and_configs() {
    match parsed(&["ellipsoid"]) {
      Command::Ellipsoid(a) => assert_eq!(a, ellipsoid::EllipsoidArgs::default()),
      c => panic!("{c:?}"),
    }
    match parsed(&["bound-scan"]) {
      Command::BoundScan(a) => assert_eq!(a, bound_scan::BoundScanArgs::default()),
      c => panic!("{c:?}"),
    }
    match parsed(&["counterexample"]) {
      Command::Counterexample(a) => assert_eq!(a, counterexample::CounterexampleArgs::default()),
      c => panic!("{c:?}"),
    }
    match parsed(&["diskmap"]) {
      Command::Diskmap(a) => assert_eq!(a, diskmap::DiskmapArgs::default()),
      c => panic!("{c:?}"),
    }
    match parsed(&["body"]) {
      Command::Body(a) => assert_eq!(a, body::BodyArgs::default()),
      c => panic!("{c:?}"),
    }
  }

  #[test]
  fn run_configs_round_trip() {
    let e = match parsed(&["ellipsoid", "--a", "1.5", "--b", "4", "--quadrature", "8,4,4", "--json", "x.json"]) {
      Command::Ellipsoid(a) => a,
      c => panic!("{c:?}"),
    };
    assert_eq!(parse_json::<ellipsoid::EllipsoidArgs>(&output::to_json(&e)).unwrap(), e);
    let b = match parsed(&["bound-scan", "--samples", "4", "--seed", "3", "--csv", "o.csv", "--ellipsoids-only"]) {
      Command::BoundScan(a) => a,
      c => panic!("{c:?}"),
    };
    assert_eq!(parse_json::<bound_scan::BoundScanArgs>(&output::to_json(&b)).unwrap(), b);
    let c = match parsed(&["counterexample", "--mode", "large", "--kappa", "12.5", "--period-bound", "9"]) {
      Command::Counterexample(a) => a,
      c => panic!("{c:?}"),
    };
    assert_eq!(parse_json::<counterexample::CounterexampleArgs>(&output::to_json(&c)).unwrap(), c);
    assert_eq!(parse_json::<diskmap::DiskmapArgs>("{}").unwrap(), diskmap::DiskmapArgs::default());
    assert_eq!(parse_json::<body::BodyArgs>("{}").unwrap(), body::BodyArgs::default());
  }
}
