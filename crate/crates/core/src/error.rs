//! Error type shared by all modules.

use thiserror::Error;

/// Failure modes of the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
  #[error("matrix is not symplectic: det = {det}")]
  NotSymplectic { det: f64 },
  #[error("path does not start at the identity")]
  PathNotAtIdentity,
  #[error("sampling too coarse: angle jump {jump} turns at sample {index}")]
  SamplingTooCoarse { index: usize, jump: f64 },
  #[error("integration unstable: {0}")]
  StepUnstable(String),
  #[error("degenerate gradient at boundary point (|grad F| = {0})")]
  DegenerateGradient(f64),
  #[error("twist profile infeasible: {0}")]
  InfeasibleProfile(String),
  #[error("packing infeasible: reached area {achieved} of target {target}")]
  PackingInfeasible { achieved: f64, target: f64 },
  #[error("precondition violated: {0}")]
  PreconditionViolated(String),
  #[error("volume must be positive, got {0}")]
  NonPositiveVolume(f64),
  #[error("body is not convex: {0}")]
  NotConvex(String),
  #[error("invalid input: {0}")]
  InvalidInput(String),
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
  BadInput,
  Infeasible,
  Numeric,
}

impl Error {
  pub fn kind(&self) -> ErrorKind {
    match self {
      Error::InvalidInput(_)
      | Error::PreconditionViolated(_)
      | Error::NotSymplectic { .. }
      | Error::PathNotAtIdentity
      | Error::NonPositiveVolume(_)
      | Error::NotConvex(_) => ErrorKind::BadInput,
      Error::PackingInfeasible { .. } | Error::InfeasibleProfile(_) => ErrorKind::Infeasible,
      Error::SamplingTooCoarse { .. } | Error::StepUnstable(_) | Error::DegenerateGradient(_) => {
        ErrorKind::Numeric
      }
    }
  }
}

pub type Result<T> = std::result::Result<T, Error>;
