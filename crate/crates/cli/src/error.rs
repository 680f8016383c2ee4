use std::fmt;
use std::path::Path;

use ruelle_core::error::{Error, ErrorKind};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
  Ok = 0,
  BadInput = 2,
  Io = 3,
  Infeasible = 4,
  Numeric = 5,
}

#[derive(Debug)]
pub struct CliError {
  pub exit: Exit,
  pub message: String,
}

impl CliError {
  pub fn bad_input(message: impl Into<String>) -> Self {
    Self { exit: Exit::BadInput, message: message.into() }
  }

  pub fn io(path: &Path, err: impl fmt::Display) -> Self {
    Self { exit: Exit::Io, message: format!("{}: {err}", path.display()) }
  }
}

impl fmt::Display for CliError {
  fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    f.write_str(&self.message)
  }
}

impl From<Error> for CliError {
  fn from(e: Error) -> Self {
    let exit = match e.kind() {
      ErrorKind::BadInput => Exit::BadInput,
      ErrorKind::Infeasible => Exit::Infeasible,
      ErrorKind::Numeric => Exit::Numeric,
    };
    Self { exit, message: e.to_string() }
  }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
