use std::fmt;

use biortho_dqpt::DqptError;

/// A command failure together with the exit status it maps to.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, config keys or parameter values (exit 2).
    Usage(String),
    /// Boundary or exceptional-point refusal (exit 3).
    Refused(String),
    /// Numerical residue, I/O error or failed comparison (exit 1).
    Failed(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Refused(_) => 3,
            Failure::Failed(_) => 1,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Refused(m) | Failure::Failed(m) => f.write_str(m),
        }
    }
}

impl From<DqptError> for Failure {
    fn from(e: DqptError) -> Self {
        if e.is_validation() {
            Failure::Usage(e.to_string())
        } else if e.is_refusal() {
            Failure::Refused(e.to_string())
        } else {
            Failure::Failed(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Failed(format!("i/o error: {e}"))
    }
}

pub type CmdResult<T = ()> = Result<T, Failure>;
