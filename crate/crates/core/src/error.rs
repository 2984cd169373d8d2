use thiserror::Error;

use crate::command::CmdId;
use crate::fs::FileName;

/// A violated build precondition. These are reported as data by
/// [`validate_preconditions`](crate::harness::validate_preconditions) and
/// surface as [`Error::Precondition`] from the engines.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("command `{0}` appears more than once in a build")]
    Duplicate(CmdId),
    #[error("the run build is not a permutation of the script build")]
    NotAPermutation,
    #[error("no program is defined for command `{0}`")]
    UnknownCommand(CmdId),
    #[error("command `{cmd}` writes `{file}`, which it also reads")]
    Disjointness { cmd: CmdId, file: FileName },
}

impl Violation {
    /// Short kebab-case tag used in reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Violation::Duplicate(_) => "duplicate",
            Violation::NotAPermutation => "not-a-permutation",
            Violation::UnknownCommand(_) => "unknown-command",
            Violation::Disjointness { .. } => "disjointness",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown command `{0}`")]
    UnknownCmd(CmdId),
    #[error("command `{cmd}` uses unbound variable `{var}`")]
    UnboundVar { cmd: CmdId, var: String },
    #[error("command `{cmd}` writes its own input `{file}`")]
    Disjointness { cmd: CmdId, file: FileName },
    #[error("precondition violated: {0}")]
    Precondition(Violation),
    #[error("build of {0} commands is too large to enumerate (limit 6)")]
    BuildTooLarge(usize),
    #[error("no valid instance after {attempts} attempts for case {case}")]
    GenerationExhausted { case: u64, attempts: usize },
    #[error("unknown theorem `{0}`")]
    UnknownTheorem(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("{0} must be non-empty")]
    EmptyName(&'static str),
    #[error("state file was written by the {found} engine, not {expected}")]
    StateMismatch { expected: String, found: String },
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// The precondition this error represents, if it is one.
    pub fn violation(&self) -> Option<Violation> {
        match self {
            Error::Precondition(v) => Some(v.clone()),
            Error::Disjointness { cmd, file } => Some(Violation::Disjointness {
                cmd: cmd.clone(),
                file: file.clone(),
            }),
            Error::UnknownCmd(cmd) => Some(Violation::UnknownCommand(cmd.clone())),
            _ => None,
        }
    }
}

impl From<Violation> for Error {
    fn from(v: Violation) -> Self {
        Error::Precondition(v)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
