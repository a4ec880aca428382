use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] pairanneal::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    /// 1 check failure, 2 configuration, 3 numerical abort.
    pub fn exit_code(&self) -> i32 {
        use pairanneal::Error as E;
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Model(e) => match e {
                E::NotSelfAdjoint { .. }
                | E::EigenNoConvergence { .. }
                | E::TraceDeviation { .. }
                | E::NormDrift { .. }
                | E::StateViolation { .. } => 3,
                _ => 2,
            },
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
