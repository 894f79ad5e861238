use std::path::PathBuf;

use wgeom_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid scenario {}: {source}", path.display())]
    Scenario { path: PathBuf, source: serde_json::Error },
    #[error("cannot write {}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    /// 2 for numerical failures that leave the answer undecided, 3 for bad input.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(
                CoreError::NonFiniteIntegrand { .. }
                | CoreError::NonPositiveIntegrand { .. }
                | CoreError::QuadratureFailed { .. }
                | CoreError::SingularSystem(_),
            ) => 2,
            _ => 3,
        }
    }
}

pub fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}
