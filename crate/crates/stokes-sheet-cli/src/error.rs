use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("numerical breakdown: {0}")]
    Breakdown(String),

    #[error("numerical failure: {0}")]
    Numerics(#[from] stokes_sheet::Error),

    #[error("{failed} of {total} validation checks failed")]
    Validation { failed: usize, total: usize },

    #[error("output error: {0:#}")]
    Output(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Breakdown(_) | CliError::Numerics(_) => 3,
            CliError::Validation { .. } => 4,
            CliError::Output(_) => 1,
        }
    }
}
