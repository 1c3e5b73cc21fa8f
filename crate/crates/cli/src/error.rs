use sta_core::StaError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("numerical failure: {0}")]
    Numerical(StaError),
    #[error("protocol file has no `{0}` section")]
    MissingSection(&'static str),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 0 success, 1 invalid input, 2 numerical failure, 3 missing section.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Invalid(_) | CliError::Io { .. } => 1,
            CliError::Numerical(_) => 2,
            CliError::MissingSection(_) => 3,
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.display().to_string(), source }
    }
}

/// Parameter errors come from the file; everything else from the numerics.
impl From<StaError> for CliError {
    fn from(e: StaError) -> Self {
        match e {
            StaError::InvalidParameter { .. } | StaError::FockOutOfRange { .. } => CliError::Invalid(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
