use thiserror::Error;

pub type Result<T, E = LabError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Core(#[from] kms_core::Error),

    /// A malformed input file or flag. `location` names the file, field or
    /// flag, with a line number when one is known.
    #[error("{location}: {message}")]
    Parse { location: String, message: String },

    /// The requested run is inconsistent with what the classifier found.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        LabError::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for the CLI: 1 for precondition failures, 2 for
    /// anything the user has to fix in the inputs.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Precondition(_) => 1,
            LabError::Core(kms_core::Error::RankViolation { .. } | kms_core::Error::SingularSymbol { .. }) => 1,
            _ => 2,
        }
    }
}
