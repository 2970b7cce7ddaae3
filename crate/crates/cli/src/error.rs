use std::fmt;

use sentimen::baselines::BaselineError;
use sentimen::eval::EvalError;
use sentimen::ingest::{FetchError, IngestError};
use sentimen::nn::NnError;
use sentimen::preprocess::PreprocessError;
use sentimen::train::TrainError;
use sentimen::vocab::VocabError;

/// Command failure, classified by exit code.
#[derive(Debug)]
pub enum CliError {
    /// Exit 2: bad input files, flags or configuration.
    Input(String),
    /// Exit 3: the remote comments service failed.
    External(String),
    /// Exit 1: everything else.
    Internal(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Internal(_) => 1,
            CliError::Input(_) => 2,
            CliError::External(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::External(m) | CliError::Internal(m) => m,
        }
    }

    pub fn io(what: impl fmt::Display, e: std::io::Error) -> Self {
        CliError::Internal(format!("{what}: {e}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.message())
    }
}

impl std::error::Error for CliError {}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Io(_) => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<FetchError> for CliError {
    fn from(e: FetchError) -> Self {
        match e {
            FetchError::Invalid(_) => CliError::Input(e.to_string()),
            _ => CliError::External(e.to_string()),
        }
    }
}

impl From<PreprocessError> for CliError {
    fn from(e: PreprocessError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<VocabError> for CliError {
    fn from(e: VocabError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<NnError> for CliError {
    fn from(e: NnError) -> Self {
        match e {
            NnError::NonFinite(_) => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<TrainError> for CliError {
    fn from(e: TrainError) -> Self {
        match e {
            TrainError::Config(_) | TrainError::EmptySet(_) | TrainError::Mismatch(..) => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Internal(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Io(_) => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<BaselineError> for CliError {
    fn from(e: BaselineError) -> Self {
        match e {
            BaselineError::Eval(e) => e.into(),
            BaselineError::Fit { .. } => CliError::Internal(e.to_string()),
        }
    }
}
