use std::path::PathBuf;

use thiserror::Error;

use crate::kinematics::AgentType;

#[derive(Debug, Error)]
pub enum GammaError {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("agents overlap: origin lies inside the relative geometry")]
    Overlap,

    #[error("trackable-set estimation failed for {agent_type}: {reason}")]
    EstimationFailed {
        agent_type: AgentType,
        reason: String,
    },

    #[error("no kinematic profile for agent type {0}")]
    MissingProfile(AgentType),

    #[error("kinematic polygon is empty")]
    EmptyKinematicSet,

    #[error("{}:{line}: {message}", source_name(.path))]
    Parse {
        path: Option<PathBuf>,
        line: usize,
        message: String,
    },

    #[error("unknown agent type '{tag}' (valid: {valid})")]
    UnknownAgentType { tag: String, valid: String },

    #[error("length mismatch: predicted {predicted} points, truth {truth} points")]
    LengthMismatch { predicted: usize, truth: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("agent {0} not found")]
    UnknownAgent(u64),

    #[error("frame {0} not present in dataset")]
    UnknownFrame(i64),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn source_name(path: &Option<PathBuf>) -> String {
    match path {
        Some(p) => p.display().to_string(),
        None => "<input>".to_string(),
    }
}

impl GammaError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        GammaError::Parse {
            path: None,
            line,
            message: message.into(),
        }
    }

    /// Attaches a file path to a parse error produced from an in-memory string.
    pub fn with_path(self, path: impl Into<PathBuf>) -> Self {
        match self {
            GammaError::Parse { line, message, .. } => GammaError::Parse {
                path: Some(path.into()),
                line,
                message,
            },
            other => other,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        GammaError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = GammaError> = std::result::Result<T, E>;
