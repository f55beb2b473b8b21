use std::fmt;

use thiserror::Error;

/// One violated configuration invariant, tagged with the offending key path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub key: String,
    pub message: String,
}

impl ConfigIssue {
    pub fn new(key: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.key, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of a closed-form model.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {}", join_issues(.0))]
    Config(Vec<ConfigIssue>),

    #[error("protocol error: {0}")]
    Protocol(String),

    #[error("episode is done; reset before stepping")]
    EpisodeDone,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join_issues(issues: &[ConfigIssue]) -> String {
    issues
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
