use std::fmt;
use std::path::PathBuf;

use crate::NodeId;

/// A single configuration problem, tied to the key (and line, when known) it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigIssue {
    pub key: String,
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}: {}", self.key, self.message),
            None => write!(f, "{}: {}", self.key, self.message),
        }
    }
}

/// Every problem found while parsing or validating a scenario, not just the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigErrors(pub Vec<ConfigIssue>);

impl ConfigErrors {
    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|i| i.key.as_str())
    }
}

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} configuration error(s)", self.0.len())?;
        for issue in &self.0 {
            write!(f, "\n  {issue}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigErrors),

    #[error("event scheduled in the past: t={time} while clock is at {now}")]
    ScheduledInPast { time: f64, now: f64 },

    #[error("invalid distribution parameters: {0}")]
    InvalidParameter(String),

    #[error("unknown node {0}")]
    UnknownNode(NodeId),

    #[error("packet delivery ratio undefined: no packets were sent")]
    NothingSent,

    #[error("cannot aggregate an empty list of runs")]
    EmptyAggregate,

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl SimError {
    /// Process exit status: 1 for bad input, 2 for anything that went wrong while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_) => 1,
            _ => 2,
        }
    }
}

pub type Result<T, E = SimError> = std::result::Result<T, E>;
