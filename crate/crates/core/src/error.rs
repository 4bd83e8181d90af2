use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("node {0} has zero weighted degree")]
    ZeroDegree(usize),

    #[error("measurement graph is disconnected")]
    Disconnected,

    #[error("edge set is empty")]
    EmptyEdgeSet,

    #[error("ground truth is not available")]
    TruthAbsent,

    #[error("cycle enumeration exceeded the cap of {0} cycles")]
    CycleCap(usize),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
