//! Error types shared across the core library.

use thiserror::Error;

/// Errors produced by environments, training, and IO.
#[derive(Debug, Error)]
pub enum CoreError {
    /// A caller violated an operation's contract (wrong dimension, bad range).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Physics integration produced a non-finite state.
    #[error("integration failure: {0}")]
    Integration(String),

    /// A configuration value is missing, malformed, or inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    /// A seed-state buffer was required but empty.
    #[error("empty seed-state buffer: {0}")]
    EmptyBuffer(String),

    /// A numerical routine failed (NaN loss, singular matrix).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Underlying filesystem error.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// A file could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, CoreError>;
