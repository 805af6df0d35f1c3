//! Benchmark harness: synthetic versioned corpora, query sets, experiment
//! runs with space/time measurement, and plain-text reports.

pub mod corpus;
pub mod cpu;
pub mod experiment;
pub mod oracle;
pub mod queries;
pub mod report;

use std::io;

#[derive(thiserror::Error, Debug)]
pub enum BenchError {
    #[error(transparent)]
    Index(#[from] versidx::Error),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error("malformed {what}: {msg}")]
    Format { what: &'static str, msg: String },

    #[error("invalid specification: {0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, BenchError>;
