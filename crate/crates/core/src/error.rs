//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid interval [{start_s}, {end_s}]: end must be strictly greater than start and start must be >= 0")]
    InvalidInterval { start_s: f64, end_s: f64 },

    #[error("{what} must not be empty")]
    EmptyInput { what: &'static str },

    #[error("{what} out of range: got {value}, expected {expected}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("interval [{start_s}, {end_s}] lies outside the video span [0, {duration_s}]")]
    IntervalOutsideVideo {
        start_s: f64,
        end_s: f64,
        duration_s: f64,
    },

    #[error("window [{start_s}, {end_s}] selects no frames from the timeline [{timeline_start_s}, {timeline_end_s}]")]
    EmptyWindow {
        start_s: f64,
        end_s: f64,
        timeline_start_s: f64,
        timeline_end_s: f64,
    },

    #[error("cache is already coarse; pooling requires a fine cache")]
    AlreadyCoarse,

    #[error("expected a {expected} cache, got a {got} cache")]
    WrongGranularity {
        expected: &'static str,
        got: &'static str,
    },

    #[error("caches come from different videos: {a} vs {b}")]
    VideoMismatch { a: String, b: String },

    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    #[error("duplicate sample id: {0}")]
    DuplicateSampleId(String),

    #[error("unknown scorer backend: {0}")]
    UnknownScorer(String),

    #[error("all recall values are zero; relative gap is undefined")]
    AllZeroRecalls,

    #[error("synthetic corpus rejected: signal amplitude {signal} must exceed noise amplitude {noise}")]
    UnlearnableCorpus { signal: f64, noise: f64 },

    #[error("hook failure: {0}")]
    Hook(String),

    #[error("manifest error at {path}: {reason}")]
    Manifest { path: String, reason: String },

    #[error("feature file {path}: {reason}")]
    Features { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
