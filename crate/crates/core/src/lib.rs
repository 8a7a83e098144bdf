//! groundscope: task-oriented temporal grounding at desk scale.
//!
//! The crate is organized around a two-stage grounding engine that reasons
//! first over a pooled (coarse) key-value cache of the whole video, then
//! reloads the fine cache for the hypothesized window only. Around the engine
//! sit the pieces needed to exercise it end to end without a trained model:
//! exact interval metrics, a deterministic synthetic corpus with planted
//! signal, temporal augmentations, a clip-concatenation curation pipeline,
//! and a batch evaluation harness with position-robustness statistics.

pub mod augment;
pub mod commands;
pub mod config;
pub mod curation;
pub mod engine;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod intervals;
pub mod manifest;
pub mod model;
pub mod qa;
pub mod selftest;
pub mod synthetic;

pub use error::{Error, Result};
pub use intervals::{IoUScore, TimeInterval};
