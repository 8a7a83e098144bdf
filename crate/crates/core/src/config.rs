//! Run configuration shared by every command and embedded verbatim into
//! every output file for reproducibility.

use serde::{Deserialize, Serialize};

use crate::engine::EngineConfig;
use crate::model::PrefillParams;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub pool_factor: usize,
    pub theta: f64,
    pub delta: f64,
    /// Window padding in super-groups; `usize::MAX` means unbounded.
    pub margin: usize,
    pub fps: f64,
    pub group_size: usize,
    /// Evaluation-context frame cap, enforced by uniform subsampling.
    pub max_frames: usize,
    pub thresholds: Vec<f64>,
    pub duration_buckets: (f64, f64),
    pub seed: u64,
    /// Worker threads for per-sample parallel work; 0 picks the default.
    pub workers: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            pool_factor: 4,
            theta: 0.5,
            delta: 0.2,
            margin: 1,
            fps: crate::model::DEFAULT_FPS,
            group_size: crate::model::DEFAULT_GROUP_SIZE,
            max_frames: crate::model::EVAL_FRAME_CAP,
            thresholds: crate::evaluation::DEFAULT_THRESHOLDS.to_vec(),
            duration_buckets: crate::evaluation::DEFAULT_DURATION_BOUNDS,
            seed: 0,
            workers: 0,
        }
    }
}

impl RunConfig {
    pub fn engine_config(&self) -> EngineConfig {
        EngineConfig {
            pool_factor: self.pool_factor,
            theta: self.theta,
            delta: self.delta,
            margin: self.margin,
            prefill: PrefillParams::default(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_documented_values() {
        let config = RunConfig::default();
        assert_eq!(config.pool_factor, 4);
        assert_eq!(config.theta, 0.5);
        assert_eq!(config.delta, 0.2);
        assert_eq!(config.margin, 1);
        assert_eq!(config.fps, 1.0);
        assert_eq!(config.group_size, 4);
        assert_eq!(config.max_frames, 800);
        assert_eq!(config.thresholds, vec![0.3, 0.5, 0.7]);
        assert_eq!(config.duration_buckets, (180.0, 900.0));
    }

    #[test]
    fn config_round_trips_through_json() {
        let config = RunConfig {
            margin: usize::MAX,
            seed: 1234,
            ..RunConfig::default()
        };
        let json = serde_json::to_string(&config).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(config, back);
    }
}
