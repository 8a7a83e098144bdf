//! Line-delimited record files: dataset manifests, clip manifests, and
//! prediction files.
//!
//! Every file starts with a header line embedding the command name, seed,
//! and the full run configuration, so any output can be reproduced from its
//! own header. Record fields serialize in fixed struct order and floats
//! render in shortest round-trip form, which makes re-runs byte-identical.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::augment::Augmentation;
use crate::config::RunConfig;
use crate::curation::ExpertVote;
use crate::error::{Error, Result};
use crate::intervals::TimeInterval;

/// First line of every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileHeader {
    pub record: String,
    pub tool: String,
    pub command: String,
    pub seed: u64,
    pub config: RunConfig,
}

impl FileHeader {
    pub fn new(command: impl Into<String>, config: &RunConfig) -> Self {
        Self {
            record: "header".to_string(),
            tool: "groundscope".to_string(),
            command: command.into(),
            seed: config.seed,
            config: config.clone(),
        }
    }
}

/// One grounding sample in a dataset manifest. `feature_path` is relative to
/// the manifest file's directory; `t0_s` is the first frame's time on the
/// (possibly shifted) timeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    pub sample_id: String,
    pub video_id: String,
    pub duration_s: f64,
    pub fps: f64,
    #[serde(default)]
    pub t0_s: f64,
    pub feature_path: String,
    pub query: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<Vec<String>>,
    pub gt: TimeInterval,
    pub task_type: String,
    pub video_category: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub augmentation: Option<Augmentation>,
}

/// One source clip in a curation input manifest. The clip-local target comes
/// either from expert votes (resolved by consensus) or directly from `gt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipManifestRecord {
    pub clip_id: String,
    pub duration_s: f64,
    pub caption: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub question: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub answer: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<Vec<String>>,
    pub source_tag: String,
    pub feature_path: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gt: Option<TimeInterval>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub votes: Vec<ExpertVote>,
    pub task_type: String,
    pub video_category: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceCounts {
    pub stage1_tokens: usize,
    pub stage2_tokens: usize,
    pub degenerate: bool,
}

/// One prediction per sample: the stage-1 window, the final interval, and
/// the stage-wise token budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub sample_id: String,
    pub window: TimeInterval,
    pub interval: TimeInterval,
    pub mode: String,
    pub trace: TraceCounts,
}

/// A sample that a command could not process; conservation counts include
/// these.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuarantineRecord {
    pub sample_id: String,
    pub reason: String,
}

/// A row of a recall-fixture file: named per-position recalls plus optional
/// published reference columns to diff against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecallFixtureRecord {
    pub label: String,
    pub recalls: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_std: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_gap_pct: Option<f64>,
}

/// Writes a header line followed by one record per line.
pub fn write_jsonl<T: Serialize>(path: &Path, header: &FileHeader, records: &[T]) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    writeln!(out, "{}", serde_json::to_string(header)?)?;
    for record in records {
        writeln!(out, "{}", serde_json::to_string(record)?)?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a record file; the header is optional so hand-written inputs work.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<(Option<FileHeader>, Vec<T>)> {
    let content = fs::read_to_string(path).map_err(|e| Error::Manifest {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    let mut header = None;
    let mut records = Vec::new();
    for (lineno, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if lineno == 0 {
            if let Ok(h) = serde_json::from_str::<FileHeader>(line) {
                if h.record == "header" {
                    header = Some(h);
                    continue;
                }
            }
        }
        let record: T = serde_json::from_str(line).map_err(|e| Error::Manifest {
            path: path.display().to_string(),
            reason: format!("line {}: {e}", lineno + 1),
        })?;
        records.push(record);
    }
    Ok((header, records))
}
