//! Batch evaluation and reporting: recall at multiple IoU thresholds, mean
//! IoU, duration buckets, and query-center robustness statistics.
//!
//! All recalls are carried as fractions internally and rendered as
//! percentages only at report boundaries. Aggregation sorts by sample id
//! before reducing, so reports are byte-identical regardless of input order
//! or worker count.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::curation::GroundingSample;
use crate::error::{Error, Result};
use crate::intervals::{center_bin, iou, TimeInterval};

pub const DEFAULT_THRESHOLDS: [f64; 3] = [0.3, 0.5, 0.7];
pub const DEFAULT_DURATION_BOUNDS: (f64, f64) = (180.0, 900.0);
/// Computed and reference gap values within this many percentage points
/// count as agreeing.
pub const GAP_REFERENCE_TOLERANCE_PCT: f64 = 1.0;

// ---------------------------------------------------------------------------
// Report types
// ---------------------------------------------------------------------------

/// A ground-truth sample keyed for evaluation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub sample_id: String,
    pub sample: GroundingSample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRecall {
    pub tau: f64,
    pub hits: usize,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubReport {
    pub label: String,
    pub n: usize,
    pub r1: Vec<ThresholdRecall>,
    pub miou: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterBinRow {
    pub bin: usize,
    pub n: usize,
    pub r1: Vec<ThresholdRecall>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionRow {
    pub tau: f64,
    /// Sample standard deviation of the early/middle/late recalls, in
    /// percentage points. Absent when fewer than two thirds are populated.
    pub sample_std_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub tau: f64,
    /// Relative best-worst gap `(max - min) / max` over the decile recalls,
    /// in percent. Absent (flagged) when every decile recall is zero.
    pub gap_pct: Option<f64>,
    pub flagged_all_zero: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_samples: usize,
    /// Samples without a prediction, scored as IoU 0 and counted.
    pub flagged_missing: usize,
    pub r1: Vec<ThresholdRecall>,
    pub miou: f64,
    pub duration_buckets: Vec<SubReport>,
    pub center_deciles: Vec<CenterBinRow>,
    pub center_thirds: Vec<SubReport>,
    pub dispersion: Vec<DispersionRow>,
    pub gap: Vec<GapRow>,
}

// ---------------------------------------------------------------------------
// Partitions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DurationBucket {
    Short,
    Medium,
    Long,
}

impl DurationBucket {
    pub fn label(&self) -> &'static str {
        match self {
            DurationBucket::Short => "short",
            DurationBucket::Medium => "medium",
            DurationBucket::Long => "long",
        }
    }
}

/// Buckets a duration with closed lower edges: a duration equal to a
/// boundary goes to the lower bucket.
pub fn duration_bucket(duration_s: f64, bounds: (f64, f64)) -> DurationBucket {
    if duration_s <= bounds.0 {
        DurationBucket::Short
    } else if duration_s <= bounds.1 {
        DurationBucket::Medium
    } else {
        DurationBucket::Long
    }
}

/// Partitions samples by video duration into short/medium/long.
pub fn bucket_by_duration(
    samples: &[LabeledSample],
    bounds: (f64, f64),
) -> Result<[Vec<&LabeledSample>; 3]> {
    if !bounds.0.is_finite() || !bounds.1.is_finite() || bounds.0 <= 0.0 || bounds.1 <= bounds.0 {
        return Err(Error::OutOfRange {
            what: "duration boundaries",
            value: bounds.0,
            expected: "strictly increasing positive cut points",
        });
    }
    let mut out: [Vec<&LabeledSample>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for s in samples {
        let idx = match duration_bucket(s.sample.duration_s, bounds) {
            DurationBucket::Short => 0,
            DurationBucket::Medium => 1,
            DurationBucket::Long => 2,
        };
        out[idx].push(s);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CenterThird {
    Early,
    Middle,
    Late,
}

impl CenterThird {
    pub fn label(&self) -> &'static str {
        match self {
            CenterThird::Early => "early",
            CenterThird::Middle => "middle",
            CenterThird::Late => "late",
        }
    }
}

/// Early `[0, 1/3)`, middle `[1/3, 2/3)`, late `[2/3, 1]`.
pub fn center_third(center: f64) -> CenterThird {
    if center < 1.0 / 3.0 {
        CenterThird::Early
    } else if center < 2.0 / 3.0 {
        CenterThird::Middle
    } else {
        CenterThird::Late
    }
}

pub fn thirds_by_center(samples: &[LabeledSample]) -> [Vec<&LabeledSample>; 3] {
    let mut out: [Vec<&LabeledSample>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    for s in samples {
        let idx = match center_third(s.sample.center) {
            CenterThird::Early => 0,
            CenterThird::Middle => 1,
            CenterThird::Late => 2,
        };
        out[idx].push(s);
    }
    out
}

// ---------------------------------------------------------------------------
// Dispersion statistics
// ---------------------------------------------------------------------------

/// Sample standard deviation (divisor `n - 1`) of per-position recalls,
/// reported in the units of its inputs.
pub fn position_dispersion(recalls: &[f64]) -> Result<f64> {
    if recalls.len() < 2 {
        return Err(Error::OutOfRange {
            what: "recall count",
            value: recalls.len() as f64,
            expected: ">= 2",
        });
    }
    let n = recalls.len() as f64;
    let mean = recalls.iter().sum::<f64>() / n;
    let var = recalls.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok(var.sqrt())
}

/// Relative best-worst gap `(max - min) / max`, returned as a percentage.
/// Undefined when every recall is zero.
pub fn position_gap(recalls: &[f64]) -> Result<f64> {
    if recalls.is_empty() {
        return Err(Error::EmptyInput { what: "recalls" });
    }
    let max = recalls.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = recalls.iter().cloned().fold(f64::INFINITY, f64::min);
    if max <= 0.0 {
        return Err(Error::AllZeroRecalls);
    }
    Ok((max - min) / max * 100.0)
}

/// Compares a computed gap against a reference column value. Returns the
/// divergence in percentage points when they disagree beyond the tolerance;
/// the formula value stands either way, the divergence is only surfaced.
pub fn gap_reference_divergence(computed_pct: f64, reference_pct: f64) -> Option<f64> {
    let diff = (computed_pct - reference_pct).abs();
    (diff > GAP_REFERENCE_TOLERANCE_PCT).then_some(diff)
}

// ---------------------------------------------------------------------------
// Batch evaluation
// ---------------------------------------------------------------------------

/// Scores every ground-truth sample against its prediction and aggregates
/// the full report. Samples without a prediction score IoU 0 and are
/// counted in `flagged_missing`; duplicate sample ids are an error.
pub fn evaluate(
    predictions: &BTreeMap<String, TimeInterval>,
    gts: &[LabeledSample],
    thresholds: &[f64],
    duration_bounds: (f64, f64),
) -> Result<EvalReport> {
    if gts.is_empty() {
        return Err(Error::EmptyInput { what: "ground-truth samples" });
    }
    for tau in thresholds {
        if !tau.is_finite() || *tau <= 0.0 || *tau > 1.0 {
            return Err(Error::OutOfRange {
                what: "threshold",
                value: *tau,
                expected: "(0, 1]",
            });
        }
    }
    let mut seen = BTreeSet::new();
    for gt in gts {
        if !seen.insert(gt.sample_id.as_str()) {
            return Err(Error::DuplicateSampleId(gt.sample_id.clone()));
        }
    }

    // sort by id so reductions are order-independent
    let mut ordered: Vec<&LabeledSample> = gts.iter().collect();
    ordered.sort_by(|a, b| a.sample_id.cmp(&b.sample_id));

    let mut ious: BTreeMap<&str, f64> = BTreeMap::new();
    let mut flagged_missing = 0usize;
    for gt in &ordered {
        let value = match predictions.get(&gt.sample_id) {
            Some(pred) => iou(pred, &gt.sample.gt).value(),
            None => {
                flagged_missing += 1;
                0.0
            }
        };
        ious.insert(gt.sample_id.as_str(), value);
    }

    let scores_of = |subset: &[&LabeledSample]| -> Vec<f64> {
        subset.iter().map(|s| ious[s.sample_id.as_str()]).collect()
    };

    let all_scores: Vec<f64> = scores_of(&ordered);
    let r1 = recall_rows(&all_scores, thresholds);
    let miou = all_scores.iter().sum::<f64>() / all_scores.len() as f64;

    let owned: Vec<LabeledSample> = ordered.iter().map(|s| (*s).clone()).collect();
    let buckets = bucket_by_duration(&owned, duration_bounds)?;
    let duration_buckets = [DurationBucket::Short, DurationBucket::Medium, DurationBucket::Long]
        .iter()
        .zip(buckets.iter())
        .map(|(bucket, members)| sub_report(bucket.label(), members, &ious, thresholds))
        .collect();

    let mut center_deciles = Vec::with_capacity(10);
    let mut decile_members: Vec<Vec<&LabeledSample>> = vec![Vec::new(); 10];
    for s in &owned {
        decile_members[center_bin(s.sample.center, 10)?].push(s);
    }
    for (bin, members) in decile_members.iter().enumerate() {
        let scores = scores_of(members);
        center_deciles.push(CenterBinRow {
            bin,
            n: members.len(),
            r1: recall_rows(&scores, thresholds),
        });
    }

    let thirds = thirds_by_center(&owned);
    let center_thirds: Vec<SubReport> = [CenterThird::Early, CenterThird::Middle, CenterThird::Late]
        .iter()
        .zip(thirds.iter())
        .map(|(third, members)| sub_report(third.label(), members, &ious, thresholds))
        .collect();

    let dispersion = thresholds
        .iter()
        .enumerate()
        .map(|(ti, &tau)| {
            let third_recalls: Vec<f64> = center_thirds
                .iter()
                .filter(|t| t.n > 0)
                .map(|t| t.r1[ti].recall * 100.0)
                .collect();
            DispersionRow {
                tau,
                sample_std_pct: position_dispersion(&third_recalls).ok(),
            }
        })
        .collect();

    let gap = thresholds
        .iter()
        .enumerate()
        .map(|(ti, &tau)| {
            let decile_recalls: Vec<f64> = center_deciles
                .iter()
                .filter(|d| d.n > 0)
                .map(|d| d.r1[ti].recall)
                .collect();
            match position_gap(&decile_recalls) {
                Ok(pct) => GapRow {
                    tau,
                    gap_pct: Some(pct),
                    flagged_all_zero: false,
                },
                Err(_) => GapRow {
                    tau,
                    gap_pct: None,
                    flagged_all_zero: true,
                },
            }
        })
        .collect();

    Ok(EvalReport {
        n_samples: ordered.len(),
        flagged_missing,
        r1,
        miou,
        duration_buckets,
        center_deciles,
        center_thirds,
        dispersion,
        gap,
    })
}

fn recall_rows(scores: &[f64], thresholds: &[f64]) -> Vec<ThresholdRecall> {
    thresholds
        .iter()
        .map(|&tau| {
            let hits = scores.iter().filter(|&&s| s >= tau).count();
            ThresholdRecall {
                tau,
                hits,
                recall: if scores.is_empty() {
                    0.0
                } else {
                    hits as f64 / scores.len() as f64
                },
            }
        })
        .collect()
}

fn sub_report(
    label: &str,
    members: &[&LabeledSample],
    ious: &BTreeMap<&str, f64>,
    thresholds: &[f64],
) -> SubReport {
    let scores: Vec<f64> = members.iter().map(|s| ious[s.sample_id.as_str()]).collect();
    SubReport {
        label: label.to_string(),
        n: members.len(),
        r1: recall_rows(&scores, thresholds),
        miou: if scores.is_empty() {
            0.0
        } else {
            scores.iter().sum::<f64>() / scores.len() as f64
        },
    }
}
