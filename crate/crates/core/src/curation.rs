//! Dataset curation: clip concatenation with timestamp remapping, expert-vote
//! consensus, uniqueness filtering, information validation hooks, and bin
//! balancing.
//!
//! Hook points (grounder, verifier, recaptioner) are named adapters so
//! external services can be attached; every hook failure routes the sample to
//! a quarantine list instead of dropping it silently, and pipeline counts
//! always reconcile: input = kept + dropped + quarantined.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intervals::{iou, query_center, TimeInterval};
use crate::model::FrameSequence;

/// Segment length used by the uniqueness filter when none is configured.
pub const DEFAULT_SEGMENT_LEN_S: f64 = 30.0;
/// Packing target for long-video assembly.
pub const DEFAULT_TARGET_DURATION_S: f64 = 500.0;
/// Consensus threshold: pairwise IoU must strictly exceed this.
pub const DEFAULT_CONSENSUS_MIN_IOU: f64 = 0.5;

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaAnnotation {
    pub question: String,
    pub answer: String,
    pub options: Option<Vec<String>>,
}

/// A short source clip with its generated caption and optional QA pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClipRecord {
    pub clip_id: String,
    pub duration_s: f64,
    pub caption: String,
    pub qa: Option<QaAnnotation>,
    pub source_tag: String,
}

impl ClipRecord {
    pub fn validate(&self) -> Result<()> {
        if !self.duration_s.is_finite() || self.duration_s <= 0.0 {
            return Err(Error::OutOfRange {
                what: "clip duration",
                value: self.duration_s,
                expected: "> 0",
            });
        }
        Ok(())
    }
}

/// One grounding model's candidate interval for a clip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpertVote {
    pub expert_id: String,
    pub interval: TimeInterval,
}

/// A fully annotated grounding sample. `center` is always derived from the
/// interval and duration at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundingSample {
    pub video_id: String,
    pub duration_s: f64,
    pub query: String,
    pub options: Option<Vec<String>>,
    pub gt: TimeInterval,
    pub task_type: String,
    pub video_category: String,
    pub center: f64,
}

impl GroundingSample {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        video_id: impl Into<String>,
        duration_s: f64,
        query: impl Into<String>,
        options: Option<Vec<String>>,
        gt: TimeInterval,
        task_type: impl Into<String>,
        video_category: impl Into<String>,
    ) -> Result<Self> {
        let center = query_center(&gt, duration_s)?;
        Ok(Self {
            video_id: video_id.into(),
            duration_s,
            query: query.into(),
            options,
            gt,
            task_type: task_type.into(),
            video_category: video_category.into(),
            center,
        })
    }
}

// ---------------------------------------------------------------------------
// Expert consensus
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ConsensusOutcome {
    Retained {
        canonical: TimeInterval,
        min_pairwise_iou: f64,
    },
    Rejected {
        min_pairwise_iou: f64,
    },
}

/// Retains a vote set only when every pairwise IoU strictly exceeds
/// `min_iou`. The canonical interval is the per-endpoint median across
/// votes, which is robust to one outlier among three or more experts.
pub fn expert_consensus(votes: &[ExpertVote], min_iou: f64) -> Result<ConsensusOutcome> {
    if votes.len() < 2 {
        return Err(Error::OutOfRange {
            what: "vote count",
            value: votes.len() as f64,
            expected: ">= 2",
        });
    }
    let mut min_pairwise = f64::INFINITY;
    for i in 0..votes.len() {
        for j in (i + 1)..votes.len() {
            min_pairwise = min_pairwise.min(iou(&votes[i].interval, &votes[j].interval).value());
        }
    }
    if min_pairwise <= min_iou {
        return Ok(ConsensusOutcome::Rejected {
            min_pairwise_iou: min_pairwise,
        });
    }
    let starts: Vec<f64> = votes.iter().map(|v| v.interval.start_s()).collect();
    let ends: Vec<f64> = votes.iter().map(|v| v.interval.end_s()).collect();
    let canonical = TimeInterval::new(median(&starts), median(&ends))?;
    Ok(ConsensusOutcome::Retained {
        canonical,
        min_pairwise_iou: min_pairwise,
    })
}

fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

// ---------------------------------------------------------------------------
// Clip concatenation
// ---------------------------------------------------------------------------

/// A clip carrying the annotation that becomes one grounding sample after
/// concatenation: the query (caption or QA question), the clip-local target
/// interval, and its labels.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedClip {
    pub clip: ClipRecord,
    pub query: String,
    pub options: Option<Vec<String>>,
    pub interval: TimeInterval,
    pub task_type: String,
    pub video_category: String,
}

/// Where each source clip landed on a long video's timeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongVideoManifest {
    pub video_id: String,
    pub duration_s: f64,
    pub clip_offsets: Vec<(String, f64)>,
}

/// Concatenates clips in order, assigning cumulative offsets. Each
/// clip-local interval `[a, b]` becomes `[a + offset, b + offset]`; the long
/// video's duration is the sum of clip durations.
pub fn concat_clips(
    video_id: impl Into<String>,
    clips: &[AnnotatedClip],
) -> Result<(LongVideoManifest, Vec<GroundingSample>)> {
    if clips.is_empty() {
        return Err(Error::EmptyInput { what: "clips" });
    }
    let video_id = video_id.into();
    let mut offset = 0.0;
    let mut clip_offsets = Vec::with_capacity(clips.len());
    for annotated in clips {
        annotated.clip.validate()?;
        if annotated.interval.end_s() > annotated.clip.duration_s + 1e-9 {
            return Err(Error::IntervalOutsideVideo {
                start_s: annotated.interval.start_s(),
                end_s: annotated.interval.end_s(),
                duration_s: annotated.clip.duration_s,
            });
        }
        clip_offsets.push((annotated.clip.clip_id.clone(), offset));
        offset += annotated.clip.duration_s;
    }
    let duration_s = offset;

    let samples = clips
        .iter()
        .zip(&clip_offsets)
        .map(|(annotated, (_, off))| {
            GroundingSample::new(
                video_id.clone(),
                duration_s,
                annotated.query.clone(),
                annotated.options.clone(),
                annotated.interval.translated(*off)?,
                annotated.task_type.clone(),
                annotated.video_category.clone(),
            )
        })
        .collect::<Result<Vec<_>>>()?;

    Ok((
        LongVideoManifest {
            video_id,
            duration_s,
            clip_offsets,
        },
        samples,
    ))
}

/// Greedy packing toward a target duration: clips accumulate in order and
/// the next clip joins the current group only while it brings the group
/// total closer to the target. A group never stays empty, so oversized
/// clips become singleton groups.
pub fn pack_toward_target(durations: &[f64], target_s: f64) -> Vec<Vec<usize>> {
    let mut groups = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut total = 0.0;
    for (i, &d) in durations.iter().enumerate() {
        let closer = (total + d - target_s).abs() <= (total - target_s).abs();
        if current.is_empty() || closer {
            current.push(i);
            total += d;
        } else {
            groups.push(std::mem::take(&mut current));
            current.push(i);
            total = d;
        }
    }
    if !current.is_empty() {
        groups.push(current);
    }
    groups
}

// ---------------------------------------------------------------------------
// Filtering
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FilterDecision {
    Keep,
    Drop(DropReason),
    Quarantine(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    /// More than one segment satisfied the query.
    AmbiguousTarget,
    /// No segment satisfied the query.
    NoValidSegment,
    /// Expert votes disagreed below the pairwise IoU threshold.
    ConsensusRejected,
    /// The verifier judged the target interval insufficient to answer.
    NotAnswerable,
    /// No target annotation was available.
    NoAnnotation,
    /// An augmentation destroyed the target.
    GtDestroyed,
}

impl std::fmt::Display for DropReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            DropReason::AmbiguousTarget => "ambiguous_target",
            DropReason::NoValidSegment => "no_valid_segment",
            DropReason::ConsensusRejected => "consensus_rejected",
            DropReason::NotAnswerable => "not_answerable",
            DropReason::NoAnnotation => "no_annotation",
            DropReason::GtDestroyed => "gt_destroyed",
        };
        write!(f, "{name}")
    }
}

/// Fixed-length partition of `[0, duration]`; the final segment absorbs the
/// remainder.
pub fn segment_timeline(duration_s: f64, segment_len_s: f64) -> Result<Vec<TimeInterval>> {
    if !duration_s.is_finite() || duration_s <= 0.0 {
        return Err(Error::OutOfRange {
            what: "duration",
            value: duration_s,
            expected: "> 0",
        });
    }
    if !segment_len_s.is_finite() || segment_len_s <= 0.0 {
        return Err(Error::OutOfRange {
            what: "segment length",
            value: segment_len_s,
            expected: "> 0",
        });
    }
    let mut segments = Vec::new();
    let mut start = 0.0;
    while start + segment_len_s < duration_s {
        segments.push(TimeInterval::new(start, start + segment_len_s)?);
        start += segment_len_s;
    }
    segments.push(TimeInterval::new(start, duration_s)?);
    Ok(segments)
}

/// Keeps a sample only when exactly one segment is flagged valid by the
/// grounder hook. A hook failure on any segment quarantines the sample.
pub fn uniqueness_filter<F>(
    segments: &[TimeInterval],
    query: &str,
    mut segment_valid: F,
) -> FilterDecision
where
    F: FnMut(&str, &TimeInterval) -> Result<bool>,
{
    let mut valid = 0usize;
    for segment in segments {
        match segment_valid(query, segment) {
            Ok(true) => valid += 1,
            Ok(false) => {}
            Err(e) => return FilterDecision::Quarantine(e.to_string()),
        }
    }
    match valid {
        1 => FilterDecision::Keep,
        0 => FilterDecision::Drop(DropReason::NoValidSegment),
        _ => FilterDecision::Drop(DropReason::AmbiguousTarget),
    }
}

/// Named adapter contract for the information verifier: answers whether the
/// frames within the sample's target interval suffice to answer the query.
pub trait InformationVerifier: Send + Sync {
    fn answerable(&self, sample: &GroundingSample, frames: &FrameSequence) -> Result<bool>;
}

/// Named adapter contract for the per-segment grounder used by the
/// uniqueness filter.
pub trait SegmentGrounder: Send + Sync {
    fn segment_valid(
        &self,
        query: &str,
        frames: &FrameSequence,
        segment: &TimeInterval,
    ) -> Result<bool>;
}

/// Named adapter contract for recaptioning clips. No backend ships; the
/// request carries the clip's frames and existing caption.
pub trait Recaptioner: Send + Sync {
    fn recaption(&self, caption: &str, frames: &FrameSequence) -> Result<String>;
}

/// Keeps a sample only when the verifier answers yes; verifier failure
/// quarantines.
pub fn validate_information(
    sample: &GroundingSample,
    frames: &FrameSequence,
    verifier: &dyn InformationVerifier,
) -> FilterDecision {
    match verifier.answerable(sample, frames) {
        Ok(true) => FilterDecision::Keep,
        Ok(false) => FilterDecision::Drop(DropReason::NotAnswerable),
        Err(e) => FilterDecision::Quarantine(e.to_string()),
    }
}

// ---------------------------------------------------------------------------
// Bin balancing
// ---------------------------------------------------------------------------

/// Seeded down-sampling so that no (duration bucket, center decile, task
/// type, category) bin exceeds `cap`. Returns the kept indices in input
/// order; identical across runs for a fixed seed.
pub fn balance_bins_indices(
    samples: &[GroundingSample],
    cap: usize,
    duration_bounds: (f64, f64),
    seed: u64,
) -> Result<Vec<usize>> {
    if samples.is_empty() {
        return Ok(Vec::new());
    }
    let mut bins: BTreeMap<(u8, usize, String, String), Vec<usize>> = BTreeMap::new();
    for (i, sample) in samples.iter().enumerate() {
        let bucket = if sample.duration_s <= duration_bounds.0 {
            0u8
        } else if sample.duration_s <= duration_bounds.1 {
            1
        } else {
            2
        };
        let decile = crate::intervals::center_bin(sample.center, 10)?;
        bins.entry((
            bucket,
            decile,
            sample.task_type.clone(),
            sample.video_category.clone(),
        ))
        .or_default()
        .push(i);
    }

    let mut kept: Vec<usize> = Vec::new();
    for (ordinal, (_, mut indices)) in bins.into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(ordinal as u64));
        indices.shuffle(&mut rng);
        indices.truncate(cap);
        kept.extend(indices);
    }
    kept.sort_unstable();
    Ok(kept)
}

/// [`balance_bins_indices`] materialized as a sample subset.
pub fn balance_bins(
    samples: &[GroundingSample],
    cap: usize,
    duration_bounds: (f64, f64),
    seed: u64,
) -> Result<Vec<GroundingSample>> {
    Ok(balance_bins_indices(samples, cap, duration_bounds, seed)?
        .into_iter()
        .map(|i| samples[i].clone())
        .collect())
}

// ---------------------------------------------------------------------------
// Pipeline accounting
// ---------------------------------------------------------------------------

/// Conservation ledger for a pipeline run: every input sample lands in
/// exactly one of kept, dropped (with a reason), or quarantined.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub input: usize,
    pub kept: usize,
    pub dropped: BTreeMap<String, usize>,
    pub quarantined: usize,
}

impl PipelineReport {
    pub fn record(&mut self, decision: &FilterDecision) {
        match decision {
            FilterDecision::Keep => self.kept += 1,
            FilterDecision::Drop(reason) => {
                *self.dropped.entry(reason.to_string()).or_insert(0) += 1;
            }
            FilterDecision::Quarantine(_) => self.quarantined += 1,
        }
    }

    pub fn dropped_total(&self) -> usize {
        self.dropped.values().sum()
    }

    pub fn is_conserved(&self) -> bool {
        self.input == self.kept + self.dropped_total() + self.quarantined
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vote(id: &str, start: f64, end: f64) -> ExpertVote {
        ExpertVote {
            expert_id: id.to_string(),
            interval: TimeInterval::new(start, end).unwrap(),
        }
    }

    fn clip(id: &str, duration: f64, start: f64, end: f64) -> AnnotatedClip {
        AnnotatedClip {
            clip: ClipRecord {
                clip_id: id.to_string(),
                duration_s: duration,
                caption: format!("caption for {id}"),
                qa: None,
                source_tag: "test".to_string(),
            },
            query: format!("query for {id}"),
            options: None,
            interval: TimeInterval::new(start, end).unwrap(),
            task_type: "action_reasoning".to_string(),
            video_category: "life_record".to_string(),
        }
    }

    #[test]
    fn consensus_overlapping_votes_retained() {
        // IoU([10,20],[12,22]) = 8/12 > 0.5; medians 11 and 21
        let outcome =
            expert_consensus(&[vote("a", 10.0, 20.0), vote("b", 12.0, 22.0)], 0.5).unwrap();
        match outcome {
            ConsensusOutcome::Retained {
                canonical,
                min_pairwise_iou,
            } => {
                assert_eq!(canonical, TimeInterval::new(11.0, 21.0).unwrap());
                assert!((min_pairwise_iou - 8.0 / 12.0).abs() < 1e-12);
            }
            other => panic!("expected retained, got {other:?}"),
        }
    }

    #[test]
    fn consensus_disjoint_votes_rejected() {
        let outcome =
            expert_consensus(&[vote("a", 10.0, 20.0), vote("b", 30.0, 40.0)], 0.5).unwrap();
        assert!(matches!(
            outcome,
            ConsensusOutcome::Rejected { min_pairwise_iou } if min_pairwise_iou == 0.0
        ));
    }

    #[test]
    fn consensus_unanimous() {
        let votes = vec![vote("a", 5.0, 9.0), vote("b", 5.0, 9.0), vote("c", 5.0, 9.0)];
        let outcome = expert_consensus(&votes, 0.5).unwrap();
        assert!(matches!(
            outcome,
            ConsensusOutcome::Retained { canonical, .. }
                if canonical == TimeInterval::new(5.0, 9.0).unwrap()
        ));
    }

    #[test]
    fn consensus_needs_two_votes() {
        assert!(expert_consensus(&[vote("a", 1.0, 2.0)], 0.5).is_err());
    }

    #[test]
    fn consensus_is_permutation_invariant() {
        let votes = vec![
            vote("a", 10.0, 20.0),
            vote("b", 11.0, 21.0),
            vote("c", 12.0, 22.0),
        ];
        let base = expert_consensus(&votes, 0.5).unwrap();
        let mut shuffled = votes.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            shuffled.shuffle(&mut rng);
            assert_eq!(expert_consensus(&shuffled, 0.5).unwrap(), base);
        }
    }

    #[test]
    fn concat_assigns_cumulative_offsets() {
        // clip 2's [5,10] lands at [55,60] after a 50s first clip
        let clips = vec![clip("c1", 50.0, 1.0, 4.0), clip("c2", 30.0, 5.0, 10.0)];
        let (manifest, samples) = concat_clips("long", &clips).unwrap();
        assert_eq!(manifest.duration_s, 80.0);
        assert_eq!(manifest.clip_offsets[1].1, 50.0);
        assert_eq!(samples[1].gt, TimeInterval::new(55.0, 60.0).unwrap());
    }

    #[test]
    fn concat_three_equal_clips() {
        let clips = vec![
            clip("c1", 10.0, 0.0, 10.0),
            clip("c2", 10.0, 0.0, 10.0),
            clip("c3", 10.0, 0.0, 10.0),
        ];
        let (manifest, samples) = concat_clips("long", &clips).unwrap();
        assert_eq!(manifest.duration_s, 30.0);
        assert_eq!(samples[2].gt, TimeInterval::new(20.0, 30.0).unwrap());
    }

    #[test]
    fn concat_preserves_iou_and_disjointness() {
        let clips = vec![
            clip("c1", 60.0, 10.0, 20.0),
            clip("c2", 45.0, 5.0, 15.0),
            clip("c3", 80.0, 30.0, 50.0),
        ];
        let (_, samples) = concat_clips("long", &clips).unwrap();
        // remapped intervals from different clips never overlap
        for i in 0..samples.len() {
            for j in (i + 1)..samples.len() {
                assert!(!samples[i].gt.overlaps(&samples[j].gt));
            }
        }
        // a prediction/gt pair remapped by the same offset keeps its IoU
        let pred = TimeInterval::new(12.0, 19.0).unwrap();
        let gt_local = clips[1].interval;
        let before = iou(&pred, &gt_local).value();
        let offset = 60.0;
        let after = iou(
            &pred.translated(offset).unwrap(),
            &samples[1].gt,
        )
        .value();
        assert!((before - after).abs() < 1e-12);
    }

    #[test]
    fn packing_closes_groups_at_target() {
        let groups = pack_toward_target(&[120.0, 200.0, 180.0, 240.0, 300.0], 500.0);
        assert_eq!(groups, vec![vec![0, 1, 2], vec![3, 4]]);
    }

    #[test]
    fn uniqueness_flag_math() {
        let segments = segment_timeline(120.0, 30.0).unwrap();
        assert_eq!(segments.len(), 4);

        let flags = [false, true, false, false];
        let mut it = flags.iter();
        let decision = uniqueness_filter(&segments, "q", |_, _| Ok(*it.next().unwrap()));
        assert_eq!(decision, FilterDecision::Keep);

        let flags = [false, true, true, false];
        let mut it = flags.iter();
        let decision = uniqueness_filter(&segments, "q", |_, _| Ok(*it.next().unwrap()));
        assert_eq!(decision, FilterDecision::Drop(DropReason::AmbiguousTarget));

        let decision = uniqueness_filter(&segments, "q", |_, _| Ok(false));
        assert_eq!(decision, FilterDecision::Drop(DropReason::NoValidSegment));

        let decision = uniqueness_filter(&segments, "q", |_, _| {
            Err(Error::Hook("timeout".to_string()))
        });
        assert!(matches!(decision, FilterDecision::Quarantine(_)));
    }

    #[test]
    fn segment_timeline_absorbs_remainder() {
        let segments = segment_timeline(100.0, 30.0).unwrap();
        assert_eq!(segments.len(), 4);
        assert_eq!(segments[3], TimeInterval::new(90.0, 100.0).unwrap());
    }

    fn sample_with(center_target: f64, task: &str) -> GroundingSample {
        // place a 2s gt so its midpoint / 100 equals center_target
        let mid = center_target * 100.0;
        GroundingSample::new(
            "v",
            100.0,
            "q",
            None,
            TimeInterval::new(mid - 1.0, mid + 1.0).unwrap(),
            task,
            "life_record",
        )
        .unwrap()
    }

    #[test]
    fn balance_caps_bins() {
        let mut samples = Vec::new();
        for _ in 0..100 {
            samples.push(sample_with(0.15, "a"));
        }
        for _ in 0..10 {
            samples.push(sample_with(0.85, "b"));
        }
        let balanced = balance_bins(&samples, 10, (180.0, 900.0), 42).unwrap();
        assert_eq!(balanced.len(), 20);
        let a_count = balanced.iter().filter(|s| s.task_type == "a").count();
        assert_eq!(a_count, 10);
    }

    #[test]
    fn balance_identity_when_cap_exceeds_bins() {
        let samples = vec![sample_with(0.2, "a"), sample_with(0.4, "b")];
        let balanced = balance_bins(&samples, 100, (180.0, 900.0), 1).unwrap();
        assert_eq!(balanced, samples);
    }

    #[test]
    fn balance_is_deterministic() {
        let samples: Vec<GroundingSample> = (0..50)
            .map(|i| sample_with(0.1 + 0.01 * (i % 5) as f64, "a"))
            .collect();
        let one = balance_bins(&samples, 3, (180.0, 900.0), 99).unwrap();
        let two = balance_bins(&samples, 3, (180.0, 900.0), 99).unwrap();
        assert_eq!(one, two);
        // never increases any bin's count
        assert!(one.len() <= samples.len());
    }

    #[test]
    fn balance_empty_input() {
        assert!(balance_bins(&[], 5, (180.0, 900.0), 0).unwrap().is_empty());
    }

    #[test]
    fn validate_information_routes_hook_failures_to_quarantine() {
        struct FailingVerifier;
        impl InformationVerifier for FailingVerifier {
            fn answerable(&self, _: &GroundingSample, _: &FrameSequence) -> Result<bool> {
                Err(Error::Hook("verifier timeout".to_string()))
            }
        }
        struct YesVerifier;
        impl InformationVerifier for YesVerifier {
            fn answerable(&self, _: &GroundingSample, _: &FrameSequence) -> Result<bool> {
                Ok(true)
            }
        }

        let sample = sample_with(0.5, "t");
        let frames = FrameSequence::new(
            "v",
            1.0,
            0.0,
            (0..100).map(|i| vec![i as f64]).collect(),
            4,
        )
        .unwrap();

        let mut report = PipelineReport {
            input: 2,
            ..Default::default()
        };
        let quarantined = validate_information(&sample, &frames, &FailingVerifier);
        assert!(matches!(quarantined, FilterDecision::Quarantine(ref m) if m.contains("timeout")));
        report.record(&quarantined);
        report.record(&validate_information(&sample, &frames, &YesVerifier));
        assert!(report.is_conserved());
        assert_eq!(report.quarantined, 1);
        assert_eq!(report.kept, 1);
    }

    #[test]
    fn pipeline_counts_reconcile() {
        let mut report = PipelineReport {
            input: 4,
            ..Default::default()
        };
        report.record(&FilterDecision::Keep);
        report.record(&FilterDecision::Drop(DropReason::AmbiguousTarget));
        report.record(&FilterDecision::Drop(DropReason::NotAnswerable));
        report.record(&FilterDecision::Quarantine("x".to_string()));
        assert!(report.is_conserved());
        assert_eq!(report.dropped_total(), 2);
    }

    #[test]
    fn grounding_sample_validates_gt() {
        assert!(GroundingSample::new(
            "v",
            50.0,
            "q",
            None,
            TimeInterval::new(40.0, 60.0).unwrap(),
            "t",
            "c"
        )
        .is_err());
        let ok = GroundingSample::new(
            "v",
            100.0,
            "q",
            None,
            TimeInterval::new(90.0, 100.0).unwrap(),
            "t",
            "c",
        )
        .unwrap();
        assert_eq!(ok.center, 0.95);
    }
}
