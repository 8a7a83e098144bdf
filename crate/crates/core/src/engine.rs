//! Two-stage progressive grounding over pooled and reloaded caches.
//!
//! Stage 1 scores every pooled super-group of the coarse cache and
//! hypothesizes a window around the peak. Stage 2 reloads the fine cache for
//! that window only and decodes a precise interval from per-frame scores.
//! Score decoding uses explicit rules (peak run with relative thresholds
//! theta and delta) standing in for learned decoding; both bands are
//! normalized by `peak - min` within the stage so constant score shifts
//! cannot change any decision.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intervals::TimeInterval;
use crate::model::{
    build_sequence, pool_cache, prefill, select_window, FrameSequence, Granularity, LayerCache,
    PrefillParams, TokenKind,
};

/// Margin value meaning "pad the window to the full timeline".
pub const UNBOUNDED_MARGIN: usize = usize::MAX;

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// A task query paired with its embedding (and optional answer options).
#[derive(Debug, Clone, PartialEq)]
pub struct Query {
    pub text: String,
    pub embedding: Vec<f64>,
    pub options: Vec<String>,
}

impl Query {
    pub fn new(text: impl Into<String>, embedding: Vec<f64>) -> Result<Self> {
        if embedding.is_empty() {
            return Err(Error::EmptyInput { what: "query embedding" });
        }
        if embedding.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "query embedding" });
        }
        Ok(Self {
            text: text.into(),
            embedding,
            options: Vec::new(),
        })
    }

    pub fn with_options(mut self, options: Vec<String>) -> Self {
        self.options = options;
        self
    }
}

/// Stage-1 hypothesis: a super-group-aligned span plus the scores that
/// produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseWindow {
    pub interval: TimeInterval,
    pub group_scores: Vec<f64>,
    pub peak_index: usize,
    /// Set when all super-group scores were equal and the window defaulted
    /// to the full timeline.
    pub degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroundingMode {
    SingleStage,
    Progressive,
}

impl std::fmt::Display for GroundingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GroundingMode::SingleStage => write!(f, "single"),
            GroundingMode::Progressive => write!(f, "progressive"),
        }
    }
}

/// Stage-wise token budgets and scores for one grounding session.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundingTrace {
    pub mode: GroundingMode,
    /// Visual entries scored in stage 1 (0 in single-stage mode).
    pub stage1_tokens: usize,
    /// Visual entries scored in stage 2 (the full fine count in
    /// single-stage mode).
    pub stage2_tokens: usize,
    pub degenerate_coarse: bool,
    pub stage1_scores: Vec<f64>,
    pub stage2_scores: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundingResult {
    pub window: CoarseWindow,
    pub interval: TimeInterval,
    pub mode: GroundingMode,
    pub trace: GroundingTrace,
}

/// Decoding and pooling knobs for a grounding session.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineConfig {
    pub pool_factor: usize,
    /// Fine-stage run threshold, relative to the stage's `peak - min`.
    pub theta: f64,
    /// Coarse-stage band width, relative to the stage's `peak - min`.
    pub delta: f64,
    /// Window padding in super-groups per side; `UNBOUNDED_MARGIN` pads to
    /// the full timeline.
    pub margin: usize,
    pub prefill: PrefillParams,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            pool_factor: 4,
            theta: 0.5,
            delta: 0.2,
            margin: 1,
            prefill: PrefillParams::default(),
        }
    }
}

impl EngineConfig {
    fn validate(&self) -> Result<()> {
        if self.pool_factor == 0 {
            return Err(Error::OutOfRange {
                what: "pool factor",
                value: 0.0,
                expected: ">= 1",
            });
        }
        for (what, v) in [("theta", self.theta), ("delta", self.delta)] {
            if !v.is_finite() || !(0.0..=1.0).contains(&v) {
                return Err(Error::OutOfRange {
                    what,
                    value: v,
                    expected: "[0, 1]",
                });
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Scorer contract
// ---------------------------------------------------------------------------

/// Relevance scoring backend. Implementations must be deterministic given
/// their parameters and safe for concurrent read-only use.
pub trait Scorer: Send + Sync {
    fn name(&self) -> &str;

    /// One finite relevance value per visual entry of the cache, in entry
    /// order.
    fn score_visual(&self, query: &Query, cache: &LayerCache) -> Result<Vec<f64>>;
}

/// The reference backend (`synthetic`): mean over layers of the inner
/// product between the query embedding and each visual entry's key. Linear
/// in the key, so scoring a pooled entry equals the mean of scoring its
/// members.
#[derive(Debug, Default, Clone, Copy)]
pub struct InnerProductScorer;

impl Scorer for InnerProductScorer {
    fn name(&self) -> &str {
        "synthetic"
    }

    fn score_visual(&self, query: &Query, cache: &LayerCache) -> Result<Vec<f64>> {
        let visual_positions: Vec<usize> = cache
            .entries(0)
            .iter()
            .enumerate()
            .filter(|(_, e)| e.kind == TokenKind::Visual)
            .map(|(i, _)| i)
            .collect();

        let mut scores = vec![0.0; visual_positions.len()];
        for layer in 0..cache.layer_count() {
            let entries = cache.entries(layer);
            for (slot, &pos) in visual_positions.iter().enumerate() {
                let key = &entries[pos].key;
                if key.len() != query.embedding.len() {
                    return Err(Error::DimensionMismatch {
                        what: "scorer query embedding",
                        expected: key.len(),
                        got: query.embedding.len(),
                    });
                }
                scores[slot] += dot(&query.embedding, key);
            }
        }
        let layers = cache.layer_count() as f64;
        for s in scores.iter_mut() {
            *s /= layers;
        }
        Ok(scores)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Scorer backends addressable by name.
pub struct ScorerRegistry {
    backends: BTreeMap<String, Arc<dyn Scorer>>,
}

impl ScorerRegistry {
    pub fn new() -> Self {
        Self { backends: BTreeMap::new() }
    }

    /// Registry with the shipped `synthetic` reference scorer.
    pub fn with_defaults() -> Self {
        let mut reg = Self::new();
        reg.register(Arc::new(InnerProductScorer));
        reg
    }

    pub fn register(&mut self, scorer: Arc<dyn Scorer>) {
        self.backends.insert(scorer.name().to_string(), scorer);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Scorer>> {
        self.backends
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnknownScorer(name.to_string()))
    }

    pub fn names(&self) -> Vec<&str> {
        self.backends.keys().map(|s| s.as_str()).collect()
    }
}

impl Default for ScorerRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}

// ---------------------------------------------------------------------------
// Remote-model adapter slot
// ---------------------------------------------------------------------------

/// Request record for an external grounding backend: the query text, the
/// window under consideration, and references to the frames inside it. No
/// concrete backend ships; implement [`RemoteGrounderAdapter`] to plug one in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoteGroundingRequest {
    pub query_text: String,
    pub options: Vec<String>,
    pub window: TimeInterval,
    pub frame_times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RemoteGroundingResponse {
    /// One relevance value per referenced frame.
    FrameScores(Vec<f64>),
    /// A directly predicted interval.
    Interval(TimeInterval),
}

pub trait RemoteGrounderAdapter: Send + Sync {
    fn ground(&self, request: &RemoteGroundingRequest) -> Result<RemoteGroundingResponse>;
}

// ---------------------------------------------------------------------------
// Stage 1: coarse windowing
// ---------------------------------------------------------------------------

/// Scores every pooled super-group and hypothesizes a window: the peak
/// super-group extended to contiguous neighbors whose score stays within a
/// `delta` band of the peak (relative to `peak - min`), padded by `margin`
/// super-groups per side and clamped to the timeline. Ties on the peak break
/// toward the earliest super-group. All-equal scores yield the full
/// timeline, flagged degenerate.
pub fn ground_coarse(
    coarse: &LayerCache,
    query: &Query,
    scorer: &dyn Scorer,
    delta: f64,
    margin: usize,
) -> Result<CoarseWindow> {
    if coarse.granularity() != Granularity::Coarse {
        return Err(Error::WrongGranularity {
            expected: "coarse",
            got: "fine",
        });
    }
    let scores = checked_scores(scorer.score_visual(query, coarse)?, coarse)?;
    let spans: Vec<(f64, f64)> = coarse
        .visual_entries(0)
        .map(|e| (e.time_s.unwrap(), e.span_end_s.unwrap()))
        .collect();

    let peak = argmax_earliest(&scores);
    let peak_score = scores[peak];
    let min_score = scores.iter().cloned().fold(f64::INFINITY, f64::min);
    let timeline = coarse.timeline();

    if peak_score == min_score {
        // no information: every super-group looks alike
        return Ok(CoarseWindow {
            interval: timeline,
            group_scores: scores,
            peak_index: peak,
            degenerate: true,
        });
    }

    let band = peak_score - delta * (peak_score - min_score);
    let mut lo = peak;
    while lo > 0 && scores[lo - 1] >= band {
        lo -= 1;
    }
    let mut hi = peak;
    while hi + 1 < scores.len() && scores[hi + 1] >= band {
        hi += 1;
    }
    lo = lo.saturating_sub(margin);
    hi = hi.saturating_add(margin).min(scores.len() - 1);

    let start = spans[lo].0.max(timeline.start_s());
    let end = spans[hi].1.min(timeline.end_s());
    Ok(CoarseWindow {
        interval: TimeInterval::new(start, end)?,
        group_scores: scores,
        peak_index: peak,
        degenerate: false,
    })
}

// ---------------------------------------------------------------------------
// Stage 2: fine run decoding
// ---------------------------------------------------------------------------

/// Scores every frame of the restricted cache and decodes the maximal
/// contiguous run containing the peak frame whose scores stay at or above
/// `min + theta·(peak - min)`. The interval spans the run's first frame time
/// through its last frame time extended by one frame period, so single-frame
/// events still have positive length.
pub fn ground_fine(
    restricted: &LayerCache,
    query: &Query,
    scorer: &dyn Scorer,
    theta: f64,
) -> Result<(TimeInterval, Vec<f64>)> {
    if restricted.granularity() != Granularity::Fine {
        return Err(Error::WrongGranularity {
            expected: "fine",
            got: "coarse",
        });
    }
    if restricted.visual_count() == 0 {
        return Err(Error::EmptyInput { what: "restricted cache" });
    }
    let scores = checked_scores(scorer.score_visual(query, restricted)?, restricted)?;
    let spans: Vec<(f64, f64)> = restricted
        .visual_entries(0)
        .map(|e| (e.time_s.unwrap(), e.span_end_s.unwrap()))
        .collect();

    let peak = argmax_earliest(&scores);
    let peak_score = scores[peak];
    let min_score = scores.iter().cloned().fold(f64::INFINITY, f64::min);
    let threshold = min_score + theta * (peak_score - min_score);

    let mut lo = peak;
    while lo > 0 && scores[lo - 1] >= threshold {
        lo -= 1;
    }
    let mut hi = peak;
    while hi + 1 < scores.len() && scores[hi + 1] >= threshold {
        hi += 1;
    }

    let interval = TimeInterval::new(spans[lo].0, spans[hi].1)?;
    Ok((interval, scores))
}

fn checked_scores(scores: Vec<f64>, cache: &LayerCache) -> Result<Vec<f64>> {
    if scores.len() != cache.visual_count() {
        return Err(Error::DimensionMismatch {
            what: "scorer output",
            expected: cache.visual_count(),
            got: scores.len(),
        });
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite { what: "scorer output" });
    }
    Ok(scores)
}

fn argmax_earliest(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

// ---------------------------------------------------------------------------
// Session drivers
// ---------------------------------------------------------------------------

/// Full progressive session: prefill, pool, coarse window, selective reload,
/// fine run. The reported window is widened to the effective span of the
/// reloaded frames (a closed window can pull in a boundary frame one period
/// past a super-group edge), which makes the containment contract hold by
/// construction.
pub fn ground_progressive(
    video: &FrameSequence,
    query: &Query,
    scorer: &dyn Scorer,
    config: &EngineConfig,
) -> Result<GroundingResult> {
    config.validate()?;
    let seq = build_sequence(video, &query.embedding)?;
    let fine = prefill(&seq, &config.prefill)?;
    let coarse = pool_cache(&fine, config.pool_factor)?;
    let mut window = ground_coarse(&coarse, query, scorer, config.delta, config.margin)?;
    let restricted = select_window(&fine, &window.interval)?;

    let effective = restricted.timeline();
    window.interval = TimeInterval::new(
        window.interval.start_s().min(effective.start_s()),
        window.interval.end_s().max(effective.end_s()),
    )?;

    let (interval, stage2_scores) = ground_fine(&restricted, query, scorer, config.theta)?;
    let interval = clamp_into(&interval, &window.interval, restricted.frame_period_s());

    let trace = GroundingTrace {
        mode: GroundingMode::Progressive,
        stage1_tokens: coarse.visual_count(),
        stage2_tokens: restricted.visual_count(),
        degenerate_coarse: window.degenerate,
        stage1_scores: window.group_scores.clone(),
        stage2_scores,
    };
    Ok(GroundingResult {
        window,
        interval,
        mode: GroundingMode::Progressive,
        trace,
    })
}

/// Ablation baseline: one fine pass over the unrestricted cache, window =
/// full timeline.
pub fn ground_single_stage(
    video: &FrameSequence,
    query: &Query,
    scorer: &dyn Scorer,
    config: &EngineConfig,
) -> Result<GroundingResult> {
    config.validate()?;
    let seq = build_sequence(video, &query.embedding)?;
    let fine = prefill(&seq, &config.prefill)?;
    let (interval, stage2_scores) = ground_fine(&fine, query, scorer, config.theta)?;

    let trace = GroundingTrace {
        mode: GroundingMode::SingleStage,
        stage1_tokens: 0,
        stage2_tokens: fine.visual_count(),
        degenerate_coarse: false,
        stage1_scores: Vec::new(),
        stage2_scores,
    };
    Ok(GroundingResult {
        window: CoarseWindow {
            interval: fine.timeline(),
            group_scores: Vec::new(),
            peak_index: 0,
            degenerate: false,
        },
        interval,
        mode: GroundingMode::SingleStage,
        trace,
    })
}

fn clamp_into(interval: &TimeInterval, window: &TimeInterval, period_s: f64) -> TimeInterval {
    if window.contains(interval) {
        return *interval;
    }
    let end = interval.end_s().min(window.end_s());
    let start = interval.start_s().max(window.start_s());
    if end > start {
        return TimeInterval::new(start, end).expect("clamped interval is valid");
    }
    // run hugged the closed window edge; snap to the last period inside
    let start = (window.end_s() - period_s).max(window.start_s());
    TimeInterval::new(start, window.end_s()).expect("window has positive length")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intervals::iou;
    use crate::model::token_budget;

    /// Test scorer that shifts another scorer's output by a constant.
    struct OffsetScorer<S: Scorer> {
        inner: S,
        offset: f64,
    }

    impl<S: Scorer> Scorer for OffsetScorer<S> {
        fn name(&self) -> &str {
            "offset"
        }
        fn score_visual(&self, query: &Query, cache: &LayerCache) -> Result<Vec<f64>> {
            Ok(self
                .inner
                .score_visual(query, cache)?
                .into_iter()
                .map(|s| s + self.offset)
                .collect())
        }
    }

    /// Video whose frame embeddings are `level * [1]` per frame, dim 1, so
    /// the inner-product scorer against query [1] reproduces `levels`.
    fn leveled_video(levels: &[f64], t0: f64, group_size: usize) -> FrameSequence {
        let frames = levels.iter().map(|&v| vec![v]).collect();
        FrameSequence::new("vid", 1.0, t0, frames, group_size).unwrap()
    }

    fn unit_query() -> Query {
        Query::new("q", vec![1.0]).unwrap()
    }

    fn coarse_for(levels: &[f64], factor: usize) -> LayerCache {
        let video = leveled_video(levels, 0.0, 1);
        let seq = build_sequence(&video, &[1.0]).unwrap();
        let fine = prefill(&seq, &PrefillParams::default()).unwrap();
        pool_cache(&fine, factor).unwrap()
    }

    #[test]
    fn coarse_peak_only() {
        // super-group scores {0,0,9,0}: band excludes zero neighbors, m=0
        let coarse = coarse_for(&[0.0, 0.0, 9.0, 0.0], 1);
        let window = ground_coarse(&coarse, &unit_query(), &InnerProductScorer, 0.2, 0).unwrap();
        assert!(!window.degenerate);
        assert_eq!(window.peak_index, 2);
        assert_eq!(window.interval, TimeInterval::new(2.0, 3.0).unwrap());
    }

    #[test]
    fn coarse_all_equal_defaults_to_full_span() {
        let coarse = coarse_for(&[3.0, 3.0, 3.0, 3.0], 1);
        let window = ground_coarse(&coarse, &unit_query(), &InnerProductScorer, 0.2, 0).unwrap();
        assert!(window.degenerate);
        assert_eq!(window.interval, TimeInterval::new(0.0, 4.0).unwrap());
    }

    #[test]
    fn coarse_band_membership() {
        // scores {5, 9, 8.9, 0}, delta=0.2: band = 9 - 0.2*9 = 7.2 (min is 0),
        // so the window covers super-groups 1-2
        let coarse = coarse_for(&[5.0, 9.0, 8.9, 0.0], 1);
        let window = ground_coarse(&coarse, &unit_query(), &InnerProductScorer, 0.2, 0).unwrap();
        assert_eq!(window.peak_index, 1);
        assert_eq!(window.interval, TimeInterval::new(1.0, 3.0).unwrap());
    }

    #[test]
    fn coarse_tie_breaks_earliest() {
        let coarse = coarse_for(&[1.0, 7.0, 7.0, 0.0], 1);
        let window = ground_coarse(&coarse, &unit_query(), &InnerProductScorer, 0.0, 0).unwrap();
        assert_eq!(window.peak_index, 1);
    }

    #[test]
    fn fine_run_with_end_extension() {
        // frame scores {0,0,1,1,1,0} starting t=10, theta=0.5 -> [12,15]
        let video = leveled_video(&[0.0, 0.0, 1.0, 1.0, 1.0, 0.0], 10.0, 4);
        let seq = build_sequence(&video, &[1.0]).unwrap();
        let fine = prefill(&seq, &PrefillParams::default()).unwrap();
        let (interval, _) = ground_fine(&fine, &unit_query(), &InnerProductScorer, 0.5).unwrap();
        assert_eq!(interval, TimeInterval::new(12.0, 15.0).unwrap());
    }

    #[test]
    fn fine_singleton_run() {
        // single frame above threshold at t=7 -> [7,8]
        let video = leveled_video(&[0.0, 0.0, 0.0, 1.0, 0.0], 4.0, 4);
        let seq = build_sequence(&video, &[1.0]).unwrap();
        let fine = prefill(&seq, &PrefillParams::default()).unwrap();
        let (interval, _) = ground_fine(&fine, &unit_query(), &InnerProductScorer, 0.5).unwrap();
        assert_eq!(interval, TimeInterval::new(7.0, 8.0).unwrap());
    }

    #[test]
    fn fine_peak_always_in_its_own_run() {
        // peak is in its own run by definition, even with theta = 1
        let video = leveled_video(&[0.2, 0.9, 0.1], 0.0, 4);
        let seq = build_sequence(&video, &[1.0]).unwrap();
        let fine = prefill(&seq, &PrefillParams::default()).unwrap();
        let (interval, _) = ground_fine(&fine, &unit_query(), &InnerProductScorer, 1.0).unwrap();
        assert_eq!(interval, TimeInterval::new(1.0, 2.0).unwrap());
    }

    #[test]
    fn progressive_recovers_planted_event() {
        // event at [40,50] in a 300s video, signal 1.0, noise 0
        let levels: Vec<f64> = (0..300)
            .map(|t| if (40..50).contains(&t) { 1.0 } else { 0.0 })
            .collect();
        let video = leveled_video(&levels, 0.0, 1);
        let result = ground_progressive(
            &video,
            &unit_query(),
            &InnerProductScorer,
            &EngineConfig::default(),
        )
        .unwrap();
        let gt = TimeInterval::new(40.0, 50.0).unwrap();
        assert!(iou(&result.interval, &gt).value() >= 0.7);
        assert!(result.window.interval.contains(&result.interval));
        assert_eq!(result.trace.stage1_tokens, 75);
    }

    #[test]
    fn degenerate_equivalence_factor_one_unbounded_margin() {
        let config = EngineConfig {
            pool_factor: 1,
            margin: UNBOUNDED_MARGIN,
            ..EngineConfig::default()
        };
        for seed in 0..20u64 {
            let levels: Vec<f64> = (0..60)
                .map(|i| (((i as u64 * 2654435761 + seed * 97) % 1000) as f64) / 1000.0)
                .collect();
            let video = leveled_video(&levels, 0.0, 4);
            let prog =
                ground_progressive(&video, &unit_query(), &InnerProductScorer, &config).unwrap();
            let single =
                ground_single_stage(&video, &unit_query(), &InnerProductScorer, &config).unwrap();
            assert_eq!(prog.interval, single.interval, "seed {seed}");
        }
    }

    #[test]
    fn result_contained_in_forced_wrong_window() {
        // event outside the window: stage 2 still returns something inside
        let levels: Vec<f64> = (0..100)
            .map(|t| if (80..90).contains(&t) { 1.0 } else { 0.0 })
            .collect();
        let video = leveled_video(&levels, 0.0, 1);
        let seq = build_sequence(&video, &[1.0]).unwrap();
        let fine = prefill(&seq, &PrefillParams::default()).unwrap();
        let wrong = TimeInterval::new(10.0, 30.0).unwrap();
        let restricted = select_window(&fine, &wrong).unwrap();
        let (interval, _) =
            ground_fine(&restricted, &unit_query(), &InnerProductScorer, 0.5).unwrap();
        assert!(restricted.timeline().contains(&interval));
    }

    #[test]
    fn constant_score_shift_changes_nothing() {
        let levels: Vec<f64> = (0..80)
            .map(|t| if (30..38).contains(&t) { 1.0 } else { 0.1 })
            .collect();
        let video = leveled_video(&levels, 0.0, 1);
        let config = EngineConfig::default();
        let base = ground_progressive(&video, &unit_query(), &InnerProductScorer, &config).unwrap();
        for offset in [-5.0, 3.0, 1e4] {
            let shifted = OffsetScorer { inner: InnerProductScorer, offset };
            let got = ground_progressive(&video, &unit_query(), &shifted, &config).unwrap();
            assert_eq!(got.interval, base.interval, "offset {offset}");
            assert_eq!(got.window.interval, base.window.interval, "offset {offset}");
        }
    }

    #[test]
    fn pooled_score_is_mean_of_member_scores() {
        let levels: Vec<f64> = (0..48).map(|i| (i % 7) as f64 * 0.3 + 0.1).collect();
        let video = leveled_video(&levels, 0.0, 2);
        let seq = build_sequence(&video, &[1.0]).unwrap();
        let fine = prefill(&seq, &PrefillParams::default()).unwrap();
        let factor = 3;
        let coarse = pool_cache(&fine, factor).unwrap();

        let q = unit_query();
        let fine_scores = InnerProductScorer.score_visual(&q, &fine).unwrap();
        let coarse_scores = InnerProductScorer.score_visual(&q, &coarse).unwrap();

        let per_super = factor * 2; // frames per super-group at group_size 2
        for (sg, &pooled) in coarse_scores.iter().enumerate() {
            let members =
                &fine_scores[sg * per_super..((sg + 1) * per_super).min(fine_scores.len())];
            let mean = members.iter().sum::<f64>() / members.len() as f64;
            let rel = (pooled - mean).abs() / mean.abs().max(1.0);
            assert!(rel <= 1e-9, "super-group {sg}: {pooled} vs {mean}");
        }
    }

    #[test]
    fn single_stage_trace_shows_full_count() {
        let video = leveled_video(&vec![0.5; 300], 0.0, 4);
        let result = ground_single_stage(
            &video,
            &unit_query(),
            &InnerProductScorer,
            &EngineConfig::default(),
        )
        .unwrap();
        assert_eq!(result.trace.stage2_tokens, 300);
        assert_eq!(result.trace.stage1_tokens, 0);
    }

    #[test]
    fn progressive_budget_inequality() {
        // window covering w frames of N saves tokens whenever w < N(1 - 1/c)
        let levels: Vec<f64> = (0..200)
            .map(|t| if (100..110).contains(&t) { 1.0 } else { 0.0 })
            .collect();
        let video = leveled_video(&levels, 0.0, 1);
        let seq = build_sequence(&video, &[1.0]).unwrap();
        let config = EngineConfig::default();
        let fine = prefill(&seq, &config.prefill).unwrap();
        let coarse = pool_cache(&fine, config.pool_factor).unwrap();
        let window = ground_coarse(&coarse, &unit_query(), &InnerProductScorer, 0.2, 1).unwrap();
        let restricted = select_window(&fine, &window.interval).unwrap();
        let budget = token_budget(&fine, &coarse, &restricted).unwrap();
        assert_eq!(budget.stage1_visual, 200usize.div_ceil(config.pool_factor));
        assert!(budget.progressive_saves);
    }

    #[test]
    fn registry_resolves_synthetic() {
        let registry = ScorerRegistry::with_defaults();
        assert!(registry.get("synthetic").is_ok());
        assert!(matches!(
            registry.get("nonexistent"),
            Err(Error::UnknownScorer(_))
        ));
        assert_eq!(registry.names(), vec!["synthetic"]);
    }

    #[test]
    fn boundary_frame_widens_reported_window() {
        // the closed window [4,8] pulls in frame 8 (one period past the
        // super-group edge); when that frame wins the fine stage, the
        // reported window must cover its span
        let mut levels = vec![0.0; 16];
        levels[4] = 1.0;
        levels[5] = 1.0;
        levels[6] = 1.0;
        levels[8] = 1.1;
        let video = leveled_video(&levels, 0.0, 1);
        let config = EngineConfig {
            pool_factor: 4,
            margin: 0,
            ..EngineConfig::default()
        };
        let result =
            ground_progressive(&video, &unit_query(), &InnerProductScorer, &config).unwrap();
        assert_eq!(result.interval, TimeInterval::new(8.0, 9.0).unwrap());
        assert!(result.window.interval.contains(&result.interval));
        assert_eq!(result.window.interval, TimeInterval::new(4.0, 9.0).unwrap());
    }

    #[test]
    fn all_constant_video_degenerates_to_full_span() {
        let video = leveled_video(&vec![0.7; 64], 0.0, 4);
        let result = ground_progressive(
            &video,
            &unit_query(),
            &InnerProductScorer,
            &EngineConfig::default(),
        )
        .unwrap();
        assert!(result.trace.degenerate_coarse);
        assert_eq!(result.window.interval, TimeInterval::new(0.0, 64.0).unwrap());
        // fine stage over equal scores returns the whole window
        assert_eq!(result.interval, TimeInterval::new(0.0, 64.0).unwrap());
    }

    #[test]
    fn grounding_works_on_subsampled_videos() {
        // a capped video has a 2s frame period; run decoding and window
        // math must follow the effective fps
        let levels: Vec<f64> = (0..200)
            .map(|t| if (120..140).contains(&t) { 1.0 } else { 0.0 })
            .collect();
        let video = leveled_video(&levels, 0.0, 1).subsampled_to_cap(100).unwrap();
        assert_eq!(video.frame_period_s(), 2.0);
        let result = ground_progressive(
            &video,
            &unit_query(),
            &InnerProductScorer,
            &EngineConfig::default(),
        )
        .unwrap();
        let gt = TimeInterval::new(120.0, 140.0).unwrap();
        assert!(iou(&result.interval, &gt).value() >= 0.7, "{}", result.interval);
        assert!(result.window.interval.contains(&result.interval));
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

        #[test]
        fn progressive_always_contained_and_in_timeline(
            levels in proptest::collection::vec(-1.0f64..1.0, 8..120),
            factor in 1usize..6,
            margin in 0usize..3,
            group_size in 1usize..5,
        ) {
            let video = leveled_video(&levels, 0.0, group_size);
            let config = EngineConfig {
                pool_factor: factor,
                margin,
                ..EngineConfig::default()
            };
            let result =
                ground_progressive(&video, &unit_query(), &InnerProductScorer, &config).unwrap();
            proptest::prop_assert!(result.window.interval.contains(&result.interval));
            proptest::prop_assert!(result.interval.start_s() >= 0.0);
            proptest::prop_assert!(result.interval.end_s() <= video.end_s() + 1e-9);
        }
    }
}
