//! Frame/token sequence construction and the key-value cache substrate.
//!
//! A video is a sequence of per-frame feature vectors sampled at fixed fps.
//! Token sequences interleave one timestamp token ahead of every group of
//! `group_size` consecutive frames, with query tokens appended last. Prefill
//! turns a token sequence into a fine per-layer cache; average pooling
//! distills the fine cache into a coarse one; window selection reloads the
//! fine entries for a hypothesized span only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intervals::TimeInterval;

pub const DEFAULT_FPS: f64 = 1.0;
pub const DEFAULT_GROUP_SIZE: usize = 4;
/// Frame cap applied when building training-context sequences.
pub const TRAIN_FRAME_CAP: usize = 300;
/// Frame cap applied when building evaluation-context sequences.
pub const EVAL_FRAME_CAP: usize = 800;

// ---------------------------------------------------------------------------
// Frame sequences
// ---------------------------------------------------------------------------

/// Per-video frame features sampled at fixed fps. Frame times are strictly
/// increasing with spacing `1/fps`, starting at `t0_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSequence {
    video_id: String,
    fps: f64,
    group_size: usize,
    t0_s: f64,
    frames: Vec<Vec<f64>>,
    frame_times: Vec<f64>,
    dim: usize,
}

impl FrameSequence {
    pub fn new(
        video_id: impl Into<String>,
        fps: f64,
        t0_s: f64,
        frames: Vec<Vec<f64>>,
        group_size: usize,
    ) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::EmptyInput { what: "frames" });
        }
        if !fps.is_finite() || fps <= 0.0 {
            return Err(Error::OutOfRange {
                what: "fps",
                value: fps,
                expected: "> 0",
            });
        }
        if group_size == 0 {
            return Err(Error::OutOfRange {
                what: "group size",
                value: 0.0,
                expected: ">= 1",
            });
        }
        if !t0_s.is_finite() || t0_s < 0.0 {
            return Err(Error::OutOfRange {
                what: "first frame time",
                value: t0_s,
                expected: ">= 0",
            });
        }
        let dim = frames[0].len();
        if dim == 0 {
            return Err(Error::EmptyInput { what: "feature vector" });
        }
        for f in &frames {
            if f.len() != dim {
                return Err(Error::DimensionMismatch {
                    what: "frame feature",
                    expected: dim,
                    got: f.len(),
                });
            }
            if f.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite { what: "frame feature" });
            }
        }
        let period = 1.0 / fps;
        let frame_times = (0..frames.len()).map(|k| t0_s + k as f64 * period).collect();
        Ok(Self {
            video_id: video_id.into(),
            fps,
            group_size,
            t0_s,
            frames,
            frame_times,
            dim,
        })
    }

    pub fn video_id(&self) -> &str {
        &self.video_id
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    pub fn group_size(&self) -> usize {
        self.group_size
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn frame(&self, index: usize) -> &[f64] {
        &self.frames[index]
    }

    pub fn frames(&self) -> &[Vec<f64>] {
        &self.frames
    }

    pub fn frame_times(&self) -> &[f64] {
        &self.frame_times
    }

    pub fn frame_period_s(&self) -> f64 {
        1.0 / self.fps
    }

    pub fn start_s(&self) -> f64 {
        self.t0_s
    }

    /// End of the timeline the sequence covers: the last frame's time plus
    /// one frame period.
    pub fn end_s(&self) -> f64 {
        *self.frame_times.last().unwrap() + self.frame_period_s()
    }

    pub fn group_count(&self) -> usize {
        self.frames.len().div_ceil(self.group_size)
    }

    /// Uniform integer-stride subsampling down to at most `cap` frames. The
    /// stride is `ceil(len / cap)`; the effective fps drops by the same
    /// factor so spacing stays uniform and frame times keep their original
    /// timeline positions.
    pub fn subsampled_to_cap(&self, cap: usize) -> Result<FrameSequence> {
        if cap == 0 {
            return Err(Error::OutOfRange {
                what: "frame cap",
                value: 0.0,
                expected: ">= 1",
            });
        }
        if self.frames.len() <= cap {
            return Ok(self.clone());
        }
        let stride = self.frames.len().div_ceil(cap);
        let frames: Vec<Vec<f64>> = self.frames.iter().step_by(stride).cloned().collect();
        FrameSequence::new(
            self.video_id.clone(),
            self.fps / stride as f64,
            self.t0_s,
            frames,
            self.group_size,
        )
    }

    /// Prefix of the sequence containing at most `max_frames` frames.
    pub fn truncated(&self, max_frames: usize) -> Result<FrameSequence> {
        if max_frames == 0 {
            return Err(Error::EmptyInput { what: "truncated frames" });
        }
        let n = max_frames.min(self.frames.len());
        FrameSequence::new(
            self.video_id.clone(),
            self.fps,
            self.t0_s,
            self.frames[..n].to_vec(),
            self.group_size,
        )
    }
}

// ---------------------------------------------------------------------------
// Tokens
// ---------------------------------------------------------------------------

/// Explicit wall-clock marker prepended ahead of each frame group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimestampToken {
    pub group_index: usize,
    pub time_s: f64,
    pub text: String,
}

impl TimestampToken {
    pub fn new(group_index: usize, time_s: f64) -> Self {
        Self {
            group_index,
            time_s,
            text: render_timestamp(time_s),
        }
    }
}

/// Renders a timestamp label with one decimal digit, e.g. `Time: 4.0 Second`.
pub fn render_timestamp(time_s: f64) -> String {
    format!("Time: {:.1} Second", time_s)
}

/// Parses a rendered timestamp label back to seconds.
pub fn parse_timestamp(text: &str) -> Result<f64> {
    let inner = text
        .strip_prefix("Time: ")
        .and_then(|rest| rest.strip_suffix(" Second"))
        .ok_or(Error::OutOfRange {
            what: "timestamp text",
            value: f64::NAN,
            expected: "`Time: {seconds} Second`",
        })?;
    inner.parse::<f64>().map_err(|_| Error::OutOfRange {
        what: "timestamp text",
        value: f64::NAN,
        expected: "`Time: {seconds} Second`",
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TokenKind {
    Visual,
    Timestamp,
    Query,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Frame group the token belongs to (visual and timestamp tokens).
    pub group_index: Option<usize>,
    /// Source frame (visual tokens only).
    pub frame_index: Option<usize>,
    /// Start of the span the token covers: frame time for visual tokens,
    /// group start time for timestamp tokens.
    pub time_s: Option<f64>,
    pub embedding: Vec<f64>,
}

/// Interleaved token sequence: per frame group one timestamp token followed
/// by the group's visual tokens (one per frame), query tokens last. A final
/// partial group still gets its own timestamp token.
#[derive(Debug, Clone)]
pub struct TokenSequence {
    video_id: String,
    dim: usize,
    fps: f64,
    group_size: usize,
    start_s: f64,
    end_s: f64,
    tokens: Vec<Token>,
    timestamps: Vec<TimestampToken>,
}

impl TokenSequence {
    pub fn video_id(&self) -> &str {
        &self.video_id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    pub fn group_size(&self) -> usize {
        self.group_size
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn timestamps(&self) -> &[TimestampToken] {
        &self.timestamps
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn visual_count(&self) -> usize {
        self.tokens.iter().filter(|t| t.kind == TokenKind::Visual).count()
    }
}

/// Builds the interleaved token sequence for a video plus one query token.
pub fn build_sequence(video: &FrameSequence, query_embedding: &[f64]) -> Result<TokenSequence> {
    if query_embedding.len() != video.dim() {
        return Err(Error::DimensionMismatch {
            what: "query embedding",
            expected: video.dim(),
            got: query_embedding.len(),
        });
    }
    if query_embedding.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { what: "query embedding" });
    }

    let gs = video.group_size();
    let mut tokens = Vec::with_capacity(video.len() + video.group_count() + 1);
    let mut timestamps = Vec::with_capacity(video.group_count());

    for group in 0..video.group_count() {
        let first_frame = group * gs;
        let group_time = video.frame_times()[first_frame];
        tokens.push(Token {
            kind: TokenKind::Timestamp,
            group_index: Some(group),
            frame_index: None,
            time_s: Some(group_time),
            embedding: timestamp_embedding(group_time, video.dim()),
        });
        timestamps.push(TimestampToken::new(group, group_time));

        let last_frame = ((group + 1) * gs).min(video.len());
        for frame in first_frame..last_frame {
            tokens.push(Token {
                kind: TokenKind::Visual,
                group_index: Some(group),
                frame_index: Some(frame),
                time_s: Some(video.frame_times()[frame]),
                embedding: video.frame(frame).to_vec(),
            });
        }
    }

    tokens.push(Token {
        kind: TokenKind::Query,
        group_index: None,
        frame_index: None,
        time_s: None,
        embedding: query_embedding.to_vec(),
    });

    Ok(TokenSequence {
        video_id: video.video_id().to_string(),
        dim: video.dim(),
        fps: video.fps(),
        group_size: gs,
        start_s: video.start_s(),
        end_s: video.end_s(),
        tokens,
        timestamps,
    })
}

fn timestamp_embedding(time_s: f64, dim: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[0] = time_s;
    e
}

// ---------------------------------------------------------------------------
// Layer caches
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Granularity {
    Fine,
    Coarse,
}

impl Granularity {
    fn name(&self) -> &'static str {
        match self {
            Granularity::Fine => "fine",
            Granularity::Coarse => "coarse",
        }
    }
}

/// One key/value pair tagged with its source token's origin. Coarse visual
/// entries carry the super-group index and the time span they pool over.
#[derive(Debug, Clone, PartialEq)]
pub struct CacheEntry {
    pub kind: TokenKind,
    pub group_index: Option<usize>,
    pub frame_index: Option<usize>,
    pub time_s: Option<f64>,
    pub span_end_s: Option<f64>,
    pub key: Vec<f64>,
    pub value: Vec<f64>,
}

/// Per-layer key/value states, one entry per token position, tagged by the
/// source token's kind and indices. Tags are identical across layers.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerCache {
    video_id: String,
    granularity: Granularity,
    pool_factor: Option<usize>,
    layer_count: usize,
    fps: f64,
    group_size: usize,
    start_s: f64,
    end_s: f64,
    layers: Vec<Vec<CacheEntry>>,
}

impl LayerCache {
    pub fn video_id(&self) -> &str {
        &self.video_id
    }

    pub fn granularity(&self) -> Granularity {
        self.granularity
    }

    pub fn pool_factor(&self) -> Option<usize> {
        self.pool_factor
    }

    pub fn layer_count(&self) -> usize {
        self.layer_count
    }

    pub fn fps(&self) -> f64 {
        self.fps
    }

    pub fn frame_period_s(&self) -> f64 {
        1.0 / self.fps
    }

    pub fn group_size(&self) -> usize {
        self.group_size
    }

    /// Timeline span the cached entries cover.
    pub fn timeline(&self) -> TimeInterval {
        TimeInterval::new(self.start_s, self.end_s)
            .expect("cache timeline is valid by construction")
    }

    pub fn entries(&self, layer: usize) -> &[CacheEntry] {
        &self.layers[layer]
    }

    /// Entries of one layer filtered to visual kind, in sequence order.
    pub fn visual_entries(&self, layer: usize) -> impl Iterator<Item = &CacheEntry> {
        self.layers[layer].iter().filter(|e| e.kind == TokenKind::Visual)
    }

    /// Number of visual entries per layer.
    pub fn visual_count(&self) -> usize {
        self.visual_entries(0).count()
    }

    /// Number of entries per layer (all kinds).
    pub fn entries_per_layer(&self) -> usize {
        self.layers[0].len()
    }

    /// Total entry count across layers.
    pub fn total_entries(&self) -> usize {
        self.layers.iter().map(|l| l.len()).sum()
    }

    /// Distinct visual frame-group count.
    pub fn visual_group_count(&self) -> usize {
        self.visual_entries(0)
            .filter_map(|e| e.group_index)
            .collect::<std::collections::BTreeSet<_>>()
            .len()
    }
}

/// Deterministic per-layer key/value projection parameters. Keys and values
/// are linear in the token embedding so that inner-product scoring commutes
/// with average pooling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrefillParams {
    pub layer_count: usize,
    pub key_gain: f64,
    pub value_gain: f64,
}

impl Default for PrefillParams {
    fn default() -> Self {
        Self {
            layer_count: 2,
            key_gain: 1.0,
            value_gain: 1.0,
        }
    }
}

/// Populates the fine cache: one key/value pair per token per layer, tags
/// preserved, fully deterministic.
pub fn prefill(seq: &TokenSequence, params: &PrefillParams) -> Result<LayerCache> {
    if seq.is_empty() {
        return Err(Error::EmptyInput { what: "token sequence" });
    }
    if params.layer_count == 0 {
        return Err(Error::OutOfRange {
            what: "layer count",
            value: 0.0,
            expected: ">= 1",
        });
    }
    if !params.key_gain.is_finite() || !params.value_gain.is_finite() {
        return Err(Error::NonFinite { what: "prefill gains" });
    }

    let period = 1.0 / seq.fps();
    let layers = (0..params.layer_count)
        .map(|_| {
            seq.tokens()
                .iter()
                .map(|tok| CacheEntry {
                    kind: tok.kind,
                    group_index: tok.group_index,
                    frame_index: tok.frame_index,
                    time_s: tok.time_s,
                    span_end_s: match tok.kind {
                        TokenKind::Visual => tok.time_s.map(|t| t + period),
                        _ => None,
                    },
                    key: tok.embedding.iter().map(|v| v * params.key_gain).collect(),
                    value: tok.embedding.iter().map(|v| v * params.value_gain).collect(),
                })
                .collect()
        })
        .collect();

    Ok(LayerCache {
        video_id: seq.video_id().to_string(),
        granularity: Granularity::Fine,
        pool_factor: None,
        layer_count: params.layer_count,
        fps: seq.fps(),
        group_size: seq.group_size(),
        start_s: seq.start_s,
        end_s: seq.end_s,
        layers,
    })
}

/// Distills a fine cache into a coarse one by averaging the keys (and
/// values) of all visual entries within each super-group of `factor`
/// consecutive frame groups. The tail super-group averages whatever members
/// remain. Timestamp entries survive unpooled, one per super-group (the
/// earliest member group's), and query entries are never pooled.
pub fn pool_cache(fine: &LayerCache, factor: usize) -> Result<LayerCache> {
    if fine.granularity == Granularity::Coarse {
        return Err(Error::AlreadyCoarse);
    }
    if factor == 0 {
        return Err(Error::OutOfRange {
            what: "pool factor",
            value: 0.0,
            expected: ">= 1",
        });
    }

    // super-groups form over the groups actually present, so pooling a
    // window-restricted cache works even though its group indices do not
    // start at zero
    let present_groups: Vec<usize> = fine
        .visual_entries(0)
        .filter_map(|e| e.group_index)
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    if present_groups.is_empty() {
        return Err(Error::EmptyInput { what: "visual entries" });
    }
    let super_groups: Vec<&[usize]> = present_groups.chunks(factor).collect();

    let layers = (0..fine.layer_count)
        .map(|layer| {
            let entries = fine.entries(layer);
            let mut pooled = Vec::with_capacity(2 * super_groups.len() + 4);

            for (sg, member_groups) in super_groups.iter().enumerate() {
                // earliest member group's timestamp, kept unpooled
                if let Some(stamp) = entries.iter().find(|e| {
                    e.kind == TokenKind::Timestamp && e.group_index == Some(member_groups[0])
                }) {
                    pooled.push(stamp.clone());
                }

                let members: Vec<&CacheEntry> = entries
                    .iter()
                    .filter(|e| {
                        e.kind == TokenKind::Visual
                            && e.group_index.is_some_and(|g| member_groups.contains(&g))
                    })
                    .collect();
                let key = mean_vectors(members.iter().map(|e| e.key.as_slice()));
                let value = mean_vectors(members.iter().map(|e| e.value.as_slice()));
                let span_start = members
                    .iter()
                    .filter_map(|e| e.time_s)
                    .fold(f64::INFINITY, f64::min);
                let span_end = members
                    .iter()
                    .filter_map(|e| e.span_end_s)
                    .fold(f64::NEG_INFINITY, f64::max);

                pooled.push(CacheEntry {
                    kind: TokenKind::Visual,
                    group_index: Some(sg),
                    frame_index: None,
                    time_s: Some(span_start),
                    span_end_s: Some(span_end),
                    key,
                    value,
                });
            }

            pooled.extend(entries.iter().filter(|e| e.kind == TokenKind::Query).cloned());
            pooled
        })
        .collect();

    Ok(LayerCache {
        video_id: fine.video_id.clone(),
        granularity: Granularity::Coarse,
        pool_factor: Some(factor),
        layer_count: fine.layer_count,
        fps: fine.fps,
        group_size: fine.group_size,
        start_s: fine.start_s,
        end_s: fine.end_s,
        layers,
    })
}

fn mean_vectors<'a>(vectors: impl Iterator<Item = &'a [f64]>) -> Vec<f64> {
    let mut sum: Vec<f64> = Vec::new();
    let mut count = 0usize;
    for v in vectors {
        if sum.is_empty() {
            sum = vec![0.0; v.len()];
        }
        for (s, x) in sum.iter_mut().zip(v) {
            *s += x;
        }
        count += 1;
    }
    let n = count as f64;
    for s in sum.iter_mut() {
        *s /= n;
    }
    sum
}

/// Reloads exactly the fine entries whose frame time lies in the closed
/// window, plus the timestamp tokens of included groups and all query
/// entries. Order is preserved; vectors are copied untouched. The returned
/// cache's timeline is the effective span actually covered: first included
/// frame time through last included frame time plus one period.
pub fn select_window(fine: &LayerCache, window: &TimeInterval) -> Result<LayerCache> {
    if fine.granularity != Granularity::Fine {
        return Err(Error::WrongGranularity {
            expected: "fine",
            got: fine.granularity.name(),
        });
    }

    let included_groups: std::collections::BTreeSet<usize> = fine
        .visual_entries(0)
        .filter(|e| e.time_s.is_some_and(|t| window.contains_time(t)))
        .filter_map(|e| e.group_index)
        .collect();

    if included_groups.is_empty() {
        let timeline = fine.timeline();
        return Err(Error::EmptyWindow {
            start_s: window.start_s(),
            end_s: window.end_s(),
            timeline_start_s: timeline.start_s(),
            timeline_end_s: timeline.end_s(),
        });
    }

    let mut span_start = f64::INFINITY;
    let mut span_end = f64::NEG_INFINITY;
    let layers: Vec<Vec<CacheEntry>> = (0..fine.layer_count)
        .map(|layer| {
            fine.entries(layer)
                .iter()
                .filter(|e| match e.kind {
                    TokenKind::Visual => {
                        let keep = e.time_s.is_some_and(|t| window.contains_time(t));
                        if keep && layer == 0 {
                            span_start = span_start.min(e.time_s.unwrap());
                            span_end = span_end.max(e.span_end_s.unwrap());
                        }
                        keep
                    }
                    TokenKind::Timestamp => {
                        e.group_index.is_some_and(|g| included_groups.contains(&g))
                    }
                    TokenKind::Query => true,
                })
                .cloned()
                .collect()
        })
        .collect();

    Ok(LayerCache {
        video_id: fine.video_id.clone(),
        granularity: Granularity::Fine,
        pool_factor: None,
        layer_count: fine.layer_count,
        fps: fine.fps,
        group_size: fine.group_size,
        start_s: span_start,
        end_s: span_end,
        layers,
    })
}

// ---------------------------------------------------------------------------
// Token budget accounting
// ---------------------------------------------------------------------------

/// Visual-token counts for the three cache stages of one video. Time cost is
/// modeled as token-count accounting, not wall clock.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetRecord {
    pub video_id: String,
    /// Visual entries per layer in the unrestricted fine cache.
    pub single_stage_visual: usize,
    /// Pooled visual entries per layer in the coarse cache.
    pub stage1_visual: usize,
    /// Visual entries per layer in the window-restricted cache.
    pub stage2_visual: usize,
    pub single_stage_entries: usize,
    pub stage1_entries: usize,
    pub stage2_entries: usize,
    /// Whether the two progressive stages together attend to fewer visual
    /// positions than the single stage. Holds whenever the window covers
    /// less than `1 - 1/factor` of the video.
    pub progressive_saves: bool,
}

/// Token-count comparison between single-stage and progressive grounding.
pub fn token_budget(
    fine: &LayerCache,
    coarse: &LayerCache,
    restricted: &LayerCache,
) -> Result<BudgetRecord> {
    for other in [coarse, restricted] {
        if other.video_id() != fine.video_id() {
            return Err(Error::VideoMismatch {
                a: fine.video_id().to_string(),
                b: other.video_id().to_string(),
            });
        }
    }
    let single = fine.visual_count();
    let stage1 = coarse.visual_count();
    let stage2 = restricted.visual_count();
    Ok(BudgetRecord {
        video_id: fine.video_id().to_string(),
        single_stage_visual: single,
        stage1_visual: stage1,
        stage2_visual: stage2,
        single_stage_entries: fine.entries_per_layer(),
        stage1_entries: coarse.entries_per_layer(),
        stage2_entries: restricted.entries_per_layer(),
        progressive_saves: stage1 + stage2 < single,
    })
}
