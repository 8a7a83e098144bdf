//! Temporal augmentations applied jointly to frame timelines and
//! ground-truth intervals: shift, cut, and scale.
//!
//! Frame features are never touched; only times move. Cut windows that
//! destroy the ground truth produce a discard signal rather than an error so
//! batch pipelines stay total. Randomness comes from a per-sample seeded
//! generator, so augmented datasets are reproducible byte for byte.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::curation::GroundingSample;
use crate::error::{Error, Result};
use crate::intervals::TimeInterval;
use crate::model::FrameSequence;

/// Sampling range for shift offsets, in seconds.
pub const SHIFT_RANGE_S: (f64, f64) = (4.0, 1004.0);
/// Sampling range for cut window spans, in seconds.
pub const CUT_SPAN_RANGE_S: (f64, f64) = (10.0, 20.0);
/// Default sampling range for scale factors, symmetric in log space around
/// identity.
pub const SCALE_RANGE: (f64, f64) = (0.5, 2.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AugmentationKind {
    Shift,
    Cut,
    Scale,
}

/// A concrete, applicable augmentation with its drawn parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Augmentation {
    Shift { offset_s: f64 },
    Cut { window: TimeInterval },
    Scale { factor: f64 },
}

/// Draws augmentations from the configured ranges with a per-sample seeded
/// generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentationSampler {
    pub kind: AugmentationKind,
    pub shift_range_s: (f64, f64),
    pub cut_span_range_s: (f64, f64),
    pub scale_range: (f64, f64),
    pub seed: u64,
}

impl AugmentationSampler {
    pub fn new(kind: AugmentationKind, seed: u64) -> Self {
        Self {
            kind,
            shift_range_s: SHIFT_RANGE_S,
            cut_span_range_s: CUT_SPAN_RANGE_S,
            scale_range: SCALE_RANGE,
            seed,
        }
    }

    /// Deterministic draw for the sample at `index`. Cut windows are placed
    /// uniformly inside the video span; spans longer than the video clamp to
    /// the full span.
    pub fn draw(&self, index: u64, video_start_s: f64, video_end_s: f64) -> Result<Augmentation> {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(self.seed ^ index));
        match self.kind {
            AugmentationKind::Shift => {
                let (lo, hi) = self.shift_range_s;
                Ok(Augmentation::Shift {
                    offset_s: rng.gen_range(lo..=hi),
                })
            }
            AugmentationKind::Cut => {
                let (lo, hi) = self.cut_span_range_s;
                let video_len = video_end_s - video_start_s;
                let span = rng.gen_range(lo..=hi).min(video_len);
                let start = if video_len > span {
                    video_start_s + rng.gen_range(0.0..=(video_len - span))
                } else {
                    video_start_s
                };
                Ok(Augmentation::Cut {
                    window: TimeInterval::new(start, start + span)?,
                })
            }
            AugmentationKind::Scale => {
                let (lo, hi) = self.scale_range;
                if !lo.is_finite() || !hi.is_finite() || lo <= 0.0 || hi < lo {
                    return Err(Error::OutOfRange {
                        what: "scale range",
                        value: lo,
                        expected: "0 < lo <= hi",
                    });
                }
                let factor = (rng.gen_range(lo.ln()..=hi.ln())).exp();
                Ok(Augmentation::Scale { factor })
            }
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

/// Outcome of a cut: the window can destroy the target, which discards the
/// sample instead of erroring.
#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum CutOutcome {
    Kept {
        sample: GroundingSample,
        frames: FrameSequence,
        /// Indices of the surviving frames in the original sequence, for
        /// slicing feature files.
        kept_frames: Vec<usize>,
    },
    Discarded,
}

/// Translates every frame time and the ground-truth interval by `offset_s`.
/// The duration metadata grows by the offset since the timeline now ends
/// that much later.
pub fn shift(
    sample: &GroundingSample,
    frames: &FrameSequence,
    offset_s: f64,
) -> Result<(GroundingSample, FrameSequence)> {
    if !offset_s.is_finite() || offset_s < 0.0 {
        return Err(Error::OutOfRange {
            what: "shift offset",
            value: offset_s,
            expected: ">= 0",
        });
    }
    let shifted_frames = FrameSequence::new(
        frames.video_id().to_string(),
        frames.fps(),
        frames.start_s() + offset_s,
        frames.frames().to_vec(),
        frames.group_size(),
    )?;
    let shifted_sample = GroundingSample::new(
        sample.video_id.clone(),
        sample.duration_s + offset_s,
        sample.query.clone(),
        sample.options.clone(),
        sample.gt.translated(offset_s)?,
        sample.task_type.clone(),
        sample.video_category.clone(),
    )?;
    Ok((shifted_sample, shifted_frames))
}

/// Keeps only the frames inside `window` (half-open on frame times, so the
/// cut video's duration equals the window length) and re-bases times and the
/// ground truth to `window.start = 0`, clipping the ground truth to the
/// window. A window that misses the ground truth, or contains no frames,
/// discards the sample.
pub fn cut(
    sample: &GroundingSample,
    frames: &FrameSequence,
    window: &TimeInterval,
) -> Result<CutOutcome> {
    if window.start_s() < 0.0 || window.end_s() > sample.duration_s + 1e-9 {
        return Err(Error::IntervalOutsideVideo {
            start_s: window.start_s(),
            end_s: window.end_s(),
            duration_s: sample.duration_s,
        });
    }
    let new_gt = match sample.gt.clipped_to(window) {
        Some(iv) => iv.translated(-window.start_s())?,
        None => return Ok(CutOutcome::Discarded),
    };

    let kept_frames: Vec<usize> = frames
        .frame_times()
        .iter()
        .enumerate()
        .filter(|(_, &t)| window.start_s() <= t && t < window.end_s())
        .map(|(i, _)| i)
        .collect();
    if kept_frames.is_empty() {
        return Ok(CutOutcome::Discarded);
    }

    let new_t0 = frames.frame_times()[kept_frames[0]] - window.start_s();
    let new_features: Vec<Vec<f64>> = kept_frames
        .iter()
        .map(|&i| frames.frame(i).to_vec())
        .collect();
    let new_frames = FrameSequence::new(
        frames.video_id().to_string(),
        frames.fps(),
        new_t0,
        new_features,
        frames.group_size(),
    )?;
    let new_sample = GroundingSample::new(
        sample.video_id.clone(),
        window.duration_s(),
        sample.query.clone(),
        sample.options.clone(),
        new_gt,
        sample.task_type.clone(),
        sample.video_category.clone(),
    )?;
    Ok(CutOutcome::Kept {
        sample: new_sample,
        frames: new_frames,
        kept_frames,
    })
}

/// Multiplies every frame time and the ground-truth endpoints by `factor`;
/// the effective fps divides by the same factor.
pub fn scale(
    sample: &GroundingSample,
    frames: &FrameSequence,
    factor: f64,
) -> Result<(GroundingSample, FrameSequence)> {
    if !factor.is_finite() || factor <= 0.0 {
        return Err(Error::OutOfRange {
            what: "scale factor",
            value: factor,
            expected: "> 0",
        });
    }
    let scaled_frames = FrameSequence::new(
        frames.video_id().to_string(),
        frames.fps() / factor,
        frames.start_s() * factor,
        frames.frames().to_vec(),
        frames.group_size(),
    )?;
    let scaled_sample = GroundingSample::new(
        sample.video_id.clone(),
        sample.duration_s * factor,
        sample.query.clone(),
        sample.options.clone(),
        sample.gt.scaled(factor)?,
        sample.task_type.clone(),
        sample.video_category.clone(),
    )?;
    Ok((scaled_sample, scaled_frames))
}

/// Applies a drawn augmentation to one sample.
pub fn apply(
    augmentation: &Augmentation,
    sample: &GroundingSample,
    frames: &FrameSequence,
) -> Result<CutOutcome> {
    match augmentation {
        Augmentation::Shift { offset_s } => {
            let (s, f) = shift(sample, frames, *offset_s)?;
            Ok(CutOutcome::Kept {
                sample: s,
                frames: f,
                kept_frames: (0..frames.len()).collect(),
            })
        }
        Augmentation::Cut { window } => cut(sample, frames, window),
        Augmentation::Scale { factor } => {
            let (s, f) = scale(sample, frames, *factor)?;
            Ok(CutOutcome::Kept {
                sample: s,
                frames: f,
                kept_frames: (0..frames.len()).collect(),
            })
        }
    }
}
