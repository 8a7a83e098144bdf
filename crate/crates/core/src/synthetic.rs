//! Deterministic synthetic corpus with planted signal.
//!
//! Frames inside a designated ground-truth interval carry embeddings with a
//! fixed inner product (the signal amplitude) against the query's derived
//! embedding; all other frames carry bounded noise; optional distractor
//! spans carry intermediate amplitude. Everything is reproducible from the
//! seed, so grounding results, curation decisions, and QA oracle answers are
//! exactly repeatable across machines.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sha2::{Digest, Sha256};

use crate::curation::{GroundingSample, InformationVerifier, SegmentGrounder};
use crate::engine::Query;
use crate::error::{Error, Result};
use crate::intervals::TimeInterval;
use crate::model::FrameSequence;
use crate::qa::{AnswerOutcome, Answerer, QaContext};

/// Normalized score above which a frame counts as carrying signal for the
/// oracle hooks.
pub const HIGH_SIGNAL_THRESHOLD: f64 = 0.5;

// ---------------------------------------------------------------------------
// Text-derived embeddings
// ---------------------------------------------------------------------------

/// Deterministic unit vector for a text: the text's SHA-256 digest seeds a
/// generator that draws the vector's components. Identical text and
/// dimension always give the identical embedding, on any machine.
pub fn embedding_from_text(text: &str, dim: usize) -> Vec<f64> {
    let digest = Sha256::digest(text.as_bytes());
    let seed = u64::from_le_bytes(digest[..8].try_into().unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_unit_vector(&mut rng, dim)
}

/// Query embedding with answer options folded in by averaging the text and
/// option embeddings, then renormalizing.
pub fn query_embedding(text: &str, options: &[String], dim: usize) -> Vec<f64> {
    if options.is_empty() {
        return embedding_from_text(text, dim);
    }
    let mut sum = embedding_from_text(text, dim);
    for option in options {
        for (s, v) in sum.iter_mut().zip(embedding_from_text(option, dim)) {
            *s += v;
        }
    }
    normalize(&mut sum);
    sum
}

fn random_unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    normalize(&mut v);
    v
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        for x in v.iter_mut() {
            *x /= norm;
        }
    } else {
        v[0] = 1.0;
    }
}

// ---------------------------------------------------------------------------
// Single-video generation
// ---------------------------------------------------------------------------

/// Recipe for one synthetic video: one planted event, optional distractor
/// spans `(span, amplitude)`, and a noise floor.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticVideoSpec {
    pub video_id: String,
    pub duration_s: f64,
    pub fps: f64,
    pub dim: usize,
    pub group_size: usize,
    pub query_text: String,
    /// Answer options folded into the planted embedding, when present.
    pub options: Vec<String>,
    pub event: TimeInterval,
    pub signal_amplitude: f64,
    pub noise_amplitude: f64,
    pub distractors: Vec<(TimeInterval, f64)>,
    pub seed: u64,
}

/// Generates the frame features and the paired query. Event and distractor
/// membership is half-open on frame times: a frame at `t` carries the span's
/// amplitude iff `start <= t < end`.
pub fn generate_video(spec: &SyntheticVideoSpec) -> Result<(FrameSequence, Query)> {
    if spec.signal_amplitude <= spec.noise_amplitude {
        return Err(Error::UnlearnableCorpus {
            signal: spec.signal_amplitude,
            noise: spec.noise_amplitude,
        });
    }
    if spec.event.end_s() > spec.duration_s + 1e-9 {
        return Err(Error::IntervalOutsideVideo {
            start_s: spec.event.start_s(),
            end_s: spec.event.end_s(),
            duration_s: spec.duration_s,
        });
    }
    let n = (spec.duration_s * spec.fps).round() as usize;
    if n == 0 {
        return Err(Error::EmptyInput { what: "frames" });
    }

    let u = query_embedding(&spec.query_text, &spec.options, spec.dim);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let period = 1.0 / spec.fps;

    let frames: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let t = k as f64 * period;
            if spec.event.start_s() <= t && t < spec.event.end_s() {
                u.iter().map(|x| x * spec.signal_amplitude).collect()
            } else if let Some((_, amp)) = spec
                .distractors
                .iter()
                .find(|(span, _)| span.start_s() <= t && t < span.end_s())
            {
                u.iter().map(|x| x * amp).collect()
            } else if spec.noise_amplitude > 0.0 {
                let r = random_unit_vector(&mut rng, spec.dim);
                r.iter().map(|x| x * spec.noise_amplitude).collect()
            } else {
                vec![0.0; spec.dim]
            }
        })
        .collect();

    let video = FrameSequence::new(
        spec.video_id.clone(),
        spec.fps,
        0.0,
        frames,
        spec.group_size,
    )?;
    let query = Query::new(spec.query_text.clone(), u)?.with_options(spec.options.clone());
    Ok((video, query))
}

// ---------------------------------------------------------------------------
// Corpus generation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistractorConfig {
    pub count: usize,
    pub amplitude: f64,
    pub len_range_s: (f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusConfig {
    pub n_videos: usize,
    pub duration_s: f64,
    pub fps: f64,
    pub dim: usize,
    pub group_size: usize,
    pub signal_amplitude: f64,
    pub noise_amplitude: f64,
    /// Event lengths are drawn from this range, snapped to the frame grid.
    pub event_len_range_s: (f64, f64),
    pub distractors: Option<DistractorConfig>,
    pub seed: u64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            n_videos: 100,
            duration_s: 300.0,
            fps: 1.0,
            dim: 32,
            group_size: 1,
            signal_amplitude: 1.0,
            noise_amplitude: 0.0,
            event_len_range_s: (10.0, 30.0),
            distractors: None,
            seed: 0,
        }
    }
}

/// One corpus entry: the manifest-level sample, its frames and query, and
/// the distractor spans that were planted (test metadata, not part of the
/// sample).
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSample {
    pub sample_id: String,
    pub sample: GroundingSample,
    pub frames: FrameSequence,
    pub query: Query,
    pub distractors: Vec<TimeInterval>,
}

const TASK_TYPES: [&str; 12] = [
    "action_reasoning",
    "action_recognition",
    "attribute_perception",
    "counting",
    "information_synopsis",
    "object_reasoning",
    "object_recognition",
    "ocr_perception",
    "spatial_perception",
    "spatial_reasoning",
    "temporal_perception",
    "temporal_reasoning",
];

const VIDEO_CATEGORIES: [&str; 7] = [
    "documentary",
    "film",
    "gaming",
    "knowledge",
    "life_record",
    "news",
    "sports",
];

/// Cycled task-type label for synthetic sample `i`.
pub fn task_type_label(i: usize) -> String {
    TASK_TYPES[i % TASK_TYPES.len()].to_string()
}

/// Cycled video-category label for synthetic sample `i`.
pub fn video_category_label(i: usize) -> String {
    VIDEO_CATEGORIES[i % VIDEO_CATEGORIES.len()].to_string()
}

/// Generates a corpus of single-event videos. Events are placed uniformly on
/// the frame grid; distractor spans never overlap the event.
pub fn generate_corpus(config: &CorpusConfig) -> Result<Vec<SyntheticSample>> {
    if config.n_videos == 0 {
        return Err(Error::EmptyInput { what: "corpus" });
    }
    let mut master = ChaCha8Rng::seed_from_u64(config.seed);
    let period = 1.0 / config.fps;
    let n_frames = (config.duration_s * config.fps).round() as usize;

    let min_len = ((config.event_len_range_s.0 * config.fps).ceil() as usize).max(1);
    let max_len = ((config.event_len_range_s.1 * config.fps).floor() as usize).max(min_len);

    (0..config.n_videos)
        .map(|i| {
            let video_seed: u64 = master.gen();
            let mut rng = ChaCha8Rng::seed_from_u64(video_seed);

            let len = rng.gen_range(min_len..=max_len.min(n_frames));
            let start = rng.gen_range(0..=n_frames - len);
            let event = TimeInterval::new(
                start as f64 * period,
                (start + len) as f64 * period,
            )?;

            let mut distractors = Vec::new();
            if let Some(d) = &config.distractors {
                let d_min = ((d.len_range_s.0 * config.fps).ceil() as usize).max(1);
                let d_max = ((d.len_range_s.1 * config.fps).floor() as usize).max(d_min);
                for _ in 0..d.count {
                    for _attempt in 0..50 {
                        let dlen = rng.gen_range(d_min..=d_max.min(n_frames));
                        let dstart = rng.gen_range(0..=n_frames - dlen);
                        let span = TimeInterval::new(
                            dstart as f64 * period,
                            (dstart + dlen) as f64 * period,
                        )?;
                        if !span.overlaps(&event)
                            && !distractors.iter().any(|(s, _): &(TimeInterval, f64)| {
                                s.overlaps(&span)
                            })
                        {
                            distractors.push((span, d.amplitude));
                            break;
                        }
                    }
                }
            }

            let query_text = format!("synthetic task {i:05}: locate the supporting segment");
            let spec = SyntheticVideoSpec {
                video_id: format!("v{i:05}"),
                duration_s: config.duration_s,
                fps: config.fps,
                dim: config.dim,
                group_size: config.group_size,
                query_text,
                options: Vec::new(),
                event,
                signal_amplitude: config.signal_amplitude,
                noise_amplitude: config.noise_amplitude,
                distractors: distractors.clone(),
                seed: video_seed,
            };
            let (frames, query) = generate_video(&spec)?;
            let sample = GroundingSample::new(
                spec.video_id.clone(),
                config.duration_s,
                spec.query_text.clone(),
                None,
                event,
                TASK_TYPES[i % TASK_TYPES.len()],
                VIDEO_CATEGORIES[i % VIDEO_CATEGORIES.len()],
            )?;
            Ok(SyntheticSample {
                sample_id: format!("s{i:05}"),
                sample,
                frames,
                query,
                distractors: distractors.into_iter().map(|(s, _)| s).collect(),
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Oracle hooks
// ---------------------------------------------------------------------------

/// Per-frame inner products of the query embedding against the frame
/// features.
pub fn frame_scores(query_emb: &[f64], frames: &FrameSequence) -> Result<Vec<f64>> {
    if query_emb.len() != frames.dim() {
        return Err(Error::DimensionMismatch {
            what: "query embedding",
            expected: frames.dim(),
            got: query_emb.len(),
        });
    }
    Ok(frames
        .frames()
        .iter()
        .map(|f| f.iter().zip(query_emb).map(|(x, q)| x * q).sum())
        .collect())
}

/// Indices of frames whose normalized score reaches the high-signal
/// threshold. Empty when the video carries no signal (all scores equal).
pub fn high_signal_frames(query_emb: &[f64], frames: &FrameSequence) -> Result<Vec<usize>> {
    let scores = frame_scores(query_emb, frames)?;
    let peak = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = scores.iter().cloned().fold(f64::INFINITY, f64::min);
    if peak == min {
        return Ok(Vec::new());
    }
    let threshold = min + HIGH_SIGNAL_THRESHOLD * (peak - min);
    Ok(scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| s >= threshold)
        .map(|(i, _)| i)
        .collect())
}

/// Shipped default verifier: a sample is answerable iff at least one
/// high-signal frame lies inside its target interval.
#[derive(Debug, Default, Clone, Copy)]
pub struct SyntheticVerifier;

impl InformationVerifier for SyntheticVerifier {
    fn answerable(&self, sample: &GroundingSample, frames: &FrameSequence) -> Result<bool> {
        let emb = query_embedding(
            &sample.query,
            sample.options.as_deref().unwrap_or(&[]),
            frames.dim(),
        );
        let high = high_signal_frames(&emb, frames)?;
        Ok(high
            .iter()
            .any(|&i| sample.gt.contains_time(frames.frame_times()[i])))
    }
}

/// Whether a segment holds a strict majority of the frames whose score
/// against `emb` clears the high-signal threshold. At most one segment can
/// hold a strict majority, so a signal that straddles a segment boundary
/// 50/50 counts as ambiguous.
pub fn segment_holds_signal_majority(
    emb: &[f64],
    frames: &FrameSequence,
    segment: &TimeInterval,
) -> Result<bool> {
    let high = high_signal_frames(emb, frames)?;
    if high.is_empty() {
        return Ok(false);
    }
    let inside = high
        .iter()
        .filter(|&&i| {
            let t = frames.frame_times()[i];
            segment.start_s() <= t && t < segment.end_s()
        })
        .count();
    Ok(2 * inside > high.len())
}

/// Shipped default grounder for the uniqueness filter, keyed on the query
/// text alone.
#[derive(Debug, Default, Clone, Copy)]
pub struct SyntheticSegmentGrounder;

impl SegmentGrounder for SyntheticSegmentGrounder {
    fn segment_valid(
        &self,
        query: &str,
        frames: &FrameSequence,
        segment: &TimeInterval,
    ) -> Result<bool> {
        let emb = embedding_from_text(query, frames.dim());
        segment_holds_signal_majority(&emb, frames, segment)
    }
}

/// Shipped default answerer: correct iff any sampled frame time maps to a
/// high-signal frame; unanswerable when the video carries no signal at all.
#[derive(Debug, Default, Clone, Copy)]
pub struct SyntheticAnswerer;

impl Answerer for SyntheticAnswerer {
    fn answer(&self, ctx: &QaContext<'_>, frame_times: &[f64]) -> Result<AnswerOutcome> {
        let frames = ctx.frames;
        let emb = query_embedding(ctx.question, ctx.options, frames.dim());
        let high = high_signal_frames(&emb, frames)?;
        if high.is_empty() {
            return Ok(AnswerOutcome::Unanswerable);
        }
        let high_set: std::collections::BTreeSet<usize> = high.into_iter().collect();
        let hit = frame_times.iter().any(|&t| {
            let idx = covering_frame(frames, t);
            high_set.contains(&idx)
        });
        Ok(if hit {
            AnswerOutcome::Correct
        } else {
            AnswerOutcome::Incorrect
        })
    }
}

/// Index of the frame whose period covers time `t`.
pub fn covering_frame(frames: &FrameSequence, t: f64) -> usize {
    let rel = (t - frames.start_s()) * frames.fps();
    (rel.floor() as i64).clamp(0, frames.len() as i64 - 1) as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{ground_progressive, EngineConfig, InnerProductScorer, Scorer};
    use crate::intervals::iou;
    use crate::model::{build_sequence, pool_cache, prefill, PrefillParams};

    #[test]
    fn embeddings_are_deterministic_and_unit() {
        let a = embedding_from_text("some task", 32);
        let b = embedding_from_text("some task", 32);
        assert_eq!(a, b);
        let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
        assert_ne!(a, embedding_from_text("another task", 32));
    }

    #[test]
    fn option_averaging_changes_embedding() {
        let plain = query_embedding("q", &[], 16);
        let with_opts = query_embedding("q", &["a".to_string(), "b".to_string()], 16);
        assert_ne!(plain, with_opts);
        let norm: f64 = with_opts.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unlearnable_configuration() {
        let spec = SyntheticVideoSpec {
            video_id: "v".to_string(),
            duration_s: 60.0,
            fps: 1.0,
            dim: 8,
            group_size: 1,
            query_text: "q".to_string(),
            options: vec![],
            event: TimeInterval::new(10.0, 20.0).unwrap(),
            signal_amplitude: 0.5,
            noise_amplitude: 0.5,
            distractors: vec![],
            seed: 1,
        };
        assert!(matches!(
            generate_video(&spec),
            Err(Error::UnlearnableCorpus { .. })
        ));
    }

    #[test]
    fn noiseless_recovery_within_one_period_per_endpoint() {
        let config = CorpusConfig {
            n_videos: 20,
            seed: 11,
            ..CorpusConfig::default()
        };
        let corpus = generate_corpus(&config).unwrap();
        let engine = EngineConfig::default();
        for item in &corpus {
            let result =
                ground_progressive(&item.frames, &item.query, &InnerProductScorer, &engine)
                    .unwrap();
            let gt = item.sample.gt;
            let period = item.frames.frame_period_s();
            assert!(
                (result.interval.start_s() - gt.start_s()).abs() <= period,
                "{}: start {} vs {}",
                item.sample_id,
                result.interval.start_s(),
                gt.start_s()
            );
            assert!(
                (result.interval.end_s() - gt.end_s()).abs() <= period,
                "{}: end {} vs {}",
                item.sample_id,
                result.interval.end_s(),
                gt.end_s()
            );
            assert!(iou(&result.interval, &gt).value() >= 0.7);
        }
    }

    #[test]
    fn pooled_event_supergroup_scores_coverage_fraction() {
        // event covering 2 of 4 frames in a super-group scores a * 2/4
        let spec = SyntheticVideoSpec {
            video_id: "v".to_string(),
            duration_s: 16.0,
            fps: 1.0,
            dim: 8,
            group_size: 1,
            query_text: "q".to_string(),
            options: vec![],
            event: TimeInterval::new(4.0, 6.0).unwrap(),
            signal_amplitude: 1.0,
            noise_amplitude: 0.0,
            distractors: vec![],
            seed: 3,
        };
        let (frames, query) = generate_video(&spec).unwrap();
        let seq = build_sequence(&frames, &query.embedding).unwrap();
        let fine = prefill(&seq, &PrefillParams::default()).unwrap();
        let factor = 4;
        let coarse = pool_cache(&fine, factor).unwrap();
        let scores = InnerProductScorer.score_visual(&query, &coarse).unwrap();
        // super-group 1 covers frames 4..8; frames 4 and 5 carry the event
        let expected = 1.0 * 2.0 / factor as f64;
        assert!((scores[1] - expected).abs() <= 1e-9, "{scores:?}");
        assert!(scores[0].abs() <= 1e-12);
    }

    #[test]
    fn corpus_is_identical_across_runs() {
        let config = CorpusConfig {
            n_videos: 5,
            noise_amplitude: 0.3,
            distractors: Some(DistractorConfig {
                count: 2,
                amplitude: 0.6,
                len_range_s: (5.0, 15.0),
            }),
            seed: 21,
            ..CorpusConfig::default()
        };
        let a = generate_corpus(&config).unwrap();
        let b = generate_corpus(&config).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.sample_id, y.sample_id);
            assert_eq!(x.sample, y.sample);
            assert_eq!(x.frames, y.frames);
            assert_eq!(x.query, y.query);
            assert_eq!(x.distractors, y.distractors);
        }
    }

    #[test]
    fn distractors_never_overlap_event() {
        let config = CorpusConfig {
            n_videos: 30,
            distractors: Some(DistractorConfig {
                count: 3,
                amplitude: 0.6,
                len_range_s: (10.0, 30.0),
            }),
            seed: 5,
            ..CorpusConfig::default()
        };
        for item in generate_corpus(&config).unwrap() {
            for d in &item.distractors {
                assert!(!d.overlaps(&item.sample.gt), "{}", item.sample_id);
            }
        }
    }

    #[test]
    fn verifier_and_grounder_oracles() {
        let config = CorpusConfig {
            n_videos: 4,
            seed: 9,
            ..CorpusConfig::default()
        };
        let corpus = generate_corpus(&config).unwrap();
        for item in &corpus {
            // signal inside gt: answerable
            assert!(SyntheticVerifier
                .answerable(&item.sample, &item.frames)
                .unwrap());

            // a sample whose gt is disjoint from the signal: not answerable
            let decoy_gt = if item.sample.gt.start_s() > 50.0 {
                TimeInterval::new(0.0, 5.0).unwrap()
            } else {
                TimeInterval::new(250.0, 255.0).unwrap()
            };
            let decoy = GroundingSample::new(
                item.sample.video_id.clone(),
                item.sample.duration_s,
                item.sample.query.clone(),
                None,
                decoy_gt,
                item.sample.task_type.clone(),
                item.sample.video_category.clone(),
            )
            .unwrap();
            assert!(!SyntheticVerifier.answerable(&decoy, &item.frames).unwrap());

            // uniqueness: exactly one 30s segment holds the signal majority
            let segments =
                crate::curation::segment_timeline(item.sample.duration_s, 30.0).unwrap();
            let valid = segments
                .iter()
                .filter(|seg| {
                    SyntheticSegmentGrounder
                        .segment_valid(&item.sample.query, &item.frames, seg)
                        .unwrap()
                })
                .count();
            assert!(valid <= 1);
        }
    }

    #[test]
    fn qa_oracle_grounded_beats_uniform_on_short_events() {
        use crate::qa::{qa_compare, uniform_frames, QaCase};

        // events shorter than duration/32 placed between the uniform
        // baseline's sample points: the baseline misses them, grounding
        // does not
        let duration = 320.0;
        let budget = 32;
        let baseline = uniform_frames(&TimeInterval::new(0.0, duration).unwrap(), budget).unwrap();

        let mut cases = Vec::new();
        for i in 0..8 {
            // place a 5s event straddling a gap between consecutive
            // baseline samples (gap width duration/32 = 10s)
            let gap_index = 3 + i * 3;
            let gap_start = baseline.frame_times[gap_index];
            let event_start = (gap_start + 1.0).floor();
            let event = TimeInterval::new(event_start, event_start + 5.0).unwrap();
            let question = format!("adversarial case {i}");
            let spec = SyntheticVideoSpec {
                video_id: format!("adv{i}"),
                duration_s: duration,
                fps: 1.0,
                dim: 16,
                group_size: 1,
                query_text: question.clone(),
                options: vec![],
                event,
                signal_amplitude: 1.0,
                noise_amplitude: 0.0,
                distractors: vec![],
                seed: i as u64,
            };
            let (frames, _) = generate_video(&spec).unwrap();
            cases.push(QaCase {
                sample_id: format!("adv{i}"),
                question,
                options: vec![],
                duration_s: duration,
                grounded: event,
                frames,
            });
        }
        let report = qa_compare(&cases, &SyntheticAnswerer, budget, 32.0).unwrap();
        assert_eq!(report.grounded_accuracy, 1.0);
        assert!(
            report.uniform_accuracy < report.grounded_accuracy,
            "uniform {} vs grounded {}",
            report.uniform_accuracy,
            report.grounded_accuracy
        );
    }

    #[test]
    fn qa_oracle_flags_event_free_samples() {
        use crate::qa::{qa_compare, QaCase};

        let frames = FrameSequence::new(
            "empty",
            1.0,
            0.0,
            vec![vec![0.0; 8]; 64],
            1,
        )
        .unwrap();
        let cases = vec![QaCase {
            sample_id: "empty".to_string(),
            question: "anything at all?".to_string(),
            options: vec![],
            duration_s: 64.0,
            grounded: TimeInterval::new(10.0, 20.0).unwrap(),
            frames,
        }];
        let report = qa_compare(&cases, &SyntheticAnswerer, 32, 32.0).unwrap();
        assert_eq!(report.unanswerable, 1);
        assert_eq!(report.answered, 0);
    }

    #[test]
    fn covering_frame_maps_times() {
        let frames = FrameSequence::new(
            "v",
            1.0,
            0.0,
            (0..10).map(|i| vec![i as f64]).collect(),
            1,
        )
        .unwrap();
        assert_eq!(covering_frame(&frames, 0.0), 0);
        assert_eq!(covering_frame(&frames, 0.99), 0);
        assert_eq!(covering_frame(&frames, 5.5), 5);
        assert_eq!(covering_frame(&frames, 99.0), 9);
    }
}
