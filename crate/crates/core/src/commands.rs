//! Command drivers behind the CLI: corpus generation, curation,
//! augmentation, grounding, and evaluation.
//!
//! Every driver embeds the run configuration into its outputs and keeps
//! per-sample work order-independent, so re-running a command with the same
//! inputs and seed reproduces its output files byte for byte.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::augment::{self, AugmentationKind, AugmentationSampler, CutOutcome};
use crate::config::RunConfig;
use crate::curation::{
    concat_clips, expert_consensus, pack_toward_target, segment_timeline, uniqueness_filter,
    validate_information, AnnotatedClip, ClipRecord, ConsensusOutcome, DropReason, ExpertVote,
    FilterDecision, GroundingSample, PipelineReport, QaAnnotation,
};
use crate::engine::{ground_progressive, ground_single_stage, GroundingMode, Query, ScorerRegistry};
use crate::error::{Error, Result};
use crate::evaluation::{
    evaluate, gap_reference_divergence, position_dispersion, position_gap, EvalReport,
    LabeledSample,
};
use crate::features::{read_features, write_features};
use crate::intervals::TimeInterval;
use crate::manifest::{
    read_jsonl, write_jsonl, ClipManifestRecord, DatasetRecord, FileHeader, PredictionRecord,
    QuarantineRecord, RecallFixtureRecord, TraceCounts,
};
use crate::model::FrameSequence;
use crate::synthetic::{generate_video, query_embedding, SyntheticVerifier, SyntheticVideoSpec};

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E3779B97F4A7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D049BB133111EB);
    x ^ (x >> 31)
}

fn resolve(base: &Path, relative: &str) -> PathBuf {
    base.parent().unwrap_or(Path::new(".")).join(relative)
}

fn write_pretty_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Runs `f` inside a rayon pool sized by the config's worker count.
fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if workers == 0 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Hook(e.to_string()))?;
    Ok(pool.install(f))
}

// ---------------------------------------------------------------------------
// gen-clips
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct GenClipsArgs {
    pub out_dir: PathBuf,
    pub n_clips: usize,
    pub clip_len_range_s: (f64, f64),
    pub event_len_range_s: (f64, f64),
    pub dim: usize,
    pub noise_amplitude: f64,
    pub config: RunConfig,
}

impl GenClipsArgs {
    pub fn new(out_dir: PathBuf, n_clips: usize, config: RunConfig) -> Self {
        Self {
            out_dir,
            n_clips,
            clip_len_range_s: (50.0, 150.0),
            event_len_range_s: (5.0, 20.0),
            dim: 32,
            noise_amplitude: 0.1,
            config,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GenClipsOutput {
    pub manifest_path: PathBuf,
    pub n_clips: usize,
}

/// Generates a clip corpus with planted events: per clip a feature file, a
/// caption or QA annotation, and (usually) three expert votes jittered
/// around the true interval. A twentieth of the clips get a deliberately
/// disagreeing vote and another twentieth get no votes at all, so the
/// curation drop paths stay exercised.
pub fn cmd_gen_clips(args: &GenClipsArgs) -> Result<GenClipsOutput> {
    if args.n_clips == 0 {
        return Err(Error::EmptyInput { what: "clips" });
    }
    let clips_dir = args.out_dir.join("clips");
    fs::create_dir_all(&clips_dir)?;

    let fps = args.config.fps;
    let period = 1.0 / fps;
    let mut records = Vec::with_capacity(args.n_clips);

    for i in 0..args.n_clips {
        let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(args.config.seed ^ i as u64));
        let min_frames = (args.clip_len_range_s.0 * fps).ceil() as usize;
        let max_frames = (args.clip_len_range_s.1 * fps).floor() as usize;
        let n_frames = rng.gen_range(min_frames..=max_frames);
        let duration_s = n_frames as f64 * period;

        let ev_min = ((args.event_len_range_s.0 * fps).ceil() as usize).max(1);
        let ev_max = ((args.event_len_range_s.1 * fps).floor() as usize).min(n_frames);
        let ev_len = rng.gen_range(ev_min..=ev_max);
        let ev_start = rng.gen_range(0..=n_frames - ev_len);
        let event = TimeInterval::new(
            ev_start as f64 * period,
            (ev_start + ev_len) as f64 * period,
        )?;

        let clip_id = format!("c{i:05}");
        let caption = format!("clip {i:05} shows the annotated activity");
        // option texts are clip-unique so folded embeddings stay
        // near-orthogonal across clips
        let qa = (i % 2 == 0).then(|| QaAnnotation {
            question: format!("what happens in clip {i:05}?"),
            answer: format!("the activity annotated in clip {i:05}"),
            options: Some(vec![
                format!("the activity annotated in clip {i:05}"),
                format!("an unrelated activity in clip {i:05}"),
            ]),
        });
        let query = qa
            .as_ref()
            .map(|q| q.question.clone())
            .unwrap_or_else(|| caption.clone());
        let options: Vec<String> = qa
            .as_ref()
            .and_then(|q| q.options.clone())
            .unwrap_or_default();

        let spec = SyntheticVideoSpec {
            video_id: clip_id.clone(),
            duration_s,
            fps,
            dim: args.dim,
            group_size: args.config.group_size,
            query_text: query.clone(),
            options: options.clone(),
            event,
            signal_amplitude: 1.0,
            noise_amplitude: args.noise_amplitude,
            distractors: vec![],
            seed: splitmix64(args.config.seed ^ (0x10_000 + i as u64)),
        };
        let (frames, _) = generate_video(&spec)?;
        let feature_rel = format!("clips/{clip_id}.bin");
        write_features(&args.out_dir.join(&feature_rel), frames.frames())?;

        // votes: jitter within 10% of the event length per endpoint
        let votes = match i % 20 {
            7 => vec![
                ExpertVote {
                    expert_id: "expert-a".to_string(),
                    interval: event,
                },
                ExpertVote {
                    expert_id: "expert-b".to_string(),
                    // deliberate disagreement: a disjoint guess
                    interval: if event.end_s() + 5.0 < duration_s {
                        TimeInterval::new(event.end_s() + 1.0, event.end_s() + 4.0)?
                    } else {
                        TimeInterval::new(0.0, (event.start_s() - 1.0).max(0.5))?
                    },
                },
            ],
            13 => vec![],
            _ => {
                let jitter = 0.1 * event.duration_s();
                (0..3)
                    .map(|e| {
                        let ds = rng.gen_range(-jitter..=jitter);
                        let de = rng.gen_range(-jitter..=jitter);
                        let start = (event.start_s() + ds).max(0.0);
                        let end = (event.end_s() + de).min(duration_s).max(start + period);
                        Ok(ExpertVote {
                            expert_id: format!("expert-{e}"),
                            interval: TimeInterval::new(start, end)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };

        records.push(ClipManifestRecord {
            clip_id,
            duration_s,
            caption,
            question: qa.as_ref().map(|q| q.question.clone()),
            answer: qa.as_ref().map(|q| q.answer.clone()),
            options: qa.as_ref().and_then(|q| q.options.clone()),
            source_tag: "synthetic".to_string(),
            feature_path: feature_rel,
            gt: Some(event),
            votes,
            task_type: crate::synthetic::task_type_label(i),
            video_category: crate::synthetic::video_category_label(i),
        });
    }

    let manifest_path = args.out_dir.join("clips.jsonl");
    write_jsonl(
        &manifest_path,
        &FileHeader::new("gen-clips", &args.config),
        &records,
    )?;
    Ok(GenClipsOutput {
        manifest_path,
        n_clips: args.n_clips,
    })
}

// ---------------------------------------------------------------------------
// curate
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct CurateArgs {
    pub clips_manifest: PathBuf,
    pub out_dir: PathBuf,
    pub target_duration_s: f64,
    pub segment_len_s: f64,
    pub bin_cap: Option<usize>,
    pub config: RunConfig,
}

impl CurateArgs {
    pub fn new(clips_manifest: PathBuf, out_dir: PathBuf, config: RunConfig) -> Self {
        Self {
            clips_manifest,
            out_dir,
            target_duration_s: crate::curation::DEFAULT_TARGET_DURATION_S,
            segment_len_s: crate::curation::DEFAULT_SEGMENT_LEN_S,
            bin_cap: None,
            config,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurationReport {
    /// Clip-level accounting: consensus resolution and information
    /// validation.
    pub clips: PipelineReport,
    /// Sample-level accounting on the concatenated videos: uniqueness
    /// filtering.
    pub samples: PipelineReport,
    /// Samples removed by bin balancing (not drops; balancing is a
    /// deliberate subsample).
    pub balance_removed: usize,
    pub long_videos: usize,
    pub mean_long_video_duration_s: f64,
}

#[derive(Debug, Clone)]
pub struct CurateOutput {
    pub dataset_path: PathBuf,
    pub report_path: PathBuf,
    pub report: CurationReport,
}

struct ResolvedClip {
    record: ClipManifestRecord,
    gt: TimeInterval,
    frames: FrameSequence,
}

/// Full curation pipeline: consensus, information validation, greedy packing
/// into long videos with timestamp remapping, uniqueness filtering, and
/// optional bin balancing.
pub fn cmd_curate(args: &CurateArgs) -> Result<CurateOutput> {
    let (_, clip_records): (_, Vec<ClipManifestRecord>) = read_jsonl(&args.clips_manifest)?;
    if clip_records.is_empty() {
        return Err(Error::EmptyInput { what: "clip manifest" });
    }
    fs::create_dir_all(args.out_dir.join("features"))?;

    let fps = args.config.fps;
    let mut clip_report = PipelineReport {
        input: clip_records.len(),
        ..Default::default()
    };
    let verifier = SyntheticVerifier;
    let mut resolved: Vec<ResolvedClip> = Vec::new();

    for record in clip_records {
        let decision = resolve_clip(&args.clips_manifest, &record, fps, &verifier);
        match decision {
            Ok(Ok(clip)) => {
                clip_report.record(&FilterDecision::Keep);
                resolved.push(clip);
            }
            Ok(Err(reason)) => clip_report.record(&FilterDecision::Drop(reason)),
            Err(e) => clip_report.record(&FilterDecision::Quarantine(e.to_string())),
        }
    }

    // pack the survivors into long videos
    let durations: Vec<f64> = resolved.iter().map(|c| c.record.duration_s).collect();
    let groups = pack_toward_target(&durations, args.target_duration_s);

    let mut sample_report = PipelineReport::default();
    let mut dataset: Vec<DatasetRecord> = Vec::new();
    let mut long_durations = Vec::new();
    let mut sample_counter = 0usize;

    for (g, group) in groups.iter().enumerate() {
        let members: Vec<&ResolvedClip> = group.iter().map(|&i| &resolved[i]).collect();
        let video_id = format!("long{g:04}");

        let annotated: Vec<AnnotatedClip> = members
            .iter()
            .map(|c| AnnotatedClip {
                clip: ClipRecord {
                    clip_id: c.record.clip_id.clone(),
                    duration_s: c.record.duration_s,
                    caption: c.record.caption.clone(),
                    qa: c.record.question.as_ref().map(|q| QaAnnotation {
                        question: q.clone(),
                        answer: c.record.answer.clone().unwrap_or_default(),
                        options: c.record.options.clone(),
                    }),
                    source_tag: c.record.source_tag.clone(),
                },
                query: c
                    .record
                    .question
                    .clone()
                    .unwrap_or_else(|| c.record.caption.clone()),
                options: c.record.options.clone(),
                interval: c.gt,
                task_type: c.record.task_type.clone(),
                video_category: c.record.video_category.clone(),
            })
            .collect();
        let (long_manifest, samples) = concat_clips(&video_id, &annotated)?;
        long_durations.push(long_manifest.duration_s);

        let mut rows: Vec<Vec<f64>> = Vec::new();
        for c in &members {
            rows.extend(c.frames.frames().iter().cloned());
        }
        let feature_rel = format!("features/{video_id}.bin");
        write_features(&args.out_dir.join(&feature_rel), &rows)?;
        let long_frames =
            FrameSequence::new(video_id.clone(), fps, 0.0, rows, args.config.group_size)?;
        let segments = segment_timeline(long_manifest.duration_s, args.segment_len_s)?;

        for sample in samples {
            sample_report.input += 1;
            // options fold into the validity embedding exactly as they did
            // at grounding time
            let emb = query_embedding(
                &sample.query,
                sample.options.as_deref().unwrap_or(&[]),
                long_frames.dim(),
            );
            let decision = uniqueness_filter(&segments, &sample.query, |_, segment| {
                crate::synthetic::segment_holds_signal_majority(&emb, &long_frames, segment)
            });
            sample_report.record(&decision);
            if decision == FilterDecision::Keep {
                dataset.push(DatasetRecord {
                    sample_id: format!("s{sample_counter:05}"),
                    video_id: video_id.clone(),
                    duration_s: sample.duration_s,
                    fps,
                    t0_s: 0.0,
                    feature_path: feature_rel.clone(),
                    query: sample.query.clone(),
                    options: sample.options.clone(),
                    gt: sample.gt,
                    task_type: sample.task_type.clone(),
                    video_category: sample.video_category.clone(),
                    augmentation: None,
                });
                sample_counter += 1;
            }
        }
    }

    // optional bin balancing over the kept samples
    let mut balance_removed = 0;
    if let Some(cap) = args.bin_cap {
        let samples: Vec<GroundingSample> = dataset
            .iter()
            .map(|r| {
                GroundingSample::new(
                    r.video_id.clone(),
                    r.duration_s,
                    r.query.clone(),
                    r.options.clone(),
                    r.gt,
                    r.task_type.clone(),
                    r.video_category.clone(),
                )
            })
            .collect::<Result<_>>()?;
        let kept_indices = crate::curation::balance_bins_indices(
            &samples,
            cap,
            args.config.duration_buckets,
            args.config.seed,
        )?;
        let keep: std::collections::BTreeSet<usize> = kept_indices.into_iter().collect();
        let before = dataset.len();
        let mut index = 0;
        dataset.retain(|_| {
            let kept = keep.contains(&index);
            index += 1;
            kept
        });
        balance_removed = before - dataset.len();
    }

    let report = CurationReport {
        clips: clip_report,
        samples: sample_report,
        balance_removed,
        long_videos: groups.len(),
        mean_long_video_duration_s: if long_durations.is_empty() {
            0.0
        } else {
            long_durations.iter().sum::<f64>() / long_durations.len() as f64
        },
    };

    let dataset_path = args.out_dir.join("dataset.jsonl");
    write_jsonl(
        &dataset_path,
        &FileHeader::new("curate", &args.config),
        &dataset,
    )?;
    let report_path = args.out_dir.join("curation_report.json");
    write_pretty_json(&report_path, &report)?;

    Ok(CurateOutput {
        dataset_path,
        report_path,
        report,
    })
}

/// Clip-level resolution: consensus (or direct annotation), frame loading,
/// and information validation. `Ok(Err(reason))` is a drop; `Err` is a
/// quarantine.
fn resolve_clip(
    manifest_path: &Path,
    record: &ClipManifestRecord,
    fps: f64,
    verifier: &SyntheticVerifier,
) -> Result<std::result::Result<ResolvedClip, DropReason>> {
    let gt = if record.votes.len() >= 2 {
        match expert_consensus(&record.votes, crate::curation::DEFAULT_CONSENSUS_MIN_IOU)? {
            ConsensusOutcome::Retained { canonical, .. } => {
                let bounds = TimeInterval::new(0.0, record.duration_s)?;
                match canonical.clipped_to(&bounds) {
                    Some(iv) => iv,
                    None => return Ok(Err(DropReason::ConsensusRejected)),
                }
            }
            ConsensusOutcome::Rejected { .. } => {
                return Ok(Err(DropReason::ConsensusRejected));
            }
        }
    } else {
        match record.gt {
            Some(gt) => gt,
            None => return Ok(Err(DropReason::NoAnnotation)),
        }
    };

    let rows = read_features(&resolve(manifest_path, &record.feature_path))?;
    let expected_frames = (record.duration_s * fps).round() as usize;
    if rows.len() != expected_frames {
        return Err(Error::Features {
            path: record.feature_path.clone(),
            reason: format!(
                "clip {} has {} frames but duration {}s at {}fps implies {}",
                record.clip_id,
                rows.len(),
                record.duration_s,
                fps,
                expected_frames
            ),
        });
    }
    let frames = FrameSequence::new(record.clip_id.clone(), fps, 0.0, rows, 1)?;

    let query = record
        .question
        .clone()
        .unwrap_or_else(|| record.caption.clone());
    let sample = GroundingSample::new(
        record.clip_id.clone(),
        record.duration_s,
        query,
        record.options.clone(),
        gt,
        record.task_type.clone(),
        record.video_category.clone(),
    )?;
    match validate_information(&sample, &frames, verifier) {
        FilterDecision::Keep => Ok(Ok(ResolvedClip {
            record: record.clone(),
            gt,
            frames,
        })),
        FilterDecision::Drop(reason) => Ok(Err(reason)),
        FilterDecision::Quarantine(msg) => Err(Error::Hook(msg)),
    }
}

// ---------------------------------------------------------------------------
// augment
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct AugmentArgs {
    pub manifest: PathBuf,
    pub out_dir: PathBuf,
    pub kind: AugmentationKind,
    pub shift_range_s: (f64, f64),
    pub cut_span_range_s: (f64, f64),
    pub scale_range: (f64, f64),
    pub config: RunConfig,
}

impl AugmentArgs {
    pub fn new(manifest: PathBuf, out_dir: PathBuf, kind: AugmentationKind, config: RunConfig) -> Self {
        Self {
            manifest,
            out_dir,
            kind,
            shift_range_s: augment::SHIFT_RANGE_S,
            cut_span_range_s: augment::CUT_SPAN_RANGE_S,
            scale_range: augment::SCALE_RANGE,
            config,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AugmentOutput {
    pub manifest_path: PathBuf,
    pub report_path: PathBuf,
    pub report: PipelineReport,
}

/// Applies one augmentation kind to every sample with per-sample seeded
/// draws. Feature files are rewritten into the output directory (sliced for
/// cuts, verbatim otherwise) so the augmented dataset is self-contained.
pub fn cmd_augment(args: &AugmentArgs) -> Result<AugmentOutput> {
    let (_, records): (_, Vec<DatasetRecord>) = read_jsonl(&args.manifest)?;
    if records.is_empty() {
        return Err(Error::EmptyInput { what: "dataset manifest" });
    }
    fs::create_dir_all(args.out_dir.join("features"))?;

    let sampler = AugmentationSampler {
        kind: args.kind,
        shift_range_s: args.shift_range_s,
        cut_span_range_s: args.cut_span_range_s,
        scale_range: args.scale_range,
        seed: args.config.seed,
    };
    let mut report = PipelineReport {
        input: records.len(),
        ..Default::default()
    };
    let mut out_records = Vec::new();

    for (index, record) in records.iter().enumerate() {
        let step = || -> Result<Option<DatasetRecord>> {
            let rows = read_features(&resolve(&args.manifest, &record.feature_path))?;
            let frames = FrameSequence::new(
                record.video_id.clone(),
                record.fps,
                record.t0_s,
                rows,
                args.config.group_size,
            )?;
            let sample = GroundingSample::new(
                record.video_id.clone(),
                record.duration_s,
                record.query.clone(),
                record.options.clone(),
                record.gt,
                record.task_type.clone(),
                record.video_category.clone(),
            )?;
            let drawn = sampler.draw(index as u64, 0.0, record.duration_s)?;
            match augment::apply(&drawn, &sample, &frames)? {
                CutOutcome::Kept {
                    sample: new_sample,
                    frames: new_frames,
                    ..
                } => {
                    let feature_rel = format!("features/{}.bin", record.sample_id);
                    write_features(&args.out_dir.join(&feature_rel), new_frames.frames())?;
                    Ok(Some(DatasetRecord {
                        sample_id: record.sample_id.clone(),
                        video_id: record.video_id.clone(),
                        duration_s: new_sample.duration_s,
                        fps: new_frames.fps(),
                        t0_s: new_frames.start_s(),
                        feature_path: feature_rel,
                        query: record.query.clone(),
                        options: record.options.clone(),
                        gt: new_sample.gt,
                        task_type: record.task_type.clone(),
                        video_category: record.video_category.clone(),
                        augmentation: Some(drawn),
                    }))
                }
                CutOutcome::Discarded => Ok(None),
            }
        };
        match step() {
            Ok(Some(new_record)) => {
                report.record(&FilterDecision::Keep);
                out_records.push(new_record);
            }
            Ok(None) => report.record(&FilterDecision::Drop(DropReason::GtDestroyed)),
            Err(e) => report.record(&FilterDecision::Quarantine(e.to_string())),
        }
    }

    let manifest_path = args.out_dir.join("augmented.jsonl");
    write_jsonl(
        &manifest_path,
        &FileHeader::new("augment", &args.config),
        &out_records,
    )?;
    let report_path = args.out_dir.join("augment_report.json");
    write_pretty_json(&report_path, &report)?;
    Ok(AugmentOutput {
        manifest_path,
        report_path,
        report,
    })
}

// ---------------------------------------------------------------------------
// ground
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct GroundArgs {
    pub manifest: PathBuf,
    pub out: PathBuf,
    pub scorer: String,
    pub mode: GroundingMode,
    /// Fold answer options into the query embedding.
    pub use_options: bool,
    pub config: RunConfig,
}

#[derive(Debug, Clone)]
pub struct GroundOutput {
    pub predictions_path: PathBuf,
    pub quarantine_path: Option<PathBuf>,
    pub n_predicted: usize,
    pub n_quarantined: usize,
}

/// Grounds every sample of a dataset manifest with the named scorer
/// backend. Per-sample failures (missing feature files, malformed rows)
/// land in a side quarantine file; the command fails only when nothing at
/// all could be grounded.
pub fn cmd_ground(args: &GroundArgs) -> Result<GroundOutput> {
    let (_, records): (_, Vec<DatasetRecord>) = read_jsonl(&args.manifest)?;
    if records.is_empty() {
        return Err(Error::EmptyInput { what: "dataset manifest" });
    }
    let registry = ScorerRegistry::with_defaults();
    let scorer = registry.get(&args.scorer)?;
    let engine_config = args.config.engine_config();

    let results: Vec<std::result::Result<PredictionRecord, QuarantineRecord>> =
        with_workers(args.config.workers, || {
            records
                .par_iter()
                .map(|record| {
                    ground_one(record, &args.manifest, &*scorer, args, &engine_config)
                        .map_err(|e| QuarantineRecord {
                            sample_id: record.sample_id.clone(),
                            reason: e.to_string(),
                        })
                })
                .collect()
        })?;

    let mut predictions = Vec::new();
    let mut quarantined = Vec::new();
    for r in results {
        match r {
            Ok(p) => predictions.push(p),
            Err(q) => quarantined.push(q),
        }
    }
    if predictions.is_empty() {
        return Err(Error::Hook(format!(
            "all {} samples failed to ground; first: {}",
            quarantined.len(),
            quarantined[0].reason
        )));
    }

    write_jsonl(
        &args.out,
        &FileHeader::new("ground", &args.config),
        &predictions,
    )?;
    let quarantine_path = if quarantined.is_empty() {
        None
    } else {
        let path = args.out.with_extension("quarantine.jsonl");
        write_jsonl(&path, &FileHeader::new("ground", &args.config), &quarantined)?;
        Some(path)
    };
    Ok(GroundOutput {
        predictions_path: args.out.clone(),
        quarantine_path,
        n_predicted: predictions.len(),
        n_quarantined: quarantined.len(),
    })
}

fn ground_one(
    record: &DatasetRecord,
    manifest_path: &Path,
    scorer: &dyn crate::engine::Scorer,
    args: &GroundArgs,
    engine_config: &crate::engine::EngineConfig,
) -> Result<PredictionRecord> {
    let rows = read_features(&resolve(manifest_path, &record.feature_path))?;
    let frames = FrameSequence::new(
        record.video_id.clone(),
        record.fps,
        record.t0_s,
        rows,
        args.config.group_size,
    )?
    .subsampled_to_cap(args.config.max_frames)?;

    let options: &[String] = if args.use_options {
        record.options.as_deref().unwrap_or(&[])
    } else {
        &[]
    };
    let embedding = query_embedding(&record.query, options, frames.dim());
    let query = Query::new(record.query.clone(), embedding)?
        .with_options(record.options.clone().unwrap_or_default());

    let result = match args.mode {
        GroundingMode::Progressive => {
            ground_progressive(&frames, &query, scorer, engine_config)?
        }
        GroundingMode::SingleStage => {
            ground_single_stage(&frames, &query, scorer, engine_config)?
        }
    };
    Ok(PredictionRecord {
        sample_id: record.sample_id.clone(),
        window: result.window.interval,
        interval: result.interval,
        mode: result.mode.to_string(),
        trace: TraceCounts {
            stage1_tokens: result.trace.stage1_tokens,
            stage2_tokens: result.trace.stage2_tokens,
            degenerate: result.trace.degenerate_coarse,
        },
    })
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct EvalArgs {
    pub predictions: PathBuf,
    pub manifest: PathBuf,
    pub out_dir: PathBuf,
    pub config: RunConfig,
}

#[derive(Debug, Clone)]
pub struct EvalOutput {
    pub report_json_path: PathBuf,
    pub report_text_path: PathBuf,
    pub report: EvalReport,
}

/// Scores a predictions file against its dataset manifest and writes the
/// machine-readable and human-readable reports.
pub fn cmd_eval(args: &EvalArgs) -> Result<EvalOutput> {
    let (_, predictions): (_, Vec<PredictionRecord>) = read_jsonl(&args.predictions)?;
    let (_, records): (_, Vec<DatasetRecord>) = read_jsonl(&args.manifest)?;
    if records.is_empty() {
        return Err(Error::EmptyInput { what: "dataset manifest" });
    }

    let mut prediction_map: BTreeMap<String, TimeInterval> = BTreeMap::new();
    for p in &predictions {
        if prediction_map.insert(p.sample_id.clone(), p.interval).is_some() {
            return Err(Error::DuplicateSampleId(p.sample_id.clone()));
        }
    }

    let gts: Vec<LabeledSample> = records
        .iter()
        .map(|r| {
            Ok(LabeledSample {
                sample_id: r.sample_id.clone(),
                sample: GroundingSample::new(
                    r.video_id.clone(),
                    r.duration_s,
                    r.query.clone(),
                    r.options.clone(),
                    r.gt,
                    r.task_type.clone(),
                    r.video_category.clone(),
                )?,
            })
        })
        .collect::<Result<_>>()?;

    let report = evaluate(
        &prediction_map,
        &gts,
        &args.config.thresholds,
        args.config.duration_buckets,
    )?;

    fs::create_dir_all(&args.out_dir)?;
    let report_json_path = args.out_dir.join("report.json");
    write_pretty_json(&report_json_path, &report)?;
    let report_text_path = args.out_dir.join("report.txt");
    fs::write(&report_text_path, render_report_text(&report))?;
    Ok(EvalOutput {
        report_json_path,
        report_text_path,
        report,
    })
}

/// Human-readable rendering; fractions become percentages here and only
/// here.
pub fn render_report_text(report: &EvalReport) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let pct = |v: f64| format!("{:6.2}", v * 100.0);

    let _ = writeln!(
        out,
        "samples: {}  (missing predictions: {})",
        report.n_samples, report.flagged_missing
    );
    let header: Vec<String> = report.r1.iter().map(|r| format!("R1@{}", r.tau)).collect();
    let _ = writeln!(out, "\noverall          {}    mIoU", header.join("   "));
    let overall: Vec<String> = report.r1.iter().map(|r| pct(r.recall)).collect();
    let _ = writeln!(out, "                 {}  {}", overall.join("   "), pct(report.miou));

    let _ = writeln!(out, "\nduration buckets");
    for bucket in &report.duration_buckets {
        let row: Vec<String> = bucket.r1.iter().map(|r| pct(r.recall)).collect();
        let _ = writeln!(
            out,
            "  {:<8} n={:<5} {}  {}",
            bucket.label,
            bucket.n,
            row.join("   "),
            pct(bucket.miou)
        );
    }

    let _ = writeln!(out, "\nquery-center deciles");
    for row in &report.center_deciles {
        let lo = row.bin as f64 / 10.0;
        let hi = (row.bin + 1) as f64 / 10.0;
        let recalls: Vec<String> = row.r1.iter().map(|r| pct(r.recall)).collect();
        let _ = writeln!(
            out,
            "  {:.1}-{:<4} n={:<5} {}",
            lo,
            hi,
            row.n,
            recalls.join("   ")
        );
    }

    let _ = writeln!(out, "\nquery-center thirds");
    for third in &report.center_thirds {
        let row: Vec<String> = third.r1.iter().map(|r| pct(r.recall)).collect();
        let _ = writeln!(
            out,
            "  {:<8} n={:<5} {}  {}",
            third.label,
            third.n,
            row.join("   "),
            pct(third.miou)
        );
    }

    let _ = writeln!(out, "\nposition robustness");
    for (d, g) in report.dispersion.iter().zip(&report.gap) {
        let std = d
            .sample_std_pct
            .map(|v| format!("{v:.2}"))
            .unwrap_or_else(|| "n/a".to_string());
        let gap = match (g.gap_pct, g.flagged_all_zero) {
            (Some(v), _) => format!("{v:.1}%"),
            (None, true) => "undefined (all-zero recalls)".to_string(),
            (None, false) => "n/a".to_string(),
        };
        let _ = writeln!(out, "  tau {:.1}: std dev {std}  gap {gap}", d.tau);
    }
    out
}

// ---------------------------------------------------------------------------
// recall fixtures
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureRow {
    pub label: String,
    pub sample_std: Option<f64>,
    pub gap_pct: Option<f64>,
    pub flagged_all_zero: bool,
    pub reference_std: Option<f64>,
    pub reference_gap_pct: Option<f64>,
    /// Divergence from the reference std-dev column beyond ±0.1.
    pub std_divergence: Option<f64>,
    /// Percentage-point divergence from the reference gap, when beyond
    /// tolerance. A known discrepancy, surfaced rather than hidden.
    pub gap_divergence_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureReport {
    pub rows: Vec<FixtureRow>,
}

/// Computes the dispersion and gap columns for a recall fixture file and
/// diffs them against any supplied reference columns.
pub fn eval_recall_fixture(path: &Path) -> Result<FixtureReport> {
    let (_, records): (_, Vec<RecallFixtureRecord>) = read_jsonl(path)?;
    if records.is_empty() {
        return Err(Error::EmptyInput { what: "recall fixture" });
    }
    let rows = records
        .into_iter()
        .map(|r| {
            let sample_std = position_dispersion(&r.recalls).ok();
            let (gap_pct, flagged_all_zero) = match position_gap(&r.recalls) {
                Ok(v) => (Some(v), false),
                Err(Error::AllZeroRecalls) => (None, true),
                Err(_) => (None, false),
            };
            let gap_divergence_pct = match (gap_pct, r.reference_gap_pct) {
                (Some(got), Some(want)) => gap_reference_divergence(got, want),
                _ => None,
            };
            let std_divergence = match (sample_std, r.reference_std) {
                (Some(got), Some(want)) if (got - want).abs() > 0.1 => Some((got - want).abs()),
                _ => None,
            };
            FixtureRow {
                label: r.label,
                sample_std,
                gap_pct,
                flagged_all_zero,
                reference_std: r.reference_std,
                reference_gap_pct: r.reference_gap_pct,
                std_divergence,
                gap_divergence_pct,
            }
        })
        .collect();
    Ok(FixtureReport { rows })
}

pub fn render_fixture_text(report: &FixtureReport) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    for row in &report.rows {
        let std = row
            .sample_std
            .map(|v| format!("{v:.2}"))
            .unwrap_or_else(|| "n/a".to_string());
        let gap = row
            .gap_pct
            .map(|v| format!("{v:.1}%"))
            .unwrap_or_else(|| {
                if row.flagged_all_zero {
                    "undefined (all-zero)".to_string()
                } else {
                    "n/a".to_string()
                }
            });
        let _ = write!(out, "{:<24} std dev {std:<8} gap {gap:<10}", row.label);
        if let Some(div) = row.std_divergence {
            let _ = write!(
                out,
                "  [std diverges from reference {:.1} by {div:.2}]",
                row.reference_std.unwrap()
            );
        }
        if let Some(div) = row.gap_divergence_pct {
            let _ = write!(
                out,
                "  [diverges from reference {:.1}% by {div:.1} points]",
                row.reference_gap_pct.unwrap()
            );
        }
        out.push('\n');
    }
    out
}
