//! Self-contained acceptance suite: every criterion the artifact promises,
//! runnable on generated data with no external services. The `selftest` CLI
//! command and the acceptance test target both drive [`run_all`].

use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::augment;
use crate::commands::{
    cmd_augment, cmd_curate, cmd_eval, cmd_gen_clips, cmd_ground, AugmentArgs, CurateArgs,
    EvalArgs, GenClipsArgs, GroundArgs,
};
use crate::config::RunConfig;
use crate::curation::{expert_consensus, ConsensusOutcome, ExpertVote};
use crate::engine::{
    ground_progressive, ground_single_stage, EngineConfig, GroundingMode, InnerProductScorer,
    Query, UNBOUNDED_MARGIN,
};
use crate::error::Result;
use crate::intervals::{iou, recall_at, IoUScore, TimeInterval};
use crate::model::{build_sequence, pool_cache, prefill, select_window, token_budget, FrameSequence};
use crate::qa::extend_interval;
use crate::synthetic::{generate_corpus, CorpusConfig, DistractorConfig};

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    fn pass(id: &'static str, name: &'static str, detail: impl Into<String>) -> Self {
        Self {
            id,
            name,
            passed: true,
            detail: detail.into(),
        }
    }

    fn fail(id: &'static str, name: &'static str, detail: impl Into<String>) -> Self {
        Self {
            id,
            name,
            passed: false,
            detail: detail.into(),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {:<4} {:<42} {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

/// Runs every acceptance criterion. Criteria never panic; failures carry
/// their evidence in `detail`.
pub fn run_all(seed: u64) -> Vec<CriterionResult> {
    vec![
        c1_dispersion_column(),
        c2_gap_reference_row(),
        c3_degenerate_equivalence(seed),
        c4_containment(seed),
        c5_oracle_corpus(seed),
        c6_iou_oracle(seed),
        c7_token_accounting(),
        c8_augmentation_suite(seed),
        c9_consensus_fixtures(seed),
        c10_qa_bridge(seed),
        c11_pipeline(seed),
    ]
}

fn guard(
    id: &'static str,
    name: &'static str,
    body: impl FnOnce() -> Result<std::result::Result<String, String>>,
) -> CriterionResult {
    match body() {
        Ok(Ok(detail)) => CriterionResult::pass(id, name, detail),
        Ok(Err(detail)) => CriterionResult::fail(id, name, detail),
        Err(e) => CriterionResult::fail(id, name, format!("errored: {e}")),
    }
}

// C1: the published early/middle/late recall rows reproduce their std-dev
// column under the sample (n-1) standard deviation, each within ±0.1.
fn c1_dispersion_column() -> CriterionResult {
    guard("C1", "position dispersion reproduces reference column", || {
        let rows: [(&str, [f64; 3], f64); 4] = [
            ("row-1", [20.0, 13.4, 4.1], 8.0),
            ("row-2", [50.0, 33.3, 31.1], 10.4),
            ("row-3", [50.9, 28.1, 44.0], 11.6),
            ("row-4", [39.3, 44.8, 46.0], 3.5),
        ];
        let mut details = Vec::new();
        for (label, recalls, want) in rows {
            let got = crate::evaluation::position_dispersion(&recalls)?;
            if (got - want).abs() > 0.1 {
                return Ok(Err(format!("{label}: {got:.3} vs {want} exceeds ±0.1")));
            }
            details.push(format!("{label} {got:.2}~{want}"));
        }
        Ok(Ok(details.join(", ")))
    })
}

// C2: the reference decile row gives a 78% relative gap within ±1%;
// divergent rows are logged as known discrepancies, not failures.
fn c2_gap_reference_row() -> CriterionResult {
    guard("C2", "position gap reproduces reference row", || {
        let row = [
            0.417, 0.368, 0.615, 0.222, 0.250, 0.158, 0.278, 0.235, 0.133, 0.154,
        ];
        let gap = crate::evaluation::position_gap(&row)?;
        if (gap - 78.0).abs() > 1.0 {
            return Ok(Err(format!("gap {gap:.2}% vs 78% exceeds ±1%")));
        }
        // known divergent rows: formula value stands, divergence is surfaced
        let divergent = [
            (
                "row-4@0.3",
                vec![0.393, 0.417, 0.606, 0.464, 0.421, 0.470, 0.555, 0.667, 0.470, 0.467],
                35.1,
            ),
            (
                "row-1@0.5",
                vec![0.250, 0.158, 0.462, 0.185, 0.062, 0.158, 0.111, 0.011, 0.066, 0.000],
                97.0,
            ),
        ];
        let mut logged = Vec::new();
        for (label, recalls, reference) in divergent {
            let got = crate::evaluation::position_gap(&recalls)?;
            match crate::evaluation::gap_reference_divergence(got, reference) {
                Some(diff) => logged.push(format!(
                    "{label}: formula {got:.1}% vs reference {reference}% (Δ{diff:.1}, known discrepancy)"
                )),
                None => {
                    return Ok(Err(format!(
                        "{label} unexpectedly matches reference {reference}%"
                    )))
                }
            }
        }
        Ok(Ok(format!("gap {gap:.2}%~78%; {}", logged.join("; "))))
    })
}

fn random_pair(rng: &mut ChaCha8Rng) -> Result<(FrameSequence, Query)> {
    let n = rng.gen_range(20..120);
    let dim = rng.gen_range(2..12);
    let group_size = rng.gen_range(1..6);
    let frames: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    let video = FrameSequence::new("rnd", 1.0, 0.0, frames, group_size)?;
    let embedding: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let query = Query::new("random query", embedding)?;
    Ok((video, query))
}

// C3: pool factor 1 plus unbounded margin makes progressive grounding
// bit-identical to single-stage for 200 seeded random pairs.
fn c3_degenerate_equivalence(seed: u64) -> CriterionResult {
    guard("C3", "degenerate equivalence over 200 random pairs", || {
        let config = EngineConfig {
            pool_factor: 1,
            margin: UNBOUNDED_MARGIN,
            ..EngineConfig::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC3);
        for case in 0..200 {
            let (video, query) = random_pair(&mut rng)?;
            let prog = ground_progressive(&video, &query, &InnerProductScorer, &config)?;
            let single = ground_single_stage(&video, &query, &InnerProductScorer, &config)?;
            let same = prog.interval.start_s().to_bits() == single.interval.start_s().to_bits()
                && prog.interval.end_s().to_bits() == single.interval.end_s().to_bits();
            if !same {
                return Ok(Err(format!(
                    "case {case}: {} vs {}",
                    prog.interval, single.interval
                )));
            }
        }
        Ok(Ok("200/200 intervals bit-identical".to_string()))
    })
}

// C4: every progressive result satisfies interval ⊆ window across a
// 1000-sample corpus with noise and distractors.
fn c4_containment(seed: u64) -> CriterionResult {
    guard("C4", "window containment across synthetic corpus", || {
        let corpus = generate_corpus(&CorpusConfig {
            n_videos: 1000,
            noise_amplitude: 0.2,
            distractors: Some(DistractorConfig {
                count: 2,
                amplitude: 0.6,
                len_range_s: (10.0, 30.0),
            }),
            seed: seed ^ 0xC4,
            ..CorpusConfig::default()
        })?;
        let config = EngineConfig::default();
        for item in &corpus {
            let result = ground_progressive(&item.frames, &item.query, &InnerProductScorer, &config)?;
            if !result.window.interval.contains(&result.interval) {
                return Ok(Err(format!(
                    "{}: interval {} escapes window {}",
                    item.sample_id, result.interval, result.window.interval
                )));
            }
        }
        Ok(Ok(format!("{}/{} results contained", corpus.len(), corpus.len())))
    })
}

// C5: noiseless corpus grounds perfectly at R1@0.7; with 0.6-amplitude
// distractors and pool factor 4, progressive beats budget-matched
// single-stage at R1@0.5.
fn c5_oracle_corpus(seed: u64) -> CriterionResult {
    guard("C5", "planted-signal recovery and budget-matched win", || {
        let config = EngineConfig::default();

        // part A: noiseless, no distractors
        let clean = generate_corpus(&CorpusConfig {
            n_videos: 300,
            seed: seed ^ 0xC5,
            ..CorpusConfig::default()
        })?;
        let clean_ious: Vec<IoUScore> = clean
            .iter()
            .map(|item| {
                let r = ground_progressive(&item.frames, &item.query, &InnerProductScorer, &config)?;
                Ok(iou(&r.interval, &item.sample.gt))
            })
            .collect::<Result<_>>()?;
        let r1_07 = recall_at(&clean_ious, 0.7)?;
        if r1_07 < 1.0 {
            return Ok(Err(format!("noiseless R1@0.7 = {r1_07:.4}, want 1.0")));
        }

        // part B: distractors outside the true region, equal token budget
        let hard = generate_corpus(&CorpusConfig {
            n_videos: 200,
            distractors: Some(DistractorConfig {
                count: 2,
                amplitude: 0.6,
                len_range_s: (10.0, 30.0),
            }),
            seed: seed ^ 0x5C,
            ..CorpusConfig::default()
        })?;
        let mut prog_ious = Vec::new();
        let mut single_ious = Vec::new();
        let mut full_single_ious = Vec::new();
        for item in &hard {
            let prog = ground_progressive(&item.frames, &item.query, &InnerProductScorer, &config)?;
            prog_ious.push(iou(&prog.interval, &item.sample.gt));

            // single-stage sees only as many visual tokens as both
            // progressive stages together
            let budget = prog.trace.stage1_tokens + prog.trace.stage2_tokens;
            let truncated = item.frames.truncated(budget.min(item.frames.len()))?;
            let single = ground_single_stage(&truncated, &item.query, &InnerProductScorer, &config)?;
            single_ious.push(iou(&single.interval, &item.sample.gt));

            let full = ground_single_stage(&item.frames, &item.query, &InnerProductScorer, &config)?;
            full_single_ious.push(iou(&full.interval, &item.sample.gt));
        }
        let prog_r1 = recall_at(&prog_ious, 0.5)?;
        let single_r1 = recall_at(&single_ious, 0.5)?;
        if prog_r1 <= single_r1 {
            return Ok(Err(format!(
                "progressive R1@0.5 {prog_r1:.3} does not exceed budget-matched single-stage {single_r1:.3}"
            )));
        }
        // even without truncation, single-stage never beats progressive in
        // aggregate on this corpus
        let prog_miou = crate::intervals::mean_iou(&prog_ious)?;
        let full_single_miou = crate::intervals::mean_iou(&full_single_ious)?;
        if full_single_miou > prog_miou + 1e-12 {
            return Ok(Err(format!(
                "untruncated single-stage mIoU {full_single_miou:.3} exceeds progressive {prog_miou:.3}"
            )));
        }
        Ok(Ok(format!(
            "noiseless R1@0.7 = 1.0; with distractors: progressive {prog_r1:.3} > single {single_r1:.3} at equal budget"
        )))
    })
}

// C6: closed-form IoU equals the unit-cell counting oracle exactly for
// 10,000 random integer-endpoint pairs.
fn c6_iou_oracle(seed: u64) -> CriterionResult {
    guard("C6", "IoU matches unit-cell oracle exactly", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC6);
        for case in 0..10_000 {
            let s1 = rng.gen_range(0i64..1000);
            let d1 = rng.gen_range(1i64..400);
            let s2 = rng.gen_range(0i64..1000);
            let d2 = rng.gen_range(1i64..400);
            let a = TimeInterval::new(s1 as f64, (s1 + d1) as f64)?;
            let b = TimeInterval::new(s2 as f64, (s2 + d2) as f64)?;
            let exact = iou(&a, &b).value();
            let oracle = grid_iou((s1, s1 + d1), (s2, s2 + d2));
            if exact.to_bits() != oracle.to_bits() {
                return Ok(Err(format!(
                    "case {case}: closed form {exact} vs oracle {oracle}"
                )));
            }
        }
        Ok(Ok("10000/10000 pairs exact".to_string()))
    })
}

/// Independent oracle: count unit cells in intersection and union.
fn grid_iou(a: (i64, i64), b: (i64, i64)) -> f64 {
    let lo = a.0.min(b.0);
    let hi = a.1.max(b.1);
    let mut inter = 0i64;
    let mut union = 0i64;
    for cell in lo..hi {
        let in_a = cell >= a.0 && cell < a.1;
        let in_b = cell >= b.0 && cell < b.1;
        if in_a && in_b {
            inter += 1;
        }
        if in_a || in_b {
            union += 1;
        }
    }
    inter as f64 / union as f64
}

// C7: 300-frame videos, pool factor 4, 30-frame windows: stage-1 = 75,
// stage-2 = 30, single-stage = 300, asserted exactly.
fn c7_token_accounting() -> CriterionResult {
    guard("C7", "token accounting 75/30/300", || {
        let frames: Vec<Vec<f64>> = (0..300).map(|i| vec![i as f64, 1.0]).collect();
        let video = FrameSequence::new("budget", 1.0, 0.0, frames, 1)?;
        let seq = build_sequence(&video, &[0.0, 0.0])?;
        let fine = prefill(&seq, &Default::default())?;
        let coarse = pool_cache(&fine, 4)?;
        let window = TimeInterval::new(120.0, 149.5)?; // frames 120..=149
        let restricted = select_window(&fine, &window)?;
        let budget = token_budget(&fine, &coarse, &restricted)?;
        let got = (
            budget.stage1_visual,
            budget.stage2_visual,
            budget.single_stage_visual,
        );
        if got != (75, 30, 300) {
            return Ok(Err(format!("got {got:?}, want (75, 30, 300)")));
        }
        if !budget.progressive_saves {
            return Ok(Err("expected progressive savings flag".to_string()));
        }
        Ok(Ok("stage1=75 stage2=30 single=300".to_string()))
    })
}

// C8: shift composition, scale round-trip at 1e-9, IoU invariance under
// joint shift/scale, and sampled ranges respected over 10,000 draws.
fn c8_augmentation_suite(seed: u64) -> CriterionResult {
    guard("C8", "augmentation properties and ranges", || {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC8);

        // composition and round trips on concrete samples
        for _ in 0..200 {
            let duration = rng.gen_range(60..200) as f64;
            let gs = rng.gen_range(0..(duration as i64 - 20)) as f64;
            let gt = TimeInterval::new(gs, gs + rng.gen_range(2..15) as f64)?;
            let features: Vec<Vec<f64>> = (0..duration as usize).map(|i| vec![i as f64]).collect();
            let video = FrameSequence::new("aug", 1.0, 0.0, features, 4)?;
            let sample = crate::curation::GroundingSample::new(
                "aug", duration, "q", None, gt, "t", "c",
            )?;

            // composition on a quarter-second grid is exact
            let d1 = rng.gen_range(16..2000) as f64 * 0.25;
            let d2 = rng.gen_range(16..2000) as f64 * 0.25;
            let (s1, f1) = augment::shift(&sample, &video, d1)?;
            let (s12, _) = augment::shift(&s1, &f1, d2)?;
            let (direct, _) = augment::shift(&sample, &video, d1 + d2)?;
            if s12.gt != direct.gt || s12.duration_s != direct.duration_s {
                return Ok(Err(format!("shift composition broke: {:?} vs {:?}", s12.gt, direct.gt)));
            }

            // scale round trip within 1e-9 relative
            let k = rng.gen_range(0.3..3.0);
            let (up, fu) = augment::scale(&sample, &video, k)?;
            let (back, _) = augment::scale(&up, &fu, 1.0 / k)?;
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
            if rel(back.gt.start_s(), gt.start_s()) > 1e-9
                || rel(back.gt.end_s(), gt.end_s()) > 1e-9
            {
                return Ok(Err(format!("scale round trip drifted: {:?}", back.gt)));
            }

            // IoU invariance under joint shift and joint scale
            let pred = gt.translated(1.5)?;
            let before = iou(&pred, &gt).value();
            let shifted = iou(&pred.translated(d1)?, &gt.translated(d1)?).value();
            let scaled = iou(&pred.scaled(k)?, &gt.scaled(k)?).value();
            if (before - shifted).abs() > 1e-12 || (before - scaled).abs() > 1e-9 {
                return Ok(Err("IoU not invariant under joint transform".to_string()));
            }
        }

        // sampled ranges over 10,000 draws
        let shift_sampler =
            augment::AugmentationSampler::new(augment::AugmentationKind::Shift, seed ^ 0x88);
        let cut_sampler =
            augment::AugmentationSampler::new(augment::AugmentationKind::Cut, seed ^ 0x89);
        for i in 0..10_000u64 {
            match shift_sampler.draw(i, 0.0, 300.0)? {
                augment::Augmentation::Shift { offset_s } => {
                    if !(4.0..=1004.0).contains(&offset_s) {
                        return Ok(Err(format!("shift offset {offset_s} out of [4,1004]")));
                    }
                }
                other => return Ok(Err(format!("wrong draw {other:?}"))),
            }
            match cut_sampler.draw(i, 0.0, 300.0)? {
                augment::Augmentation::Cut { window } => {
                    let span = window.duration_s();
                    if !(10.0 - 1e-9..=20.0 + 1e-9).contains(&span) {
                        return Ok(Err(format!("cut span {span} out of [10,20]")));
                    }
                }
                other => return Ok(Err(format!("wrong draw {other:?}"))),
            }
        }
        Ok(Ok("composition, round trip, invariance, 10000 draws in range".to_string()))
    })
}

// C9: consensus fixtures and permutation invariance over 100 shuffles.
fn c9_consensus_fixtures(seed: u64) -> CriterionResult {
    guard("C9", "consensus fixtures and permutation invariance", || {
        let vote = |id: &str, s: f64, e: f64| -> Result<ExpertVote> {
            Ok(ExpertVote {
                expert_id: id.to_string(),
                interval: TimeInterval::new(s, e)?,
            })
        };
        let pair = vec![vote("a", 10.0, 20.0)?, vote("b", 12.0, 22.0)?];
        match expert_consensus(&pair, 0.5)? {
            ConsensusOutcome::Retained { canonical, .. } => {
                if canonical != TimeInterval::new(11.0, 21.0)? {
                    return Ok(Err(format!("canonical {canonical}, want [11, 21]")));
                }
            }
            ConsensusOutcome::Rejected { min_pairwise_iou } => {
                return Ok(Err(format!("rejected with min IoU {min_pairwise_iou}")));
            }
        }

        let disjoint = vec![vote("a", 10.0, 20.0)?, vote("b", 30.0, 40.0)?];
        if !matches!(expert_consensus(&disjoint, 0.5)?, ConsensusOutcome::Rejected { .. }) {
            return Ok(Err("disjoint votes were not rejected".to_string()));
        }

        let mut votes = vec![
            vote("a", 10.0, 20.0)?,
            vote("b", 11.0, 21.0)?,
            vote("c", 12.0, 22.0)?,
            vote("d", 10.5, 20.5)?,
        ];
        let base = expert_consensus(&votes, 0.5)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xC9);
        for shuffle in 0..100 {
            use rand::seq::SliceRandom;
            votes.shuffle(&mut rng);
            if expert_consensus(&votes, 0.5)? != base {
                return Ok(Err(format!("shuffle {shuffle} changed the outcome")));
            }
        }
        Ok(Ok("fixtures exact; 100 shuffles invariant".to_string()))
    })
}

// C10: the frame-selection protocol's worked examples plus idempotence on
// 1,000 random intervals.
fn c10_qa_bridge(seed: u64) -> CriterionResult {
    guard("C10", "qa frame-selection protocol", || {
        let a = extend_interval(&TimeInterval::new(100.0, 110.0)?, 32.0, 1000.0)?;
        if a != TimeInterval::new(89.0, 121.0)? {
            return Ok(Err(format!("extend([100,110]) gave {a}, want [89, 121]")));
        }
        let b = extend_interval(&TimeInterval::new(5.0, 10.0)?, 32.0, 1000.0)?;
        if b != TimeInterval::new(0.0, 32.0)? {
            return Ok(Err(format!("extend([5,10]) gave {b}, want [0, 32]")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x10);
        for case in 0..1000 {
            let duration: f64 = rng.gen_range(40.0..2000.0);
            let start = rng.gen_range(0.0..duration - 1.0);
            let len = rng.gen_range(0.1..(duration - start).min(100.0));
            let interval = TimeInterval::new(start, start + len)?;
            let once = extend_interval(&interval, 32.0, duration)?;
            let twice = extend_interval(&once, 32.0, duration)?;
            if once != twice {
                return Ok(Err(format!("case {case}: {once} then {twice}")));
            }
        }
        Ok(Ok("worked examples exact; 1000 extensions idempotent".to_string()))
    })
}

// C11: curate -> augment -> ground -> eval completes on a generated
// 100-clip corpus with count conservation and byte-identical outputs under
// a fixed seed.
fn c11_pipeline(seed: u64) -> CriterionResult {
    guard("C11", "end-to-end pipeline, reproducible bytes", || {
        let base = std::env::temp_dir().join(format!("groundscope-selftest-{}", std::process::id()));
        let _ = fs::remove_dir_all(&base);
        let run_a = run_pipeline(&base.join("a"), seed)?;
        let run_b = run_pipeline(&base.join("b"), seed)?;

        if !run_a.conserved {
            return Ok(Err("pipeline counts do not reconcile".to_string()));
        }
        // greedy packing of ~100s clips toward 500s: mean within ±10%
        if !(450.0..=550.0).contains(&run_a.mean_long_duration) {
            return Ok(Err(format!(
                "mean long-video duration {:.0}s outside 500 ±10%",
                run_a.mean_long_duration
            )));
        }
        for (name, a, b) in [
            ("clips.jsonl", &run_a.clips, &run_b.clips),
            ("dataset.jsonl", &run_a.dataset, &run_b.dataset),
            ("augmented.jsonl", &run_a.augmented, &run_b.augmented),
            ("predictions.jsonl", &run_a.predictions, &run_b.predictions),
            ("report.json", &run_a.report, &run_b.report),
        ] {
            if fs::read(a)? != fs::read(b)? {
                return Ok(Err(format!("{name} differs between identical runs")));
            }
        }
        let detail = format!(
            "{} clips -> {} samples -> {} augmented -> {} predictions; mean long video {:.0}s; bytes identical",
            run_a.n_clips, run_a.n_samples, run_a.n_augmented, run_a.n_predictions,
            run_a.mean_long_duration,
        );
        let _ = fs::remove_dir_all(&base);
        Ok(Ok(detail))
    })
}

struct PipelineRun {
    clips: PathBuf,
    dataset: PathBuf,
    augmented: PathBuf,
    predictions: PathBuf,
    report: PathBuf,
    conserved: bool,
    n_clips: usize,
    n_samples: usize,
    n_augmented: usize,
    n_predictions: usize,
    mean_long_duration: f64,
}

fn run_pipeline(dir: &Path, seed: u64) -> Result<PipelineRun> {
    fs::create_dir_all(dir)?;
    let config = RunConfig {
        seed,
        group_size: 1,
        ..RunConfig::default()
    };

    let gen = cmd_gen_clips(&GenClipsArgs::new(dir.to_path_buf(), 100, config.clone()))?;
    let curated = cmd_curate(&CurateArgs::new(
        gen.manifest_path.clone(),
        dir.join("curated"),
        config.clone(),
    ))?;
    let augmented = cmd_augment(&AugmentArgs::new(
        curated.dataset_path.clone(),
        dir.join("augmented"),
        augment::AugmentationKind::Shift,
        config.clone(),
    ))?;
    let ground = cmd_ground(&GroundArgs {
        manifest: augmented.manifest_path.clone(),
        out: dir.join("predictions.jsonl"),
        scorer: "synthetic".to_string(),
        mode: GroundingMode::Progressive,
        use_options: false,
        config: config.clone(),
    })?;
    let eval = cmd_eval(&EvalArgs {
        predictions: ground.predictions_path.clone(),
        manifest: augmented.manifest_path.clone(),
        out_dir: dir.join("eval"),
        config,
    })?;

    let conserved = curated.report.clips.is_conserved()
        && curated.report.samples.is_conserved()
        && augmented.report.is_conserved()
        && ground.n_predicted + ground.n_quarantined == augmented.report.kept;

    Ok(PipelineRun {
        clips: gen.manifest_path,
        dataset: curated.dataset_path,
        augmented: augmented.manifest_path,
        predictions: ground.predictions_path,
        report: eval.report_json_path,
        conserved,
        n_clips: gen.n_clips,
        n_samples: curated.report.samples.kept,
        n_augmented: augmented.report.kept,
        n_predictions: ground.n_predicted,
        mean_long_duration: curated.report.mean_long_video_duration_s,
    })
}

/// Summary counters for a finished run.
pub fn summarize(results: &[CriterionResult]) -> (usize, usize) {
    let passed = results.iter().filter(|r| r.passed).count();
    (passed, results.len() - passed)
}

/// Table-6-style recall fixture rows used by `eval --recall-fixture` smoke
/// checks and documented in the README.
pub fn builtin_recall_fixture() -> Vec<crate::manifest::RecallFixtureRecord> {
    use crate::manifest::RecallFixtureRecord;
    vec![
        RecallFixtureRecord {
            label: "thirds-row-1".to_string(),
            recalls: vec![20.0, 13.4, 4.1],
            reference_std: Some(8.0),
            reference_gap_pct: None,
        },
        RecallFixtureRecord {
            label: "thirds-row-2".to_string(),
            recalls: vec![50.0, 33.3, 31.1],
            reference_std: Some(10.4),
            reference_gap_pct: None,
        },
        RecallFixtureRecord {
            label: "thirds-row-3".to_string(),
            recalls: vec![50.9, 28.1, 44.0],
            reference_std: Some(11.6),
            reference_gap_pct: None,
        },
        RecallFixtureRecord {
            label: "thirds-row-4".to_string(),
            recalls: vec![39.3, 44.8, 46.0],
            reference_std: Some(3.5),
            reference_gap_pct: None,
        },
        RecallFixtureRecord {
            label: "deciles-row-1".to_string(),
            recalls: vec![
                0.417, 0.368, 0.615, 0.222, 0.250, 0.158, 0.278, 0.235, 0.133, 0.154,
            ],
            reference_std: None,
            reference_gap_pct: Some(78.0),
        },
    ]
}

