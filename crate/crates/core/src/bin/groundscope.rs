//! Command-line entry points for the grounding toolkit.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use groundscope::commands::{
    cmd_augment, cmd_curate, cmd_eval, cmd_gen_clips, cmd_ground, eval_recall_fixture,
    render_fixture_text, render_report_text, AugmentArgs, CurateArgs, EvalArgs, GenClipsArgs,
    GroundArgs,
};
use groundscope::augment::AugmentationKind;
use groundscope::config::RunConfig;
use groundscope::engine::{GroundingMode, UNBOUNDED_MARGIN};
use groundscope::selftest;

#[derive(Parser)]
#[command(
    name = "groundscope",
    version,
    about = "Progressive coarse-to-fine temporal grounding toolkit: synthetic corpora, curation, augmentation, grounding, and evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ConfigFlags {
    /// Consecutive frame groups averaged into one coarse super-entry.
    #[arg(long, default_value_t = 4)]
    pool_factor: usize,
    /// Fine-stage run threshold relative to the stage's peak - min.
    #[arg(long, default_value_t = 0.5)]
    theta: f64,
    /// Coarse-stage band width relative to the stage's peak - min.
    #[arg(long, default_value_t = 0.2)]
    delta: f64,
    /// Window padding in super-groups per side.
    #[arg(long, default_value_t = 1)]
    margin: usize,
    /// Pad every window to the full timeline (overrides --margin).
    #[arg(long)]
    unbounded_margin: bool,
    /// Frames per second assumed for feature rows.
    #[arg(long, default_value_t = 1.0)]
    fps: f64,
    /// Frames per timestamp group.
    #[arg(long, default_value_t = 4)]
    group_size: usize,
    /// Evaluation-context frame cap (uniform subsampling beyond it).
    #[arg(long, default_value_t = 800)]
    max_frames: usize,
    /// Recall thresholds.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.3, 0.5, 0.7])]
    thresholds: Vec<f64>,
    /// Short/medium/long duration boundaries in seconds (two values).
    #[arg(long, value_delimiter = ',', default_values_t = vec![180.0, 900.0])]
    duration_buckets: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for per-sample work (0 = library default).
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

impl ConfigFlags {
    fn to_config(&self) -> groundscope::Result<RunConfig> {
        pair(&self.duration_buckets, "--duration-buckets")?;
        Ok(RunConfig {
            pool_factor: self.pool_factor,
            theta: self.theta,
            delta: self.delta,
            margin: if self.unbounded_margin {
                UNBOUNDED_MARGIN
            } else {
                self.margin
            },
            fps: self.fps,
            group_size: self.group_size,
            max_frames: self.max_frames,
            thresholds: self.thresholds.clone(),
            duration_buckets: (self.duration_buckets[0], self.duration_buckets[1]),
            seed: self.seed,
            workers: self.workers,
        })
    }
}

fn pair(values: &[f64], flag: &'static str) -> groundscope::Result<()> {
    if values.len() != 2 {
        return Err(groundscope::Error::OutOfRange {
            what: flag,
            value: values.len() as f64,
            expected: "exactly two comma- or space-separated values",
        });
    }
    Ok(())
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeFlag {
    Progressive,
    Single,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindFlag {
    Shift,
    Cut,
    Scale,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic clip corpus with planted events and expert votes.
    GenClips {
        /// Output directory for clips.jsonl and clips/*.bin features.
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, default_value_t = 100)]
        n_clips: usize,
        /// Feature dimension.
        #[arg(long, default_value_t = 32)]
        dim: usize,
        /// Noise floor amplitude outside planted events.
        #[arg(long, default_value_t = 0.1)]
        noise: f64,
        #[command(flatten)]
        config: ConfigFlags,
    },
    /// Run the curation pipeline: consensus, validation, packing into long
    /// videos, uniqueness filtering, optional bin balancing.
    Curate {
        /// Clip manifest produced by gen-clips (or hand-written).
        #[arg(long)]
        clips: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Target mean long-video duration for greedy packing.
        #[arg(long, default_value_t = 500.0)]
        target_duration: f64,
        /// Segment length for the uniqueness filter.
        #[arg(long, default_value_t = 30.0)]
        segment_len: f64,
        /// Per-bin sample cap; omit to skip balancing.
        #[arg(long)]
        bin_cap: Option<usize>,
        #[command(flatten)]
        config: ConfigFlags,
    },
    /// Apply a temporal augmentation to every sample of a dataset.
    Augment {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long, value_enum)]
        kind: KindFlag,
        /// Shift offset sampling range in seconds (two values).
        #[arg(long, value_delimiter = ',', default_values_t = vec![4.0, 1004.0])]
        shift_range: Vec<f64>,
        /// Cut window span sampling range in seconds (two values).
        #[arg(long, value_delimiter = ',', default_values_t = vec![10.0, 20.0])]
        cut_span_range: Vec<f64>,
        /// Scale factor sampling range, log-uniform (two values).
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 2.0])]
        scale_range: Vec<f64>,
        #[command(flatten)]
        config: ConfigFlags,
    },
    /// Ground every sample of a dataset manifest.
    Ground {
        #[arg(long)]
        manifest: PathBuf,
        /// Predictions file to write.
        #[arg(long)]
        out: PathBuf,
        /// Scorer backend name.
        #[arg(long, default_value = "synthetic")]
        scorer: String,
        #[arg(long, value_enum, default_value = "progressive")]
        mode: ModeFlag,
        /// Fold answer options into the query embedding.
        #[arg(long)]
        use_options: bool,
        #[command(flatten)]
        config: ConfigFlags,
    },
    /// Score predictions against ground truth and write reports.
    Eval {
        #[arg(long, required_unless_present = "recall_fixture")]
        predictions: Option<PathBuf>,
        #[arg(long, required_unless_present = "recall_fixture")]
        manifest: Option<PathBuf>,
        #[arg(long, default_value = "eval")]
        out_dir: PathBuf,
        /// Compute dispersion/gap columns for a recall fixture file instead
        /// of scoring predictions.
        #[arg(long)]
        recall_fixture: Option<PathBuf>,
        #[command(flatten)]
        config: ConfigFlags,
    },
    /// Run the full property and acceptance suite on generated data.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> groundscope::Result<ExitCode> {
    match cli.command {
        Command::GenClips {
            out_dir,
            n_clips,
            dim,
            noise,
            config,
        } => {
            let mut args = GenClipsArgs::new(out_dir, n_clips, config.to_config()?);
            args.dim = dim;
            args.noise_amplitude = noise;
            let out = cmd_gen_clips(&args)?;
            println!("wrote {} clips to {}", out.n_clips, out.manifest_path.display());
        }
        Command::Curate {
            clips,
            out_dir,
            target_duration,
            segment_len,
            bin_cap,
            config,
        } => {
            let mut args = CurateArgs::new(clips, out_dir, config.to_config()?);
            args.target_duration_s = target_duration;
            args.segment_len_s = segment_len;
            args.bin_cap = bin_cap;
            let out = cmd_curate(&args)?;
            println!(
                "curated {} samples across {} long videos (mean {:.0}s); report: {}",
                out.report.samples.kept,
                out.report.long_videos,
                out.report.mean_long_video_duration_s,
                out.report_path.display()
            );
        }
        Command::Augment {
            manifest,
            out_dir,
            kind,
            shift_range,
            cut_span_range,
            scale_range,
            config,
        } => {
            let mut args = AugmentArgs::new(
                manifest,
                out_dir,
                match kind {
                    KindFlag::Shift => AugmentationKind::Shift,
                    KindFlag::Cut => AugmentationKind::Cut,
                    KindFlag::Scale => AugmentationKind::Scale,
                },
                config.to_config()?,
            );
            pair(&shift_range, "--shift-range")?;
            pair(&cut_span_range, "--cut-span-range")?;
            pair(&scale_range, "--scale-range")?;
            args.shift_range_s = (shift_range[0], shift_range[1]);
            args.cut_span_range_s = (cut_span_range[0], cut_span_range[1]);
            args.scale_range = (scale_range[0], scale_range[1]);
            let out = cmd_augment(&args)?;
            println!(
                "augmented {} samples ({} discarded, {} quarantined): {}",
                out.report.kept,
                out.report.dropped_total(),
                out.report.quarantined,
                out.manifest_path.display()
            );
        }
        Command::Ground {
            manifest,
            out,
            scorer,
            mode,
            use_options,
            config,
        } => {
            let result = cmd_ground(&GroundArgs {
                manifest,
                out,
                scorer,
                mode: match mode {
                    ModeFlag::Progressive => GroundingMode::Progressive,
                    ModeFlag::Single => GroundingMode::SingleStage,
                },
                use_options,
                config: config.to_config()?,
            })?;
            println!(
                "grounded {} samples ({} quarantined): {}",
                result.n_predicted,
                result.n_quarantined,
                result.predictions_path.display()
            );
        }
        Command::Eval {
            predictions,
            manifest,
            out_dir,
            recall_fixture,
            config,
        } => {
            if let Some(fixture) = recall_fixture {
                let report = eval_recall_fixture(&fixture)?;
                print!("{}", render_fixture_text(&report));
            } else {
                let out = cmd_eval(&EvalArgs {
                    predictions: predictions.expect("clap enforces presence"),
                    manifest: manifest.expect("clap enforces presence"),
                    out_dir,
                    config: config.to_config()?,
                })?;
                print!("{}", render_report_text(&out.report));
                println!("reports: {}", out.report_json_path.display());
            }
        }
        Command::Selftest { seed } => {
            let results = selftest::run_all(seed);
            for r in &results {
                println!("{}", r.line());
            }
            let (passed, failed) = selftest::summarize(&results);
            println!("{passed} passed, {failed} failed");
            if failed > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
