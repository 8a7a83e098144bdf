//! VideoQA frame selection: turning a grounded interval into a fixed frame
//! budget for a downstream answerer, plus the grounded-versus-uniform
//! comparison harness with a pluggable answerer hook.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intervals::TimeInterval;
use crate::model::FrameSequence;

pub const DEFAULT_FRAME_BUDGET: usize = 32;
pub const DEFAULT_MIN_SPAN_S: f64 = 32.0;

/// Documented payload template for multiple-choice answerer adapters.
/// Placeholders in angle brackets are substituted per request.
pub const ANSWERER_PROMPT_TEMPLATE: &str = "System:\n\
You are a helpful assistant.\n\
User:\n\
<video>\n\
Question: <question>\n\
Options:\n\
(A) <Option_A>\n\
(B) <Option_B>\n\
(C) <Option_C>\n\
(D) <Option_D>\n\
\n\
Please only give the best option.\n\
Best Option:\n\
Assistant:";

/// A fixed-budget frame pick: sorted, uniformly spaced times inside the
/// interval that was actually used.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameSelection {
    pub interval_used: TimeInterval,
    pub frame_times: Vec<f64>,
    pub budget: usize,
}

/// Grows an interval shorter than `min_len_s` symmetrically about its
/// midpoint, then slides (never shrinks) it back inside `[0, duration_s]`.
/// Videos shorter than `min_len_s` yield the full span. Idempotent.
pub fn extend_interval(
    interval: &TimeInterval,
    min_len_s: f64,
    duration_s: f64,
) -> Result<TimeInterval> {
    if !min_len_s.is_finite() || min_len_s <= 0.0 {
        return Err(Error::OutOfRange {
            what: "minimum span",
            value: min_len_s,
            expected: "> 0",
        });
    }
    if interval.start_s() < 0.0 || interval.end_s() > duration_s + 1e-9 {
        return Err(Error::IntervalOutsideVideo {
            start_s: interval.start_s(),
            end_s: interval.end_s(),
            duration_s,
        });
    }
    if duration_s < min_len_s {
        return TimeInterval::new(0.0, duration_s);
    }
    // the relative slack keeps re-extension a bitwise no-op when a prior
    // extension landed an ulp short of min_len_s
    if interval.duration_s() >= min_len_s * (1.0 - 1e-12) {
        return Ok(*interval);
    }
    let half = 0.5 * min_len_s;
    let mid = interval.midpoint_s();
    let mut start = mid - half;
    let mut end = mid + half;
    if start < 0.0 {
        end -= start;
        start = 0.0;
    }
    if end > duration_s {
        start -= end - duration_s;
        end = duration_s;
    }
    TimeInterval::new(start.max(0.0), end)
}

/// Midpoint-uniform sampling: `budget` frame times at
/// `start + (k + 0.5) · len / budget`.
pub fn uniform_frames(interval: &TimeInterval, budget: usize) -> Result<FrameSelection> {
    if budget == 0 {
        return Err(Error::OutOfRange {
            what: "frame budget",
            value: 0.0,
            expected: ">= 1",
        });
    }
    let step = interval.duration_s() / budget as f64;
    let frame_times = (0..budget)
        .map(|k| interval.start_s() + (k as f64 + 0.5) * step)
        .collect();
    Ok(FrameSelection {
        interval_used: *interval,
        frame_times,
        budget,
    })
}

// ---------------------------------------------------------------------------
// Answerer hook and comparison harness
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnswerOutcome {
    Correct,
    Incorrect,
    /// The video carries no information for the question at all.
    Unanswerable,
}

/// Everything an answerer adapter gets to see for one request. Frame
/// features stand in for the decoded frames named in `frame_times`.
pub struct QaContext<'a> {
    pub question: &'a str,
    pub options: &'a [String],
    pub frames: &'a FrameSequence,
}

pub trait Answerer: Send + Sync {
    fn answer(&self, ctx: &QaContext<'_>, frame_times: &[f64]) -> Result<AnswerOutcome>;
}

/// One QA case: the question, the video, and the interval a grounder
/// predicted for it.
pub struct QaCase {
    pub sample_id: String,
    pub question: String,
    pub options: Vec<String>,
    pub duration_s: f64,
    pub grounded: TimeInterval,
    pub frames: FrameSequence,
}

/// Accuracy of grounded frame selection versus the uniform-sampling
/// baseline, under the same answerer and frame budget.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaComparison {
    pub n: usize,
    pub answered: usize,
    pub unanswerable: usize,
    pub quarantined: usize,
    pub grounded_correct: usize,
    pub uniform_correct: usize,
    pub grounded_accuracy: f64,
    pub uniform_accuracy: f64,
}

/// Runs both conditions per case: frames picked inside the (extended)
/// grounded interval versus frames picked uniformly over the full video.
/// Cases the answerer flags unanswerable under both conditions count in
/// `unanswerable`; hook failures quarantine the case.
pub fn qa_compare(
    cases: &[QaCase],
    answerer: &dyn Answerer,
    budget: usize,
    min_len_s: f64,
) -> Result<QaComparison> {
    if cases.is_empty() {
        return Err(Error::EmptyInput { what: "qa cases" });
    }
    let mut report = QaComparison {
        n: cases.len(),
        answered: 0,
        unanswerable: 0,
        quarantined: 0,
        grounded_correct: 0,
        uniform_correct: 0,
        grounded_accuracy: 0.0,
        uniform_accuracy: 0.0,
    };

    for case in cases {
        let run = || -> Result<(AnswerOutcome, AnswerOutcome)> {
            let ctx = QaContext {
                question: &case.question,
                options: &case.options,
                frames: &case.frames,
            };
            let grounded_iv = extend_interval(&case.grounded, min_len_s, case.duration_s)?;
            let grounded_pick = uniform_frames(&grounded_iv, budget)?;
            let full = TimeInterval::new(0.0, case.duration_s)?;
            let uniform_pick = uniform_frames(&full, budget)?;
            Ok((
                answerer.answer(&ctx, &grounded_pick.frame_times)?,
                answerer.answer(&ctx, &uniform_pick.frame_times)?,
            ))
        };
        match run() {
            Ok((AnswerOutcome::Unanswerable, AnswerOutcome::Unanswerable)) => {
                report.unanswerable += 1;
            }
            Ok((grounded, uniform)) => {
                report.answered += 1;
                if grounded == AnswerOutcome::Correct {
                    report.grounded_correct += 1;
                }
                if uniform == AnswerOutcome::Correct {
                    report.uniform_correct += 1;
                }
            }
            Err(_) => report.quarantined += 1,
        }
    }

    if report.answered > 0 {
        report.grounded_accuracy = report.grounded_correct as f64 / report.answered as f64;
        report.uniform_accuracy = report.uniform_correct as f64 / report.answered as f64;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(s: f64, e: f64) -> TimeInterval {
        TimeInterval::new(s, e).unwrap()
    }

    #[test]
    fn extend_expands_about_midpoint() {
        // midpoint 105, half-width 16
        assert_eq!(
            extend_interval(&iv(100.0, 110.0), 32.0, 1000.0).unwrap(),
            iv(89.0, 121.0)
        );
    }

    #[test]
    fn extend_slides_off_the_left_edge() {
        // symmetric extension [-8.5, 23.5] slides right by 8.5
        assert_eq!(
            extend_interval(&iv(5.0, 10.0), 32.0, 1000.0).unwrap(),
            iv(0.0, 32.0)
        );
    }

    #[test]
    fn extend_slides_off_the_right_edge() {
        assert_eq!(
            extend_interval(&iv(95.0, 99.0), 32.0, 100.0).unwrap(),
            iv(68.0, 100.0)
        );
    }

    #[test]
    fn extend_leaves_long_intervals_alone() {
        assert_eq!(
            extend_interval(&iv(0.0, 40.0), 32.0, 1000.0).unwrap(),
            iv(0.0, 40.0)
        );
    }

    #[test]
    fn extend_short_video_returns_full_span() {
        assert_eq!(
            extend_interval(&iv(2.0, 5.0), 32.0, 20.0).unwrap(),
            iv(0.0, 20.0)
        );
    }

    #[test]
    fn extend_rejects_interval_outside_video() {
        assert!(extend_interval(&iv(90.0, 120.0), 32.0, 100.0).is_err());
    }

    #[test]
    fn uniform_frames_midpoint_rule() {
        let sel = uniform_frames(&iv(0.0, 32.0), 32).unwrap();
        assert_eq!(sel.frame_times.len(), 32);
        assert_eq!(sel.frame_times[0], 0.5);
        assert_eq!(sel.frame_times[31], 31.5);
    }

    #[test]
    fn uniform_frames_budget_one_is_midpoint() {
        let sel = uniform_frames(&iv(10.0, 20.0), 1).unwrap();
        assert_eq!(sel.frame_times, vec![15.0]);
    }

    proptest! {
        #[test]
        fn extend_is_idempotent_and_sized(
            s in 0.0f64..900.0,
            len in 0.1f64..80.0,
            duration in 1000.0f64..2000.0,
        ) {
            let interval = iv(s, s + len);
            let once = extend_interval(&interval, 32.0, duration).unwrap();
            let twice = extend_interval(&once, 32.0, duration).unwrap();
            prop_assert_eq!(once, twice);
            // length is exactly max(min(32, duration), original length)
            let want = 32.0f64.min(duration).max(len);
            prop_assert!((once.duration_s() - want).abs() < 1e-9);
            prop_assert!(once.start_s() >= 0.0 && once.end_s() <= duration + 1e-9);
        }

        #[test]
        fn uniform_spacing_is_constant(
            s in 0.0f64..100.0,
            len in 0.5f64..500.0,
            budget in 1usize..64,
        ) {
            let sel = uniform_frames(&iv(s, s + len), budget).unwrap();
            let step = len / budget as f64;
            for w in sel.frame_times.windows(2) {
                let rel = ((w[1] - w[0]) - step).abs() / step;
                prop_assert!(rel <= 1e-9);
            }
            // containment: min >= start, max < end
            prop_assert!(sel.frame_times[0] >= s);
            prop_assert!(*sel.frame_times.last().unwrap() < s + len);
        }
    }
}
