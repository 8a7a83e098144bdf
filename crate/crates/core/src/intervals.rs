//! Exact interval algebra and the grounding metrics built on it.
//!
//! Everything here is a pure function over immutable values. IoU is computed
//! in closed form; the unit-cell counting oracle used to cross-check it lives
//! in the test module only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed time span `[start_s, end_s]` in seconds with strictly positive
/// duration. Zero-length intervals are rejected at construction: silent
/// zero-duration spans mask upstream bugs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "(f64, f64)", into = "(f64, f64)")]
pub struct TimeInterval {
    start_s: f64,
    end_s: f64,
}

impl TimeInterval {
    pub fn new(start_s: f64, end_s: f64) -> Result<Self> {
        if !start_s.is_finite() || !end_s.is_finite() || start_s < 0.0 || end_s <= start_s {
            return Err(Error::InvalidInterval { start_s, end_s });
        }
        Ok(Self { start_s, end_s })
    }

    pub fn start_s(&self) -> f64 {
        self.start_s
    }

    pub fn end_s(&self) -> f64 {
        self.end_s
    }

    pub fn duration_s(&self) -> f64 {
        self.end_s - self.start_s
    }

    pub fn midpoint_s(&self) -> f64 {
        0.5 * (self.start_s + self.end_s)
    }

    /// Length of the overlap with `other`; zero when disjoint.
    pub fn intersection_s(&self, other: &TimeInterval) -> f64 {
        (self.end_s.min(other.end_s) - self.start_s.max(other.start_s)).max(0.0)
    }

    pub fn overlaps(&self, other: &TimeInterval) -> bool {
        self.intersection_s(other) > 0.0
    }

    pub fn contains(&self, other: &TimeInterval) -> bool {
        self.start_s <= other.start_s && other.end_s <= self.end_s
    }

    pub fn contains_time(&self, t: f64) -> bool {
        self.start_s <= t && t <= self.end_s
    }

    pub fn translated(&self, offset_s: f64) -> Result<Self> {
        Self::new(self.start_s + offset_s, self.end_s + offset_s)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if !factor.is_finite() || factor <= 0.0 {
            return Err(Error::OutOfRange {
                what: "scale factor",
                value: factor,
                expected: "> 0",
            });
        }
        Self::new(self.start_s * factor, self.end_s * factor)
    }

    /// Overlap with `bounds` as an interval, or `None` when the overlap has
    /// zero length.
    pub fn clipped_to(&self, bounds: &TimeInterval) -> Option<TimeInterval> {
        let start = self.start_s.max(bounds.start_s);
        let end = self.end_s.min(bounds.end_s);
        TimeInterval::new(start, end).ok()
    }
}

impl TryFrom<(f64, f64)> for TimeInterval {
    type Error = Error;

    fn try_from(pair: (f64, f64)) -> Result<Self> {
        TimeInterval::new(pair.0, pair.1)
    }
}

impl From<TimeInterval> for (f64, f64) {
    fn from(iv: TimeInterval) -> (f64, f64) {
        (iv.start_s, iv.end_s)
    }
}

impl std::fmt::Display for TimeInterval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}, {}]", self.start_s, self.end_s)
    }
}

/// A dimensionless overlap ratio in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct IoUScore(f64);

impl IoUScore {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || !(0.0..=1.0).contains(&value) {
            return Err(Error::OutOfRange {
                what: "IoU score",
                value,
                expected: "[0, 1]",
            });
        }
        Ok(Self(value))
    }

    pub fn value(&self) -> f64 {
        self.0
    }
}

/// Intersection-over-union of two spans: `|a ∩ b| / |a ∪ b|` with the union
/// length computed as `|a| + |b| - |a ∩ b|`. Symmetric in its arguments.
pub fn iou(a: &TimeInterval, b: &TimeInterval) -> IoUScore {
    let inter = a.intersection_s(b);
    let union = a.duration_s() + b.duration_s() - inter;
    // union >= max duration > 0 for valid intervals
    IoUScore(inter / union)
}

/// Arithmetic mean of per-sample IoU scores.
pub fn mean_iou(scores: &[IoUScore]) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::EmptyInput { what: "IoU scores" });
    }
    Ok(scores.iter().map(|s| s.0).sum::<f64>() / scores.len() as f64)
}

/// Fraction of scores at or above the threshold `tau`.
pub fn recall_at(scores: &[IoUScore], tau: f64) -> Result<f64> {
    if scores.is_empty() {
        return Err(Error::EmptyInput { what: "IoU scores" });
    }
    if !tau.is_finite() || tau <= 0.0 || tau > 1.0 {
        return Err(Error::OutOfRange {
            what: "recall threshold",
            value: tau,
            expected: "(0, 1]",
        });
    }
    let hits = scores.iter().filter(|s| s.0 >= tau).count();
    Ok(hits as f64 / scores.len() as f64)
}

/// Normalized temporal position of the target: interval midpoint divided by
/// the video duration, in `[0, 1]`.
pub fn query_center(gt: &TimeInterval, video_duration_s: f64) -> Result<f64> {
    if !video_duration_s.is_finite() || video_duration_s <= 0.0 {
        return Err(Error::OutOfRange {
            what: "video duration",
            value: video_duration_s,
            expected: "> 0",
        });
    }
    if gt.start_s() < 0.0 || gt.end_s() > video_duration_s {
        return Err(Error::IntervalOutsideVideo {
            start_s: gt.start_s(),
            end_s: gt.end_s(),
            duration_s: video_duration_s,
        });
    }
    Ok(gt.midpoint_s() / video_duration_s)
}

/// Decile-style bin index for a center in `[0, 1]`: half-open bins
/// `[k/bins, (k+1)/bins)` with the last bin closed at 1.
pub fn center_bin(center: f64, bins: usize) -> Result<usize> {
    if bins == 0 {
        return Err(Error::OutOfRange {
            what: "bin count",
            value: 0.0,
            expected: ">= 1",
        });
    }
    if !center.is_finite() || !(0.0..=1.0).contains(&center) {
        return Err(Error::OutOfRange {
            what: "query center",
            value: center,
            expected: "[0, 1]",
        });
    }
    Ok(((center * bins as f64).floor() as usize).min(bins - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn iv(start: f64, end: f64) -> TimeInterval {
        TimeInterval::new(start, end).unwrap()
    }

    /// Unit-cell counting oracle for integer-endpoint intervals: walk every
    /// cell `[i, i+1)` of the covering grid and count membership directly.
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

    #[test]
    fn rejects_invalid_intervals() {
        assert!(TimeInterval::new(5.0, 5.0).is_err());
        assert!(TimeInterval::new(8.0, 3.0).is_err());
        assert!(TimeInterval::new(-1.0, 3.0).is_err());
        assert!(TimeInterval::new(0.0, f64::NAN).is_err());
        assert!(TimeInterval::new(0.0, f64::INFINITY).is_err());
    }

    #[test]
    fn iou_identity_and_disjoint() {
        assert_eq!(iou(&iv(5.0, 10.0), &iv(5.0, 10.0)).value(), 1.0);
        assert_eq!(iou(&iv(0.0, 5.0), &iv(5.0, 10.0)).value(), 0.0);
    }

    #[test]
    fn iou_partial_overlap_matches_grid_oracle() {
        // grid oracle: inter = 4 cells, union = 8 cells
        assert_eq!(grid_iou((2, 8), (4, 10)), 0.5);
        assert_eq!(iou(&iv(2.0, 8.0), &iv(4.0, 10.0)).value(), 0.5);
    }

    #[test]
    fn mean_iou_examples() {
        let one = [IoUScore::new(1.0).unwrap()];
        assert_eq!(mean_iou(&one).unwrap(), 1.0);

        let mixed: Vec<_> = [0.8, 0.4, 0.6]
            .iter()
            .map(|&v| IoUScore::new(v).unwrap())
            .collect();
        // hand sum: (0.8 + 0.4 + 0.6) / 3
        assert!((mean_iou(&mixed).unwrap() - 0.6).abs() < 1e-12);

        let zeros: Vec<_> = [0.0, 0.0].iter().map(|&v| IoUScore::new(v).unwrap()).collect();
        assert_eq!(mean_iou(&zeros).unwrap(), 0.0);

        assert!(mean_iou(&[]).is_err());
    }

    #[test]
    fn recall_at_examples() {
        let scores: Vec<_> = [0.8, 0.4, 0.6]
            .iter()
            .map(|&v| IoUScore::new(v).unwrap())
            .collect();
        assert!((recall_at(&scores, 0.5).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((recall_at(&scores, 0.7).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        // tau below every positive score passes everything
        assert_eq!(recall_at(&scores, 1e-9).unwrap(), 1.0);

        assert!(recall_at(&[], 0.5).is_err());
        assert!(recall_at(&scores, 0.0).is_err());
        assert!(recall_at(&scores, 1.5).is_err());
    }

    #[test]
    fn query_center_examples() {
        assert_eq!(query_center(&iv(0.0, 10.0), 10.0).unwrap(), 0.5);
        assert_eq!(query_center(&iv(90.0, 100.0), 100.0).unwrap(), 0.95);
        assert_eq!(query_center(&iv(0.0, 2.0), 100.0).unwrap(), 0.01);
        assert!(query_center(&iv(90.0, 110.0), 100.0).is_err());
    }

    #[test]
    fn center_bin_examples() {
        assert_eq!(center_bin(0.05, 10).unwrap(), 0);
        assert_eq!(center_bin(1.0, 10).unwrap(), 9);
        assert_eq!(center_bin(0.30, 10).unwrap(), 3);
        assert!(center_bin(1.2, 10).is_err());
        assert!(center_bin(0.5, 0).is_err());
    }

    #[test]
    fn recall_is_one_at_or_below_minimum_score() {
        let scores: Vec<_> = [0.35, 0.5, 0.9]
            .iter()
            .map(|&v| IoUScore::new(v).unwrap())
            .collect();
        assert_eq!(recall_at(&scores, 0.35).unwrap(), 1.0);
    }

    proptest! {
        #[test]
        fn closed_form_matches_grid_oracle(
            s1 in 0i64..500, d1 in 1i64..200,
            s2 in 0i64..500, d2 in 1i64..200,
        ) {
            let a = (s1, s1 + d1);
            let b = (s2, s2 + d2);
            let exact = iou(
                &iv(a.0 as f64, a.1 as f64),
                &iv(b.0 as f64, b.1 as f64),
            ).value();
            // integer counts divide exactly the same way in f64
            prop_assert_eq!(exact, grid_iou(a, b));
        }

        #[test]
        fn iou_is_symmetric(
            s1 in 0.0f64..1e4, d1 in 0.01f64..1e3,
            s2 in 0.0f64..1e4, d2 in 0.01f64..1e3,
        ) {
            let a = iv(s1, s1 + d1);
            let b = iv(s2, s2 + d2);
            prop_assert_eq!(iou(&a, &b).value(), iou(&b, &a).value());
        }

        #[test]
        fn iou_self_is_one(s in 0.0f64..1e4, d in 0.01f64..1e3) {
            let a = iv(s, s + d);
            prop_assert_eq!(iou(&a, &a).value(), 1.0);
        }

        #[test]
        fn shift_invariance_on_integer_grid(
            s1 in 0i64..500, d1 in 1i64..100,
            s2 in 0i64..500, d2 in 1i64..100,
            delta in 0i64..100_000,
        ) {
            let a = iv(s1 as f64, (s1 + d1) as f64);
            let b = iv(s2 as f64, (s2 + d2) as f64);
            let a2 = a.translated(delta as f64).unwrap();
            let b2 = b.translated(delta as f64).unwrap();
            // integer sums are exact in f64, so equality is bitwise
            prop_assert_eq!(iou(&a2, &b2).value(), iou(&a, &b).value());
        }

        #[test]
        fn scale_invariance_power_of_two(
            s1 in 0i64..500, d1 in 1i64..100,
            s2 in 0i64..500, d2 in 1i64..100,
            exp in -8i32..8,
        ) {
            let k = 2.0f64.powi(exp);
            let a = iv(s1 as f64, (s1 + d1) as f64);
            let b = iv(s2 as f64, (s2 + d2) as f64);
            let a2 = a.scaled(k).unwrap();
            let b2 = b.scaled(k).unwrap();
            // powers of two scale f64 exactly
            prop_assert_eq!(iou(&a2, &b2).value(), iou(&a, &b).value());
        }

        #[test]
        fn scale_invariance_arbitrary_factor(
            s1 in 0.0f64..1e3, d1 in 0.01f64..1e2,
            s2 in 0.0f64..1e3, d2 in 0.01f64..1e2,
            k in 0.01f64..100.0,
        ) {
            let a = iv(s1, s1 + d1);
            let b = iv(s2, s2 + d2);
            let before = iou(&a, &b).value();
            let after = iou(&a.scaled(k).unwrap(), &b.scaled(k).unwrap()).value();
            prop_assert!((before - after).abs() <= 1e-12);
        }

        #[test]
        fn recall_non_increasing_in_tau(
            values in proptest::collection::vec(0.0f64..=1.0, 1..50),
            t1 in 0.01f64..=1.0,
            t2 in 0.01f64..=1.0,
        ) {
            let scores: Vec<_> = values.iter().map(|&v| IoUScore::new(v).unwrap()).collect();
            let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
            prop_assert!(recall_at(&scores, lo).unwrap() >= recall_at(&scores, hi).unwrap());
        }

        #[test]
        fn center_bin_edges(center in 0.0f64..=1.0, bins in 1usize..20) {
            let bin = center_bin(center, bins).unwrap();
            prop_assert!(bin < bins);
            // bin edges: [k/bins, (k+1)/bins), last bin closed
            let lo = bin as f64 / bins as f64;
            prop_assert!(center >= lo - 1e-12);
        }
    }
}
