//! C ABI for the grounding toolkit.
//!
//! Scalar metric helpers operate on caller-owned buffers; grounding sessions
//! go through an opaque handle created from a feature matrix. Every function
//! returns a status code and never unwinds across the boundary. The header
//! is generated into `include/groundscope.h` at build time.

use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use groundscope::engine::{
    ground_progressive, ground_single_stage, EngineConfig, InnerProductScorer, Query,
};
use groundscope::error::Error;
use groundscope::intervals::{self, IoUScore, TimeInterval};
use groundscope::model::FrameSequence;
use groundscope::qa;
use groundscope::synthetic;

/// Status code returned by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInterval = 2,
    EmptyInput = 3,
    OutOfRange = 4,
    DimensionMismatch = 5,
    NonFinite = 6,
    Utf8 = 7,
    Internal = 8,
}

impl From<&Error> for GsStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::InvalidInterval { .. } | Error::IntervalOutsideVideo { .. } => {
                GsStatus::InvalidInterval
            }
            Error::EmptyInput { .. } => GsStatus::EmptyInput,
            Error::OutOfRange { .. } | Error::AllZeroRecalls => GsStatus::OutOfRange,
            Error::DimensionMismatch { .. } => GsStatus::DimensionMismatch,
            Error::NonFinite { .. } => GsStatus::NonFinite,
            _ => GsStatus::Internal,
        }
    }
}

/// A closed time span in seconds.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GsInterval {
    pub start_s: f64,
    pub end_s: f64,
}

impl GsInterval {
    fn to_interval(self) -> Result<TimeInterval, Error> {
        TimeInterval::new(self.start_s, self.end_s)
    }

    fn from_interval(iv: &TimeInterval) -> Self {
        Self {
            start_s: iv.start_s(),
            end_s: iv.end_s(),
        }
    }
}

/// Result of one grounding run.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GsGroundingOutput {
    /// Stage-1 window (full timeline in single-stage mode).
    pub window: GsInterval,
    /// Final predicted interval.
    pub interval: GsInterval,
    /// Visual entries scored in stage 1 (0 in single-stage mode).
    pub stage1_tokens: usize,
    /// Visual entries scored in stage 2.
    pub stage2_tokens: usize,
    /// True when every coarse super-group scored equal and the window
    /// defaulted to the full timeline.
    pub degenerate: bool,
}

/// Grounding knobs; `margin = UINT64_MAX` pads the window to the full
/// timeline.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GsEngineConfig {
    pub pool_factor: usize,
    pub theta: f64,
    pub delta: f64,
    pub margin: u64,
}

/// Opaque grounding session over one video's feature matrix.
pub struct GsGrounder {
    frames: FrameSequence,
}

fn guard(body: impl FnOnce() -> GsStatus) -> GsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => GsStatus::Internal,
    }
}

unsafe fn slice_arg<'a>(ptr: *const f64, len: usize) -> Option<&'a [f64]> {
    if ptr.is_null() {
        None
    } else {
        Some(slice::from_raw_parts(ptr, len))
    }
}

/// Intersection-over-union of two intervals.
///
/// # Safety
/// `out` must point to writable memory for one `f64`.
#[no_mangle]
pub unsafe extern "C" fn gs_iou(a: GsInterval, b: GsInterval, out: *mut f64) -> GsStatus {
    guard(|| {
        if out.is_null() {
            return GsStatus::NullPointer;
        }
        let (a, b) = match (a.to_interval(), b.to_interval()) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return GsStatus::from(&e),
        };
        unsafe { *out = intervals::iou(&a, &b).value() };
        GsStatus::Ok
    })
}

/// Arithmetic mean of `len` IoU scores in `[0, 1]`.
///
/// # Safety
/// `scores` must point to `len` readable `f64`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_mean_iou(scores: *const f64, len: usize, out: *mut f64) -> GsStatus {
    guard(|| {
        let (Some(values), false) = (unsafe { slice_arg(scores, len) }, out.is_null()) else {
            return GsStatus::NullPointer;
        };
        let parsed: Result<Vec<IoUScore>, Error> =
            values.iter().map(|&v| IoUScore::new(v)).collect();
        match parsed.and_then(|s| intervals::mean_iou(&s)) {
            Ok(v) => {
                unsafe { *out = v };
                GsStatus::Ok
            }
            Err(e) => GsStatus::from(&e),
        }
    })
}

/// Fraction of `len` IoU scores at or above `tau`.
///
/// # Safety
/// `scores` must point to `len` readable `f64`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_recall_at(
    scores: *const f64,
    len: usize,
    tau: f64,
    out: *mut f64,
) -> GsStatus {
    guard(|| {
        let (Some(values), false) = (unsafe { slice_arg(scores, len) }, out.is_null()) else {
            return GsStatus::NullPointer;
        };
        let parsed: Result<Vec<IoUScore>, Error> =
            values.iter().map(|&v| IoUScore::new(v)).collect();
        match parsed.and_then(|s| intervals::recall_at(&s, tau)) {
            Ok(v) => {
                unsafe { *out = v };
                GsStatus::Ok
            }
            Err(e) => GsStatus::from(&e),
        }
    })
}

/// Normalized temporal position of an interval's midpoint in its video.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_query_center(
    gt: GsInterval,
    video_duration_s: f64,
    out: *mut f64,
) -> GsStatus {
    guard(|| {
        if out.is_null() {
            return GsStatus::NullPointer;
        }
        let gt = match gt.to_interval() {
            Ok(v) => v,
            Err(e) => return GsStatus::from(&e),
        };
        match intervals::query_center(&gt, video_duration_s) {
            Ok(v) => {
                unsafe { *out = v };
                GsStatus::Ok
            }
            Err(e) => GsStatus::from(&e),
        }
    })
}

/// Half-open bin index for a center in `[0, 1]`; the last bin is closed.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_center_bin(center: f64, bins: usize, out: *mut usize) -> GsStatus {
    guard(|| {
        if out.is_null() {
            return GsStatus::NullPointer;
        }
        match intervals::center_bin(center, bins) {
            Ok(v) => {
                unsafe { *out = v };
                GsStatus::Ok
            }
            Err(e) => GsStatus::from(&e),
        }
    })
}

/// Sample standard deviation (divisor n-1) of `len` recall values.
///
/// # Safety
/// `values` must point to `len` readable `f64`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_position_dispersion(
    values: *const f64,
    len: usize,
    out: *mut f64,
) -> GsStatus {
    guard(|| {
        let (Some(values), false) = (unsafe { slice_arg(values, len) }, out.is_null()) else {
            return GsStatus::NullPointer;
        };
        match groundscope::evaluation::position_dispersion(values) {
            Ok(v) => {
                unsafe { *out = v };
                GsStatus::Ok
            }
            Err(e) => GsStatus::from(&e),
        }
    })
}

/// Relative best-worst gap `(max - min) / max` as a percentage.
///
/// # Safety
/// `values` must point to `len` readable `f64`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_position_gap(
    values: *const f64,
    len: usize,
    out: *mut f64,
) -> GsStatus {
    guard(|| {
        let (Some(values), false) = (unsafe { slice_arg(values, len) }, out.is_null()) else {
            return GsStatus::NullPointer;
        };
        match groundscope::evaluation::position_gap(values) {
            Ok(v) => {
                unsafe { *out = v };
                GsStatus::Ok
            }
            Err(e) => GsStatus::from(&e),
        }
    })
}

/// Grows an interval to at least `min_len_s` about its midpoint, sliding to
/// stay inside `[0, duration_s]`.
///
/// # Safety
/// `out` must point to writable memory for one `GsInterval`.
#[no_mangle]
pub unsafe extern "C" fn gs_extend_interval(
    interval: GsInterval,
    min_len_s: f64,
    duration_s: f64,
    out: *mut GsInterval,
) -> GsStatus {
    guard(|| {
        if out.is_null() {
            return GsStatus::NullPointer;
        }
        let iv = match interval.to_interval() {
            Ok(v) => v,
            Err(e) => return GsStatus::from(&e),
        };
        match qa::extend_interval(&iv, min_len_s, duration_s) {
            Ok(v) => {
                unsafe { *out = GsInterval::from_interval(&v) };
                GsStatus::Ok
            }
            Err(e) => GsStatus::from(&e),
        }
    })
}

/// Midpoint-uniform frame times: writes `budget` values into `out_times`.
///
/// # Safety
/// `out_times` must point to writable memory for `budget` `f64`.
#[no_mangle]
pub unsafe extern "C" fn gs_uniform_frames(
    interval: GsInterval,
    budget: usize,
    out_times: *mut f64,
) -> GsStatus {
    guard(|| {
        if out_times.is_null() {
            return GsStatus::NullPointer;
        }
        let iv = match interval.to_interval() {
            Ok(v) => v,
            Err(e) => return GsStatus::from(&e),
        };
        match qa::uniform_frames(&iv, budget) {
            Ok(selection) => {
                let out = unsafe { slice::from_raw_parts_mut(out_times, budget) };
                out.copy_from_slice(&selection.frame_times);
                GsStatus::Ok
            }
            Err(e) => GsStatus::from(&e),
        }
    })
}

/// Deterministic unit embedding for a query text: writes `dim` values into
/// `out`.
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must hold `dim` `f64`.
#[no_mangle]
pub unsafe extern "C" fn gs_query_embedding_from_text(
    text: *const c_char,
    dim: usize,
    out: *mut f64,
) -> GsStatus {
    guard(|| {
        if text.is_null() || out.is_null() {
            return GsStatus::NullPointer;
        }
        if dim == 0 {
            return GsStatus::OutOfRange;
        }
        let text = match unsafe { std::ffi::CStr::from_ptr(text) }.to_str() {
            Ok(t) => t,
            Err(_) => return GsStatus::Utf8,
        };
        let emb = synthetic::embedding_from_text(text, dim);
        let out = unsafe { slice::from_raw_parts_mut(out, dim) };
        out.copy_from_slice(&emb);
        GsStatus::Ok
    })
}

/// Creates a grounding session over a row-major feature matrix of
/// `n_frames x dim` at `fps`, with frame times starting at `t0_s`. Returns
/// null on invalid input.
///
/// # Safety
/// `features` must point to `n_frames * dim` readable `f64`.
#[no_mangle]
pub unsafe extern "C" fn gs_grounder_new(
    features: *const f64,
    n_frames: usize,
    dim: usize,
    fps: f64,
    t0_s: f64,
    group_size: usize,
) -> *mut GsGrounder {
    let result = catch_unwind(AssertUnwindSafe(|| {
        let values = unsafe { slice_arg(features, n_frames.checked_mul(dim)?) }?;
        let rows: Vec<Vec<f64>> = values.chunks(dim.max(1)).map(|c| c.to_vec()).collect();
        let frames = FrameSequence::new("ffi", fps, t0_s, rows, group_size.max(1)).ok()?;
        Some(Box::new(GsGrounder { frames }))
    }));
    match result {
        Ok(Some(grounder)) => Box::into_raw(grounder),
        _ => std::ptr::null_mut(),
    }
}

/// Frees a grounding session. Passing null is a no-op.
///
/// # Safety
/// `handle` must have come from `gs_grounder_new` and not been freed.
#[no_mangle]
pub unsafe extern "C" fn gs_grounder_free(handle: *mut GsGrounder) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Runs progressive (or single-stage) grounding for one query embedding
/// against the session's video using the built-in inner-product scorer.
///
/// # Safety
/// `handle` must be a live session, `query_embedding` must hold `dim`
/// readable `f64`, and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gs_grounder_run(
    handle: *const GsGrounder,
    query_embedding: *const f64,
    dim: usize,
    progressive: bool,
    config: GsEngineConfig,
    out: *mut GsGroundingOutput,
) -> GsStatus {
    guard(|| {
        if handle.is_null() || out.is_null() {
            return GsStatus::NullPointer;
        }
        let Some(embedding) = (unsafe { slice_arg(query_embedding, dim) }) else {
            return GsStatus::NullPointer;
        };
        let grounder = unsafe { &*handle };
        let query = match Query::new("ffi query", embedding.to_vec()) {
            Ok(q) => q,
            Err(e) => return GsStatus::from(&e),
        };
        let engine = EngineConfig {
            pool_factor: config.pool_factor,
            theta: config.theta,
            delta: config.delta,
            margin: usize::try_from(config.margin).unwrap_or(usize::MAX),
            ..EngineConfig::default()
        };
        let result = if progressive {
            ground_progressive(&grounder.frames, &query, &InnerProductScorer, &engine)
        } else {
            ground_single_stage(&grounder.frames, &query, &InnerProductScorer, &engine)
        };
        match result {
            Ok(r) => {
                unsafe {
                    *out = GsGroundingOutput {
                        window: GsInterval::from_interval(&r.window.interval),
                        interval: GsInterval::from_interval(&r.interval),
                        stage1_tokens: r.trace.stage1_tokens,
                        stage2_tokens: r.trace.stage2_tokens,
                        degenerate: r.trace.degenerate_coarse,
                    };
                }
                GsStatus::Ok
            }
            Err(e) => GsStatus::from(&e),
        }
    })
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn gs_status_message(status: GsStatus) -> *const c_char {
    let message: &'static [u8] = match status {
        GsStatus::Ok => b"ok\0",
        GsStatus::NullPointer => b"null pointer argument\0",
        GsStatus::InvalidInterval => b"invalid interval\0",
        GsStatus::EmptyInput => b"empty input\0",
        GsStatus::OutOfRange => b"argument out of range\0",
        GsStatus::DimensionMismatch => b"dimension mismatch\0",
        GsStatus::NonFinite => b"non-finite value\0",
        GsStatus::Utf8 => b"invalid utf-8\0",
        GsStatus::Internal => b"internal error\0",
    };
    message.as_ptr() as *const c_char
}
