//! Exercises the C ABI surface exactly as a foreign caller would: raw
//! pointers, status codes, opaque handles.

use std::ffi::CString;

use groundscope_ffi::{
    gs_center_bin, gs_extend_interval, gs_grounder_free, gs_grounder_new, gs_grounder_run,
    gs_iou, gs_mean_iou, gs_position_dispersion, gs_position_gap, gs_query_center,
    gs_query_embedding_from_text, gs_recall_at, gs_status_message, gs_uniform_frames,
    GsEngineConfig, GsGroundingOutput, GsInterval, GsStatus,
};

fn iv(start_s: f64, end_s: f64) -> GsInterval {
    GsInterval { start_s, end_s }
}

#[test]
fn interval_metrics_through_the_abi() {
    let mut out = 0.0f64;
    unsafe {
        assert_eq!(gs_iou(iv(2.0, 8.0), iv(4.0, 10.0), &mut out), GsStatus::Ok);
        assert_eq!(out, 0.5);

        assert_eq!(
            gs_iou(iv(8.0, 2.0), iv(4.0, 10.0), &mut out),
            GsStatus::InvalidInterval
        );
        assert_eq!(
            gs_iou(iv(2.0, 8.0), iv(4.0, 10.0), std::ptr::null_mut()),
            GsStatus::NullPointer
        );

        let scores = [0.8, 0.4, 0.6];
        assert_eq!(gs_mean_iou(scores.as_ptr(), 3, &mut out), GsStatus::Ok);
        assert!((out - 0.6).abs() < 1e-12);
        assert_eq!(gs_recall_at(scores.as_ptr(), 3, 0.5, &mut out), GsStatus::Ok);
        assert!((out - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(
            gs_mean_iou(std::ptr::null(), 3, &mut out),
            GsStatus::NullPointer
        );
        assert_eq!(gs_mean_iou(scores.as_ptr(), 0, &mut out), GsStatus::EmptyInput);

        assert_eq!(gs_query_center(iv(90.0, 100.0), 100.0, &mut out), GsStatus::Ok);
        assert_eq!(out, 0.95);

        let mut bin = 0usize;
        assert_eq!(gs_center_bin(1.0, 10, &mut bin), GsStatus::Ok);
        assert_eq!(bin, 9);
        assert_eq!(gs_center_bin(1.5, 10, &mut bin), GsStatus::OutOfRange);
    }
}

#[test]
fn dispersion_and_gap_through_the_abi() {
    let mut out = 0.0f64;
    unsafe {
        let row = [20.0, 13.4, 4.1];
        assert_eq!(gs_position_dispersion(row.as_ptr(), 3, &mut out), GsStatus::Ok);
        assert!((out - 8.0).abs() <= 0.1);

        let deciles = [
            0.417, 0.368, 0.615, 0.222, 0.250, 0.158, 0.278, 0.235, 0.133, 0.154,
        ];
        assert_eq!(gs_position_gap(deciles.as_ptr(), 10, &mut out), GsStatus::Ok);
        assert!((out - 78.0).abs() <= 1.0);

        let zeros = [0.0, 0.0];
        assert_eq!(
            gs_position_gap(zeros.as_ptr(), 2, &mut out),
            GsStatus::OutOfRange
        );
    }
}

#[test]
fn qa_helpers_through_the_abi() {
    unsafe {
        let mut extended = iv(0.0, 0.0);
        assert_eq!(
            gs_extend_interval(iv(100.0, 110.0), 32.0, 1000.0, &mut extended),
            GsStatus::Ok
        );
        assert_eq!(extended, iv(89.0, 121.0));

        let mut times = [0.0f64; 32];
        assert_eq!(
            gs_uniform_frames(iv(0.0, 32.0), 32, times.as_mut_ptr()),
            GsStatus::Ok
        );
        assert_eq!(times[0], 0.5);
        assert_eq!(times[31], 31.5);
    }
}

#[test]
fn grounding_session_round_trip() {
    let dim = 4usize;
    let n = 120usize;
    let text = CString::new("ffi smoke query").unwrap();
    let mut embedding = vec![0.0f64; dim];
    unsafe {
        assert_eq!(
            gs_query_embedding_from_text(text.as_ptr(), dim, embedding.as_mut_ptr()),
            GsStatus::Ok
        );
    }

    // plant the embedding into frames 40..50
    let mut features = vec![0.0f64; n * dim];
    for frame in 40..50 {
        features[frame * dim..(frame + 1) * dim].copy_from_slice(&embedding);
    }

    unsafe {
        let handle = gs_grounder_new(features.as_ptr(), n, dim, 1.0, 0.0, 1);
        assert!(!handle.is_null());

        let config = GsEngineConfig {
            pool_factor: 4,
            theta: 0.5,
            delta: 0.2,
            margin: 1,
        };
        let mut out = GsGroundingOutput {
            window: iv(0.0, 1.0),
            interval: iv(0.0, 1.0),
            stage1_tokens: 0,
            stage2_tokens: 0,
            degenerate: false,
        };
        assert_eq!(
            gs_grounder_run(handle, embedding.as_ptr(), dim, true, config, &mut out),
            GsStatus::Ok
        );
        assert_eq!(out.interval, iv(40.0, 50.0));
        assert_eq!(out.stage1_tokens, 30); // ceil(120 / 4)
        assert!(out.window.start_s <= 40.0 && out.window.end_s >= 50.0);
        assert!(!out.degenerate);

        // single-stage over the same session
        assert_eq!(
            gs_grounder_run(handle, embedding.as_ptr(), dim, false, config, &mut out),
            GsStatus::Ok
        );
        assert_eq!(out.stage1_tokens, 0);
        assert_eq!(out.stage2_tokens, 120);

        assert_eq!(
            gs_grounder_run(
                std::ptr::null(),
                embedding.as_ptr(),
                dim,
                true,
                config,
                &mut out
            ),
            GsStatus::NullPointer
        );
        gs_grounder_free(handle);
        gs_grounder_free(std::ptr::null_mut());
    }

    // bad construction returns null rather than a handle
    unsafe {
        assert!(gs_grounder_new(std::ptr::null(), 10, 4, 1.0, 0.0, 1).is_null());
        assert!(gs_grounder_new(features.as_ptr(), 0, dim, 1.0, 0.0, 1).is_null());
    }
}

#[test]
fn status_messages_are_static_strings() {
    for status in [GsStatus::Ok, GsStatus::NullPointer, GsStatus::Internal] {
        let ptr = gs_status_message(status);
        assert!(!ptr.is_null());
        let text = unsafe { std::ffi::CStr::from_ptr(ptr) }.to_str().unwrap();
        assert!(!text.is_empty());
    }
}
