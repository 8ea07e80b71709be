//! Drives the subprocess backend against the bundled stub runner, covering
//! the happy path and every way a child can misbehave.

use std::time::{Duration, Instant};

use pico_core::backends::{Backend, BackendError, SubprocessBackend};
use pico_core::preprocess::{InputTensor, TensorData};

const STUB: &str = env!("CARGO_BIN_EXE_pico-stub-runner");

fn args(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn f32_tensor(values: &[f32]) -> InputTensor {
    InputTensor::new(vec![values.len()], TensorData::F32(values.to_vec()), None).unwrap()
}

#[test]
fn fixed_reply_round_trip() {
    let mut backend = SubprocessBackend::spawn(
        STUB,
        &args(&["--label", "yes", "--confidence", "0.99"]),
        5000,
    )
    .unwrap();
    assert_eq!(backend.model_name(), "stub-model");
    for _ in 0..5 {
        let out = backend.infer(&f32_tensor(&[0.25, 0.5])).unwrap();
        assert_eq!(out.label, "yes");
        assert_eq!(out.confidence, 0.99);
        assert_eq!(out.raw_scores, None);
    }
    backend.close();
    backend.close();
    match backend.infer(&f32_tensor(&[0.0])) {
        Err(BackendError::BackendCrashed(msg)) => assert!(msg.contains("closed"), "{msg}"),
        other => panic!("wrong result: {other:?}"),
    }
}

#[test]
fn payload_crosses_the_wire_in_little_endian_f32() {
    let mut backend =
        SubprocessBackend::spawn(STUB, &args(&["--echo-argmax"]), 5000).unwrap();
    let out = backend.infer(&f32_tensor(&[0.1, 0.9, 0.3, -2.0])).unwrap();
    assert_eq!(out.label, "class_1");
    assert_eq!(out.confidence, 0.9f32 as f64);
    let scores = out.raw_scores.unwrap();
    assert_eq!(scores.len(), 4);
    assert_eq!(scores[3], -2.0);
    backend.close();
}

#[test]
fn i16_tensors_are_promoted_to_f32_on_the_wire() {
    let mut backend =
        SubprocessBackend::spawn(STUB, &args(&["--echo-argmax"]), 5000).unwrap();
    let tensor = InputTensor::new(vec![3], TensorData::I16(vec![100, -5, 7]), None).unwrap();
    let out = backend.infer(&tensor).unwrap();
    assert_eq!(out.label, "class_0");
    assert_eq!(out.confidence, 100.0);
    backend.close();
}

#[test]
fn u8_tensors_go_through_unconverted() {
    let mut backend = SubprocessBackend::spawn(STUB, &args(&["--label", "q"]), 5000).unwrap();
    let tensor = InputTensor::new(vec![4], TensorData::U8(vec![0, 128, 255, 7]), None).unwrap();
    let out = backend.infer(&tensor).unwrap();
    assert_eq!(out.label, "q");
    backend.close();
}

#[test]
fn silent_child_times_out_during_handshake() {
    let t0 = Instant::now();
    match SubprocessBackend::spawn(STUB, &args(&["--no-ready"]), 400) {
        Err(BackendError::HandshakeTimeout { timeout_ms }) => assert_eq!(timeout_ms, 400),
        other => panic!("wrong result: {other:?}"),
    }
    // handshake wait plus the bounded shutdown grace, nowhere near a hang
    assert!(t0.elapsed() < Duration::from_secs(4));
}

#[test]
fn child_crash_mid_run_reports_the_exit_status() {
    let mut backend =
        SubprocessBackend::spawn(STUB, &args(&["--crash-after", "3"]), 5000).unwrap();
    for _ in 0..3 {
        backend.infer(&f32_tensor(&[1.0])).unwrap();
    }
    match backend.infer(&f32_tensor(&[1.0])) {
        Err(BackendError::BackendCrashed(msg)) => {
            assert!(msg.contains("7"), "exit status missing from: {msg}");
        }
        other => panic!("wrong result: {other:?}"),
    }
}

#[test]
fn mismatched_reply_id_is_a_protocol_error() {
    let mut backend = SubprocessBackend::spawn(STUB, &args(&["--bad-id"]), 5000).unwrap();
    match backend.infer(&f32_tensor(&[1.0])) {
        Err(BackendError::ProtocolError(msg)) => assert!(msg.contains("id"), "{msg}"),
        other => panic!("wrong result: {other:?}"),
    }
}

#[test]
fn slow_child_times_out_and_backend_shuts_down() {
    let mut backend =
        SubprocessBackend::spawn(STUB, &args(&["--delay-ms", "30000"]), 300).unwrap();
    let t0 = Instant::now();
    match backend.infer(&f32_tensor(&[1.0])) {
        Err(BackendError::BackendTimeout { timeout_ms }) => assert_eq!(timeout_ms, 300),
        other => panic!("wrong result: {other:?}"),
    }
    // a late reply can never be matched to a request again, so the child
    // must be gone rather than lingering with a desynced stream
    match backend.infer(&f32_tensor(&[1.0])) {
        Err(BackendError::BackendCrashed(_)) => {}
        other => panic!("wrong result: {other:?}"),
    }
    assert!(t0.elapsed() < Duration::from_secs(10));
}

#[test]
fn dropping_the_backend_reaps_the_child() {
    let t0 = Instant::now();
    {
        let mut backend = SubprocessBackend::spawn(STUB, &[], 5000).unwrap();
        backend.infer(&f32_tensor(&[1.0])).unwrap();
    }
    assert!(t0.elapsed() < Duration::from_secs(5));
}
