//! Reference child process for the subprocess wire protocol, used by the
//! integration tests. Speaks NDJSON on stdin/stdout and misbehaves on
//! request so every client error path can be driven from outside:
//!
//!   --model NAME        model name announced in the ready message
//!   --label L           fixed label for every result
//!   --confidence C      fixed confidence for every result
//!   --echo-argmax       decode the f32 payload, reply class_<argmax>
//!   --delay-ms D        sleep before every result
//!   --crash-after N     exit(7) instead of answering request N+1
//!   --no-ready          swallow the hello and never answer
//!   --bad-id            reply with id+1

use std::io::{BufRead, Write};

use base64::Engine as _;
use serde_json::{json, Value};

struct Options {
    model: String,
    label: String,
    confidence: f64,
    echo_argmax: bool,
    delay_ms: u64,
    crash_after: Option<u64>,
    no_ready: bool,
    bad_id: bool,
}

fn parse_args() -> Options {
    let mut opts = Options {
        model: "stub-model".into(),
        label: "stub".into(),
        confidence: 0.5,
        echo_argmax: false,
        delay_ms: 0,
        crash_after: None,
        no_ready: false,
        bad_id: false,
    };
    let mut args = std::env::args().skip(1);
    while let Some(arg) = args.next() {
        let mut value = || {
            args.next()
                .unwrap_or_else(|| panic!("{arg} needs a value"))
        };
        match arg.as_str() {
            "--model" => opts.model = value(),
            "--label" => opts.label = value(),
            "--confidence" => opts.confidence = value().parse().expect("confidence"),
            "--echo-argmax" => opts.echo_argmax = true,
            "--delay-ms" => opts.delay_ms = value().parse().expect("delay"),
            "--crash-after" => opts.crash_after = Some(value().parse().expect("crash-after")),
            "--no-ready" => opts.no_ready = true,
            "--bad-id" => opts.bad_id = true,
            other => panic!("unknown flag {other}"),
        }
    }
    opts
}

fn send(msg: &Value) {
    let mut stdout = std::io::stdout().lock();
    serde_json::to_writer(&mut stdout, msg).expect("write stdout");
    stdout.write_all(b"\n").expect("write stdout");
    stdout.flush().expect("flush stdout");
}

fn decode_f32(data: &str) -> Vec<f32> {
    let bytes = base64::engine::general_purpose::STANDARD
        .decode(data)
        .expect("base64 payload");
    bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect()
}

fn main() {
    let opts = parse_args();
    let stdin = std::io::stdin();
    let mut answered = 0u64;

    for line in stdin.lock().lines() {
        let line = line.expect("read stdin");
        if line.trim().is_empty() {
            continue;
        }
        let msg: Value = serde_json::from_str(&line).expect("parse request");
        match msg["type"].as_str() {
            Some("hello") => {
                if opts.no_ready {
                    continue;
                }
                send(&json!({"type": "ready", "model": opts.model}));
            }
            Some("infer") => {
                if opts.crash_after.is_some_and(|n| answered >= n) {
                    eprintln!("stub-runner: crashing on request");
                    std::process::exit(7);
                }
                if opts.delay_ms > 0 {
                    std::thread::sleep(std::time::Duration::from_millis(opts.delay_ms));
                }
                let mut id = msg["id"].as_u64().expect("infer id");
                if opts.bad_id {
                    id += 1;
                }
                let reply = if opts.echo_argmax {
                    let values = decode_f32(msg["data"].as_str().expect("payload"));
                    let (argmax, max) = values
                        .iter()
                        .enumerate()
                        .fold((0, f32::NEG_INFINITY), |(bi, bv), (i, &v)| {
                            if v > bv { (i, v) } else { (bi, bv) }
                        });
                    let scores: Vec<f64> = values.iter().map(|&v| v as f64).collect();
                    json!({
                        "type": "result",
                        "id": id,
                        "label": format!("class_{argmax}"),
                        "confidence": max as f64,
                        "raw_scores": scores,
                    })
                } else {
                    json!({
                        "type": "result",
                        "id": id,
                        "label": opts.label,
                        "confidence": opts.confidence,
                    })
                };
                send(&reply);
                answered += 1;
            }
            other => eprintln!("stub-runner: ignoring message type {other:?}"),
        }
    }
}
