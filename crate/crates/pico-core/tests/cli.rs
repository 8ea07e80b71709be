//! End-to-end exercises of the pico binary: exit codes, output files,
//! stdout/stderr separation, and cross-invocation determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pico_core::preprocess::{encode_wav_pcm16, write_pten, InputTensor, TensorData};

const PICO: &str = env!("CARGO_BIN_EXE_pico");
const STUB: &str = env!("CARGO_BIN_EXE_pico-stub-runner");

fn pico(dir: &Path, args: &[&str]) -> Output {
    Command::new(PICO)
        .args(args)
        .current_dir(dir)
        .output()
        .expect("run pico")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

struct Workspace {
    dir: tempfile::TempDir,
}

impl Workspace {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self) -> &Path {
        self.dir.path()
    }

    fn write(&self, name: &str, contents: impl AsRef<[u8]>) -> PathBuf {
        let path = self.path().join(name);
        std::fs::write(&path, contents).unwrap();
        path
    }

    /// Three f32[8] tensor samples plus a manifest referencing them.
    fn write_dataset(&self) {
        let mut manifest = String::from("{\"name\":\"t\",\"samples\":[");
        for i in 0..3 {
            let data: Vec<f32> = (0..8).map(|j| (i * 8 + j) as f32 * 0.05).collect();
            let tensor = InputTensor::new(vec![8], TensorData::F32(data), None).unwrap();
            self.write(&format!("s{i}.pten"), write_pten(&tensor).unwrap());
            if i > 0 {
                manifest.push(',');
            }
            manifest.push_str(&format!(
                "{{\"id\":\"s{i}\",\"type\":\"tensor\",\"path\":\"s{i}.pten\"}}"
            ));
        }
        manifest.push_str("]}");
        self.write("manifest.json", manifest);
    }

    fn write_synthetic_config(&self, name: &str, model_id: &str, seed: u64) {
        self.write_synthetic_config_busy(name, model_id, seed, 0);
    }

    /// `busy_ms >= 15` makes every iteration span at least one 10 ms CPU
    /// counter tick, so per-iteration cpu_pct readings are guaranteed.
    fn write_synthetic_config_busy(&self, name: &str, model_id: &str, seed: u64, busy_ms: u64) {
        self.write_dataset();
        self.write(
            name,
            format!(
                r#"
model_id = "{model_id}"
manifest_path = "manifest.json"
iterations = 12
warmup = 2
platform_label = "cli-test"
seed = {seed}

[backend]
kind = "synthetic"
n_classes = 3
input_len = 8
busy_ms = {busy_ms}
"#
            ),
        );
    }
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn run_writes_result_json_and_csv() {
    let ws = Workspace::new();
    ws.write_synthetic_config("run.toml", "cli-model", 3);
    let out = pico(ws.path(), &["run", "run.toml", "--out", "r.json"]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));

    let text = stdout(&out);
    for needle in ["model", "cli-model", "platform", "mean latency", "p95 latency"] {
        assert!(text.contains(needle), "summary missing {needle:?}:\n{text}");
    }

    let result = read_json(&ws.path().join("r.json"));
    assert_eq!(result["schema_version"], 1);
    assert_eq!(result["records"].as_array().unwrap().len(), 12);
    let csv = std::fs::read_to_string(ws.path().join("r.csv")).unwrap();
    assert_eq!(csv.lines().count(), 13);
    assert!(csv.starts_with(
        "index,sample_id,latency_ms,cpu_pct,mem_pct_before,mem_pct_after,predicted_label,confidence"
    ));
}

#[test]
fn flag_overrides_shrink_the_run() {
    let ws = Workspace::new();
    ws.write_synthetic_config("run.toml", "m", 3);
    let out = pico(
        ws.path(),
        &["run", "run.toml", "--out", "r.json", "--iterations", "4", "--warmup", "0"],
    );
    assert_eq!(exit_code(&out), 0);
    let result = read_json(&ws.path().join("r.json"));
    assert_eq!(result["records"].as_array().unwrap().len(), 4);
    assert_eq!(result["config"]["iterations"], 4);
}

#[test]
fn identical_config_and_seed_reproduce_predictions_exactly() {
    let ws = Workspace::new();
    ws.write_synthetic_config("run.toml", "m", 77);
    assert_eq!(exit_code(&pico(ws.path(), &["run", "run.toml", "--out", "a.json"])), 0);
    assert_eq!(exit_code(&pico(ws.path(), &["run", "run.toml", "--out", "b.json"])), 0);

    let predictions = |name: &str| -> String {
        let result = read_json(&ws.path().join(name));
        let cols: Vec<serde_json::Value> = result["records"]
            .as_array()
            .unwrap()
            .iter()
            .map(|r| serde_json::json!([r["predicted_label"], r["confidence"]]))
            .collect();
        serde_json::to_string(&cols).unwrap()
    };
    assert_eq!(predictions("a.json"), predictions("b.json"));

    // a different seed must actually change the model weights
    let out = pico(
        ws.path(),
        &["run", "run.toml", "--out", "c.json", "--seed", "78"],
    );
    assert_eq!(exit_code(&out), 0);
    assert_ne!(predictions("a.json"), predictions("c.json"));
}

#[test]
fn config_without_backend_kind_exits_one_naming_the_field() {
    let ws = Workspace::new();
    ws.write(
        "bad.toml",
        "model_id = \"m\"\nmanifest_path = \"m.json\"\n[backend]\nn_classes = 2\n",
    );
    let out = pico(ws.path(), &["run", "bad.toml"]);
    assert_eq!(exit_code(&out), 1);
    let err = stderr(&out);
    assert!(err.contains("PICO-E001"), "{err}");
    assert!(err.contains("kind"), "{err}");
    assert!(stdout(&out).is_empty());
}

#[test]
fn missing_config_file_is_an_io_error() {
    let ws = Workspace::new();
    let out = pico(ws.path(), &["run", "gone.toml"]);
    assert_eq!(exit_code(&out), 3);
    assert!(stderr(&out).contains("PICO-E007"), "{}", stderr(&out));
}

#[test]
fn crashing_subprocess_backend_exits_two_and_flushes_partial() {
    let ws = Workspace::new();
    ws.write_dataset();
    ws.write(
        "run.toml",
        format!(
            r#"
model_id = "crashy"
manifest_path = "manifest.json"
iterations = 20
warmup = 0

[backend]
kind = "subprocess"
command = "{STUB}"
args = ["--crash-after", "5"]
timeout_ms = 5000
"#
        ),
    );
    let out = pico(ws.path(), &["run", "run.toml", "--out", "r.json"]);
    assert_eq!(exit_code(&out), 2, "stderr: {}", stderr(&out));
    let err = stderr(&out);
    assert!(err.contains("PICO-E004"), "{err}");

    assert!(!ws.path().join("r.json").exists());
    let partial = read_json(&ws.path().join("r.json.partial"));
    assert_eq!(partial["records"].as_array().unwrap().len(), 5);
    assert_eq!(partial["model_id"], "crashy");
    assert!(!partial["error"].as_str().unwrap().is_empty());
}

#[test]
fn report_writes_four_well_formed_svgs() {
    let ws = Workspace::new();
    ws.write_synthetic_config_busy("run.toml", "m", 3, 15);
    assert_eq!(exit_code(&pico(ws.path(), &["run", "run.toml", "--out", "r.json"])), 0);
    let out = pico(ws.path(), &["report", "r.json", "--charts", "charts"]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("latency_ms"));

    let mut names: Vec<String> = std::fs::read_dir(ws.path().join("charts"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(
        names,
        [
            "confidence_trend.svg",
            "latency_histogram.svg",
            "metric_trend.svg",
            "prediction_bar.svg"
        ]
    );
    for name in names {
        let text = std::fs::read_to_string(ws.path().join("charts").join(name)).unwrap();
        roxmltree::Document::parse(&text).expect("well-formed SVG");
    }
}

#[test]
fn report_without_cpu_readings_degrades_to_three_svgs() {
    let ws = Workspace::new();
    ws.write_synthetic_config("run.toml", "m", 3);
    // frozen counter fixtures: every CPU window has no tick delta
    ws.write("stat", "cpu 100 0 50 800 30 0 0 0\n");
    ws.write("meminfo", "MemTotal: 100000 kB\nMemAvailable: 89000 kB\n");
    let out = Command::new(PICO)
        .args(["run", "run.toml", "--out", "r.json"])
        .current_dir(ws.path())
        .env("PICO_CPU_STAT_PATH", ws.path().join("stat"))
        .env("PICO_MEMINFO_PATH", ws.path().join("meminfo"))
        .output()
        .unwrap();
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let result = read_json(&ws.path().join("r.json"));
    assert!(result["cpu_pct_run"].is_null());
    assert!(result["records"][0]["cpu_pct"].is_null());
    assert_eq!(result["records"][0]["mem_pct_before"], 11.0);

    let out = pico(ws.path(), &["report", "r.json", "--charts", "charts"]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("warning"), "{}", stderr(&out));
    assert!(ws.path().join("charts/latency_histogram.svg").exists());
    assert!(ws.path().join("charts/confidence_trend.svg").exists());
    assert!(ws.path().join("charts/prediction_bar.svg").exists());
    assert!(!ws.path().join("charts/metric_trend.svg").exists());
}

#[test]
fn corrupt_result_file_fails_report_with_parse_code() {
    let ws = Workspace::new();
    ws.write("r.json", "{not json");
    let out = pico(ws.path(), &["report", "r.json"]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("PICO-E006"), "{}", stderr(&out));

    ws.write("v2.json", "{\"schema_version\": 2}");
    let out = pico(ws.path(), &["report", "v2.json"]);
    assert_eq!(exit_code(&out), 1);
    assert!(stderr(&out).contains("schema version"), "{}", stderr(&out));
}

#[test]
fn compare_against_itself_is_all_ones() {
    let ws = Workspace::new();
    ws.write_synthetic_config("run.toml", "m", 3);
    assert_eq!(exit_code(&pico(ws.path(), &["run", "run.toml", "--out", "r.json"])), 0);
    let out = pico(ws.path(), &["compare", "r.json", "r.json"]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("latency_ms"), "{text}");
    assert!(text.contains("1.00"), "{text}");

    let report = read_json(&ws.path().join("r.compare.json"));
    for metric in report["metrics"].as_array().unwrap() {
        assert_eq!(metric["ratio"], 1.0);
        assert_eq!(metric["delta"], 0.0);
    }
}

#[test]
fn comparing_different_models_warns_but_succeeds() {
    let ws = Workspace::new();
    ws.write_synthetic_config("a.toml", "model-a", 3);
    assert_eq!(exit_code(&pico(ws.path(), &["run", "a.toml", "--out", "a.json"])), 0);
    ws.write_synthetic_config("b.toml", "model-b", 3);
    assert_eq!(exit_code(&pico(ws.path(), &["run", "b.toml", "--out", "b.json"])), 0);

    let out = pico(ws.path(), &["compare", "a.json", "b.json"]);
    assert_eq!(exit_code(&out), 0);
    let err = stderr(&out);
    assert!(err.contains("warning"), "{err}");
    assert!(err.contains("model-a") && err.contains("model-b"), "{err}");
}

#[test]
fn validate_reports_each_sample_and_fails_on_bad_ones() {
    let ws = Workspace::new();
    let tensor = InputTensor::new(vec![4], TensorData::F32(vec![0.0; 4]), None).unwrap();
    ws.write("good.pten", write_pten(&tensor).unwrap());
    // header says 8-bit PCM, which the decoder rejects as unsupported
    let mut wav = encode_wav_pcm16(16000, &[0, 0, 0, 0]);
    wav[34] = 8;
    ws.write("bad.wav", wav);
    ws.write(
        "manifest.json",
        r#"{"name":"mixed","samples":[
            {"id":"good","type":"tensor","path":"good.pten"},
            {"id":"gone","type":"tensor","path":"missing.pten"},
            {"id":"depth","type":"audio","path":"bad.wav"}
        ]}"#,
    );
    let out = pico(ws.path(), &["validate", "manifest.json"]);
    assert_eq!(exit_code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("OK    good"), "{text}");
    assert!(text.contains("FAIL  gone"), "{text}");
    assert!(text.contains("FAIL  depth"), "{text}");
    assert!(text.contains("unsupported audio format"), "{text}");
    assert!(stderr(&out).contains("PICO-E002"), "{}", stderr(&out));

    ws.write(
        "ok.json",
        r#"{"name":"ok","samples":[{"id":"good","type":"tensor","path":"good.pten"}]}"#,
    );
    let out = pico(ws.path(), &["validate", "ok.json"]);
    assert_eq!(exit_code(&out), 0);
    assert!(stdout(&out).contains("OK    good"));
}

#[test]
fn diagnostics_never_pollute_stdout() {
    let ws = Workspace::new();
    let out = pico(ws.path(), &["run", "gone.toml"]);
    assert!(stdout(&out).is_empty());
    let out = pico(ws.path(), &["report", "gone.json"]);
    assert!(stdout(&out).is_empty());
    let out = pico(ws.path(), &["validate", "gone.json"]);
    assert!(stdout(&out).is_empty());
}
