//! Regenerates the bundled demo dataset (demo/dataset). The tensors are
//! synthetic but deterministic, so reruns reproduce the committed files
//! byte for byte.
//!
//!   cargo run -p pico-core --example make_demo_dataset -- demo/dataset

use pico_core::preprocess::{write_pten, InputTensor, TensorData};

const SAMPLES: usize = 10;
const INPUT_LEN: usize = 8;

fn main() {
    let out_dir = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "demo/dataset".into());
    let out_dir = std::path::PathBuf::from(out_dir);
    std::fs::create_dir_all(&out_dir).expect("create output directory");

    let mut manifest = String::from("{\n  \"name\": \"demo-10\",\n  \"samples\": [\n");
    for i in 0..SAMPLES {
        let data: Vec<f32> = (0..INPUT_LEN)
            .map(|j| ((i * 37 + j * 11) % 101) as f32 / 50.5 - 1.0)
            .collect();
        let tensor = InputTensor::new(vec![INPUT_LEN], TensorData::F32(data), None)
            .expect("demo tensor");
        let name = format!("s{i:02}.pten");
        std::fs::write(out_dir.join(&name), write_pten(&tensor).expect("encode tensor"))
            .expect("write tensor file");
        manifest.push_str(&format!(
            "    {{\"id\": \"s{i:02}\", \"type\": \"tensor\", \"path\": \"{name}\"}}{}\n",
            if i + 1 < SAMPLES { "," } else { "" }
        ));
    }
    manifest.push_str("  ]\n}\n");
    std::fs::write(out_dir.join("manifest.json"), manifest).expect("write manifest");
    println!("wrote {SAMPLES} samples to {}", out_dir.display());
}
