//! Generate a small demo dataset: synthetic frames, a manifest, and a
//! relevance-scores file, ready for the `rvos` CLI.
//!
//! Usage: `cargo run -p rvos-core --example gen_demo -- <out_dir>`

use std::collections::BTreeMap;
use std::path::Path;

use rvos_core::mask_io::{save_manifest, write_frame, Expression, Manifest, ManifestVideo};
use rvos_core::types::RgbImage;

fn frame(video_seed: u64, index: usize, w: u32, h: u32) -> RgbImage {
    let mut img = RgbImage::filled(w, h, [0, 0, 0]);
    for y in 0..h {
        for x in 0..w {
            let r = ((x as u64 * 255) / w as u64) as u8;
            let g = ((y as u64 * 255) / h as u64) as u8;
            let b = ((video_seed * 41 + index as u64 * 11) % 256) as u8;
            img.set_pixel(x, y, [r, g, b]);
        }
    }
    // a bright block drifting across the frame
    let bx = (index as u32 * 2) % (w - 4);
    let by = (index as u32) % (h - 4);
    for dy in 0..4 {
        for dx in 0..4 {
            img.set_pixel(bx + dx, by + dy, [255, 255, 255]);
        }
    }
    img
}

fn main() {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "demo".to_string());
    let out = Path::new(&out);

    let mut videos = Vec::new();
    let mut scores: BTreeMap<String, BTreeMap<String, Vec<f64>>> = BTreeMap::new();
    for (seed, (video_id, t_ori, w, h)) in [
        ("clip_short", 7usize, 32u32, 24u32),
        ("clip_long", 120usize, 32, 24),
    ]
    .into_iter()
    .enumerate()
    {
        let mut uris = Vec::new();
        for i in 0..t_ori {
            let uri = format!("frames/{video_id}/{i:05}.png");
            write_frame(out.join(&uri), &frame(seed as u64 + 1, i, w, h)).expect("write frame");
            uris.push(uri);
        }
        videos.push(ManifestVideo {
            video_id: video_id.to_string(),
            width: w,
            height: h,
            frame_uris: uris,
            expressions: vec![Expression {
                exp_id: "exp0".to_string(),
                expression: "the bright moving block".to_string(),
            }],
        });
        // toy relevance: later frames slightly more relevant
        let mut exps = BTreeMap::new();
        exps.insert(
            "exp0".to_string(),
            (0..t_ori).map(|i| i as f64 / t_ori as f64).collect(),
        );
        scores.insert(video_id.to_string(), exps);
    }

    save_manifest(out.join("manifest.json"), &Manifest::new(videos)).expect("write manifest");
    let scores_doc = serde_json::json!({ "schema_version": 1, "scores": scores });
    std::fs::write(
        out.join("scores.json"),
        serde_json::to_string_pretty(&scores_doc).expect("encode scores"),
    )
    .expect("write scores");

    println!("demo dataset written to {}", out.display());
    println!(
        "try: rvos pipeline --manifest {}/manifest.json --strategy wrap_around+ \\",
        out.display()
    );
    println!(
        "       --n-clips 2 --clip-len 5 --backend stub --out {}/pred",
        out.display()
    );
}
