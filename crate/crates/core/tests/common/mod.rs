//! Shared fixtures for integration tests: a deterministic RNG, synthetic
//! videos on disk, and recursive directory comparison.
//!
//! Each test target compiles this module separately, so not every item is
//! used from every target.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use rvos_core::mask_io::{save_manifest, write_frame, Expression, Manifest, ManifestVideo};
use rvos_core::types::{BinaryMask, RgbImage};

/// splitmix64: tiny, seedable, reproducible forever.
pub struct Rng(pub u64);

impl Rng {
    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }

    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn mask(&mut self, width: u32, height: u32) -> BinaryMask {
        let bits = (0..(width * height) as usize)
            .map(|_| (self.next_u64() & 1) as u8)
            .collect();
        BinaryMask::new(width, height, bits).unwrap()
    }
}

/// A deterministic synthetic frame: gradient background plus a moving block.
pub fn synth_frame(video_seed: u64, index: usize, w: u32, h: u32) -> RgbImage {
    let mut img = RgbImage::filled(w, h, [0, 0, 0]);
    for y in 0..h {
        for x in 0..w {
            let r = ((x as u64 * 255) / w.max(1) as u64) as u8;
            let g = ((y as u64 * 255) / h.max(1) as u64) as u8;
            let b = ((video_seed.wrapping_mul(31) + index as u64 * 7) % 256) as u8;
            img.set_pixel(x, y, [r, g, b]);
        }
    }
    // a small block that moves with the frame index
    let bx = (index as u32 * 3) % w.max(1);
    let by = (index as u32 * 2) % h.max(1);
    for dy in 0..3.min(h - by) {
        for dx in 0..3.min(w - bx) {
            img.set_pixel(bx + dx, by + dy, [255, 255, 255]);
        }
    }
    img
}

pub struct FixtureVideo {
    pub video_id: &'static str,
    pub t_ori: usize,
    pub width: u32,
    pub height: u32,
}

/// The three-video fixture: one shorter than T=10 clips of c, one equal to
/// T=100, one longer.
pub const FIXTURE_VIDEOS: [FixtureVideo; 3] = [
    FixtureVideo {
        video_id: "vid_short",
        t_ori: 7,
        width: 24,
        height: 18,
    },
    FixtureVideo {
        video_id: "vid_even",
        t_ori: 100,
        width: 32,
        height: 24,
    },
    FixtureVideo {
        video_id: "vid_long",
        t_ori: 150,
        width: 28,
        height: 20,
    },
];

/// Write frames plus a manifest under `dir`; returns the manifest path.
pub fn write_fixture_manifest(dir: &Path) -> PathBuf {
    let mut videos = Vec::new();
    for (vi, video) in FIXTURE_VIDEOS.iter().enumerate() {
        let mut uris = Vec::new();
        for i in 0..video.t_ori {
            let uri = format!("frames/{}/{i:05}.png", video.video_id);
            write_frame(
                dir.join(&uri),
                &synth_frame(vi as u64 + 1, i, video.width, video.height),
            )
            .unwrap();
            uris.push(uri);
        }
        videos.push(ManifestVideo {
            video_id: video.video_id.to_string(),
            width: video.width,
            height: video.height,
            frame_uris: uris,
            expressions: vec![Expression {
                exp_id: "exp0".to_string(),
                expression: format!("the bright block in {}", video.video_id),
            }],
        });
    }
    let path = dir.join("manifest.json");
    save_manifest(&path, &Manifest::new(videos)).unwrap();
    path
}

/// All files under a root, as (relative path, bytes), sorted.
pub fn dir_snapshot(root: &Path) -> Vec<(String, Vec<u8>)> {
    fn walk(dir: &Path, root: &Path, out: &mut Vec<(String, Vec<u8>)>) {
        let mut entries: Vec<_> = std::fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        entries.sort();
        for path in entries {
            if path.is_dir() {
                walk(&path, root, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().display().to_string();
                out.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    let mut out = Vec::new();
    walk(root, root, &mut out);
    out
}
