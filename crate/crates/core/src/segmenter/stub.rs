//! Deterministic stand-in backend: prompts are hashes of the expression and
//! clip index, masks are soft disks whose geometry is derived from
//! (video, expression, clip, frame). No model, no I/O, byte-stable across
//! runs, which makes it the reference backend for tests and dry runs.

use crate::compress::CompressedClip;
use crate::error::Result;
use crate::types::{Frame, SoftMask};

use super::{SegPrompt, SegmentContext, SegmenterBackend};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(seed: u64, parts: &[&[u8]]) -> u64 {
    let mut hash = FNV_OFFSET ^ seed;
    for part in parts {
        for &byte in *part {
            hash ^= byte as u64;
            hash = hash.wrapping_mul(FNV_PRIME);
        }
        hash ^= 0x1f; // separator so ("ab","c") != ("a","bc")
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

/// Render a soft disk: 1 inside, 0 outside, a two-pixel linear edge, value
/// exactly 0.5 on the rim.
fn soft_disk(width: u32, height: u32, cx: f32, cy: f32, radius: f32) -> SoftMask {
    let mut values = Vec::with_capacity(width as usize * height as usize);
    for y in 0..height {
        for x in 0..width {
            let dx = x as f32 - cx;
            let dy = y as f32 - cy;
            let dist = (dx * dx + dy * dy).sqrt();
            values.push((0.5 + (radius - dist) / 2.0).clamp(0.0, 1.0));
        }
    }
    SoftMask {
        width,
        height,
        values,
    }
}

#[derive(Debug, Clone)]
pub struct StubBackend {
    seed: u64,
}

impl StubBackend {
    pub fn new(seed: u64) -> Self {
        StubBackend { seed }
    }

    /// Prompt payload for a clip: a hash of (expression, clip_index).
    pub fn prompt_payload(&self, expression: &str, clip_index: usize) -> Vec<u8> {
        fnv1a(
            self.seed,
            &[expression.as_bytes(), &(clip_index as u64).to_le_bytes()],
        )
        .to_le_bytes()
        .to_vec()
    }

    /// The disk a given (payload, frame) pair decodes to on a WxH canvas.
    pub fn mask_for(
        &self,
        video_id: &str,
        payload: &[u8],
        frame_index: usize,
        w: u32,
        h: u32,
    ) -> SoftMask {
        let hash = fnv1a(
            self.seed,
            &[
                video_id.as_bytes(),
                payload,
                &(frame_index as u64).to_le_bytes(),
            ],
        );
        let unit = |bits: u64| (bits % 1024) as f32 / 1023.0;
        let cx = unit(hash) * (w.saturating_sub(1)) as f32;
        let cy = unit(hash >> 10) * (h.saturating_sub(1)) as f32;
        let min_side = w.min(h) as f32;
        let radius = min_side * (0.18 + 0.17 * unit(hash >> 20));
        soft_disk(w, h, cx, cy, radius)
    }
}

impl SegmenterBackend for StubBackend {
    fn identity(&self) -> &str {
        "stub"
    }

    fn supports_tail_propagation(&self) -> bool {
        true
    }

    fn generate_prompts(
        &mut self,
        ctx: &SegmentContext,
        clips: &[CompressedClip],
    ) -> Result<Vec<SegPrompt>> {
        Ok(clips
            .iter()
            .enumerate()
            .map(|(clip_index, _)| SegPrompt {
                clip_index,
                payload: self.prompt_payload(ctx.expression, clip_index),
            })
            .collect())
    }

    fn decode_clip(
        &mut self,
        ctx: &SegmentContext,
        frames: &[Frame],
        prompt: &SegPrompt,
    ) -> Result<Vec<SoftMask>> {
        Ok(frames
            .iter()
            .map(|frame| {
                self.mask_for(
                    ctx.video_id,
                    &prompt.payload,
                    frame.index,
                    frame.width(),
                    frame.height(),
                )
            })
            .collect())
    }
}
