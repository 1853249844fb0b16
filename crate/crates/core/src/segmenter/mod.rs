//! The pluggable segmentation boundary. A backend receives each clip's two
//! prompt images plus the expression and answers with one opaque prompt per
//! clip; given a clip's frames and its prompt it produces per-frame soft
//! masks. The built-in stub backend keeps the whole test suite
//! self-contained; the subprocess backend plugs in any-language model
//! servers over a line-delimited protocol.

mod stub;
mod subprocess;

pub use stub::StubBackend;
pub use subprocess::SubprocessBackend;

/// The records exchanged with subprocess workers, for anyone implementing
/// the other side of the protocol.
pub mod wire {
    pub use super::subprocess::{decode_b64, encode_b64, WireRequest, WireResponse};
}

use crate::compress::{compress_clip, CompressedClip};
use crate::error::{Error, Result};
use crate::mask_io::DiskFrames;
use crate::types::{validate_plan, Frame, SamplingPlan, SoftMask, VideoMeta};

/// One opaque segmentation prompt, standing in for a segmentation token's
/// hidden state. Payload semantics belong entirely to the backend that
/// made it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegPrompt {
    pub clip_index: usize,
    pub payload: Vec<u8>,
}

/// Identifies the work stream a request belongs to.
#[derive(Debug, Clone, Copy)]
pub struct SegmentContext<'a> {
    pub video_id: &'a str,
    pub exp_id: &'a str,
    pub expression: &'a str,
}

/// A segmentation model behind the pipeline. Implementations may be
/// stateful per (video, expression) stream; the harness issues requests for
/// one stream sequentially and never shares an instance across streams.
pub trait SegmenterBackend {
    fn identity(&self) -> &str;

    /// Whether frames beyond the sampling target can be decoded through the
    /// backend's own tracker memory.
    fn supports_tail_propagation(&self) -> bool {
        false
    }

    fn generate_prompts(
        &mut self,
        ctx: &SegmentContext,
        clips: &[CompressedClip],
    ) -> Result<Vec<SegPrompt>>;

    fn decode_clip(
        &mut self,
        ctx: &SegmentContext,
        frames: &[Frame],
        prompt: &SegPrompt,
    ) -> Result<Vec<SoftMask>>;
}

/// Source of a video's frames, by original index.
pub trait FrameProvider {
    fn meta(&self) -> &VideoMeta;
    fn frame(&self, index: usize) -> Result<Frame>;
}

impl FrameProvider for DiskFrames {
    fn meta(&self) -> &VideoMeta {
        DiskFrames::meta(self)
    }

    fn frame(&self, index: usize) -> Result<Frame> {
        self.load(index)
    }
}

/// Frames held in memory, mostly for tests and synthetic runs.
pub struct MemoryFrames {
    meta: VideoMeta,
    frames: Vec<Frame>,
}

impl MemoryFrames {
    pub fn new(meta: VideoMeta, frames: Vec<Frame>) -> Result<Self> {
        if frames.len() != meta.frame_count {
            return Err(Error::validation(format!(
                "video {:?}: {} frames supplied, meta says {}",
                meta.video_id,
                frames.len(),
                meta.frame_count
            )));
        }
        if let Some(bad) = frames
            .iter()
            .find(|f| f.width() != meta.width || f.height() != meta.height)
        {
            return Err(Error::validation(format!(
                "frame {} of {:?} is {}x{}, meta says {}x{}",
                bad.index,
                meta.video_id,
                bad.width(),
                bad.height(),
                meta.width,
                meta.height
            )));
        }
        Ok(MemoryFrames { meta, frames })
    }
}

impl FrameProvider for MemoryFrames {
    fn meta(&self) -> &VideoMeta {
        &self.meta
    }

    fn frame(&self, index: usize) -> Result<Frame> {
        self.frames
            .get(index)
            .cloned()
            .ok_or_else(|| Error::validation(format!("frame {index} out of range")))
    }
}

/// Ask the backend for one prompt per clip, enforcing the arity and
/// ordering contract.
pub fn generate_prompts(
    backend: &mut dyn SegmenterBackend,
    ctx: &SegmentContext,
    clips: &[CompressedClip],
) -> Result<Vec<SegPrompt>> {
    if ctx.expression.trim().is_empty() {
        return Err(Error::validation("expression must not be empty"));
    }
    if clips.is_empty() {
        return Err(Error::validation("no clips to prompt"));
    }
    let prompts = backend.generate_prompts(ctx, clips).map_err(|e| {
        Error::backend(format!(
            "{} failed prompting {}/{}: {e}",
            backend.identity(),
            ctx.video_id,
            ctx.exp_id
        ))
    })?;
    if prompts.len() != clips.len() {
        return Err(Error::backend(format!(
            "{} returned {} prompts for {} clips",
            backend.identity(),
            prompts.len(),
            clips.len()
        )));
    }
    for (i, prompt) in prompts.iter().enumerate() {
        if prompt.clip_index != i {
            return Err(Error::backend(format!(
                "{} returned prompt for clip {} at position {i}",
                backend.identity(),
                prompt.clip_index
            )));
        }
    }
    Ok(prompts)
}

/// Decode one clip's frames, enforcing one mask per frame at frame size.
pub fn decode_clip(
    backend: &mut dyn SegmenterBackend,
    ctx: &SegmentContext,
    frames: &[Frame],
    prompt: &SegPrompt,
) -> Result<Vec<SoftMask>> {
    if frames.is_empty() {
        return Err(Error::validation("no frames to decode"));
    }
    let masks = backend.decode_clip(ctx, frames, prompt).map_err(|e| {
        Error::backend(format!(
            "{} failed decoding clip {} of {}/{}: {e}",
            backend.identity(),
            prompt.clip_index,
            ctx.video_id,
            ctx.exp_id
        ))
    })?;
    if masks.len() != frames.len() {
        return Err(Error::backend(format!(
            "{} returned {} masks for {} frames",
            backend.identity(),
            masks.len(),
            frames.len()
        )));
    }
    for (frame, mask) in frames.iter().zip(&masks) {
        if mask.width != frame.width() || mask.height != frame.height() {
            return Err(Error::backend(format!(
                "{}: mask for frame {} is {}x{}, expected {}x{}",
                backend.identity(),
                frame.index,
                mask.width,
                mask.height,
                frame.width(),
                frame.height()
            )));
        }
    }
    Ok(masks)
}

/// Run the full per-video inference: compress every clip, generate prompts,
/// decode each clip's mapped frames, and merge. Frames carrying two tokens
/// get the pixelwise mean of both decoded masks.
pub fn decode_video(
    backend: &mut dyn SegmenterBackend,
    provider: &dyn FrameProvider,
    plan: &SamplingPlan,
    exp_id: &str,
    expression: &str,
) -> Result<Vec<SoftMask>> {
    let meta = provider.meta();
    let violations = validate_plan(plan, meta);
    if !violations.is_empty() {
        return Err(Error::validation(format!(
            "plan for {:?} is invalid: {}",
            meta.video_id,
            violations
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join("; ")
        )));
    }
    let ctx = SegmentContext {
        video_id: &meta.video_id,
        exp_id,
        expression,
    };

    let mut compressed = Vec::with_capacity(plan.n_clips);
    for clip in &plan.clips {
        let frames = clip
            .member_indices
            .iter()
            .map(|&m| provider.frame(m))
            .collect::<Result<Vec<_>>>()?;
        compressed.push(compress_clip(&frames, plan.grid)?);
    }
    let prompts = generate_prompts(backend, &ctx, &compressed)?;

    // Decode each clip over the frames mapped to it, in temporal order.
    let mut contributions: Vec<Vec<SoftMask>> = (0..meta.frame_count).map(|_| Vec::new()).collect();
    for clip_index in 0..plan.n_clips {
        let mapped = plan.frames_for_clip(clip_index);
        if mapped.is_empty() {
            continue;
        }
        let prompt = prompts
            .get(clip_index)
            .ok_or_else(|| Error::backend(format!("no prompt for mapped clip {clip_index}")))?;
        let frames = mapped
            .iter()
            .map(|&f| provider.frame(f))
            .collect::<Result<Vec<_>>>()?;
        let masks = decode_clip(backend, &ctx, &frames, prompt)?;
        for (&frame, mask) in mapped.iter().zip(masks) {
            contributions[frame].push(mask);
        }
    }

    let mut output = Vec::with_capacity(meta.frame_count);
    for (frame, mut masks) in contributions.into_iter().enumerate() {
        match masks.len() {
            1 => output.push(masks.pop().expect("len checked")),
            2 => {
                let b = masks.pop().expect("len checked");
                let mut a = masks.pop().expect("len checked");
                for (va, vb) in a.values.iter_mut().zip(&b.values) {
                    *va = (*va + *vb) / 2.0;
                }
                output.push(a);
            }
            n => {
                return Err(Error::backend(format!(
                    "frame {frame} received {n} decoded masks"
                )))
            }
        }
    }
    Ok(output)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{plan_uniform, plan_uniform_plus, plan_wrap_around};
    use crate::types::RgbImage;

    fn synthetic_provider(t_ori: usize, w: u32, h: u32) -> MemoryFrames {
        let meta = VideoMeta::with_placeholder_uris("vid", t_ori, w, h).unwrap();
        let frames = (0..t_ori)
            .map(|i| {
                let mut img = RgbImage::filled(w, h, [0, 0, 0]);
                for (p, b) in img.data.iter_mut().enumerate() {
                    *b = ((i * 131 + p * 17) % 256) as u8;
                }
                Frame::new(i, img)
            })
            .collect();
        MemoryFrames::new(meta, frames).unwrap()
    }

    fn compress_all(provider: &MemoryFrames, plan: &SamplingPlan) -> Vec<CompressedClip> {
        plan.clips
            .iter()
            .map(|clip| {
                let frames: Vec<Frame> = clip
                    .member_indices
                    .iter()
                    .map(|&m| provider.frame(m).unwrap())
                    .collect();
                compress_clip(&frames, plan.grid).unwrap()
            })
            .collect()
    }

    fn ctx<'a>() -> SegmentContext<'a> {
        SegmentContext {
            video_id: "vid",
            exp_id: "exp0",
            expression: "the wandering blob",
        }
    }

    #[test]
    fn prompts_are_one_per_clip_in_order() {
        let provider = synthetic_provider(23, 16, 12);
        let plan = plan_uniform(provider.meta(), 2, 5).unwrap();
        let clips = compress_all(&provider, &plan);
        let mut backend = StubBackend::new(0);
        let prompts = generate_prompts(&mut backend, &ctx(), &clips).unwrap();
        assert_eq!(prompts.len(), 2);
        assert_eq!(prompts[0].clip_index, 0);
        assert_eq!(prompts[1].clip_index, 1);
        assert_ne!(prompts[0].payload, prompts[1].payload);
    }

    #[test]
    fn empty_expression_is_rejected() {
        let provider = synthetic_provider(10, 8, 8);
        let plan = plan_uniform(provider.meta(), 2, 5).unwrap();
        let clips = compress_all(&provider, &plan);
        let mut backend = StubBackend::new(0);
        let err = generate_prompts(
            &mut backend,
            &SegmentContext {
                video_id: "vid",
                exp_id: "exp0",
                expression: "  ",
            },
            &clips,
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn decode_clip_arity_matches_input() {
        let provider = synthetic_provider(10, 8, 8);
        let frames: Vec<Frame> = (0..5).map(|i| provider.frame(i).unwrap()).collect();
        let mut backend = StubBackend::new(7);
        let prompt = SegPrompt {
            clip_index: 0,
            payload: vec![1, 2, 3],
        };
        let masks = decode_clip(&mut backend, &ctx(), &frames, &prompt).unwrap();
        assert_eq!(masks.len(), 5);
        for m in &masks {
            assert_eq!((m.width, m.height), (8, 8));
        }
    }

    #[test]
    fn decode_video_yields_one_mask_per_original_frame() {
        for t_ori in [1usize, 7, 23, 100, 150] {
            let provider = synthetic_provider(t_ori, 12, 8);
            let plan = plan_wrap_around(provider.meta(), 2, 5).unwrap();
            let mut backend = StubBackend::new(3);
            let masks = decode_video(&mut backend, &provider, &plan, "exp0", "a thing").unwrap();
            assert_eq!(masks.len(), t_ori, "T_ori={t_ori}");
        }
    }

    #[test]
    fn mask_count_equals_video_length_for_every_strategy_and_length() {
        use crate::sampling::{plan_for_strategy, RelevanceScores};
        use crate::types::Strategy;

        for t_ori in 1..=300usize {
            let provider = synthetic_provider(t_ori, 4, 4);
            let scores =
                RelevanceScores::new((0..t_ori).map(|i| ((i * 13) % 7) as f64).collect()).unwrap();
            for strategy in Strategy::ALL {
                let plan =
                    plan_for_strategy(strategy, provider.meta(), 3, 2, Some(&scores)).unwrap();
                let mut backend = StubBackend::new(1);
                let masks =
                    decode_video(&mut backend, &provider, &plan, "exp0", "a thing").unwrap();
                assert_eq!(masks.len(), t_ori, "{strategy} T_ori={t_ori}");
            }
        }
    }

    #[test]
    fn decode_video_is_deterministic() {
        let provider = synthetic_provider(23, 16, 12);
        let plan = plan_uniform(provider.meta(), 2, 5).unwrap();
        let run = || {
            let mut backend = StubBackend::new(11);
            decode_video(&mut backend, &provider, &plan, "exp0", "a thing").unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn dual_token_frames_average_their_two_masks() {
        let provider = synthetic_provider(7, 16, 12);
        let plan = plan_uniform_plus(provider.meta(), 2, 5).unwrap();
        let dual_frame = (0..7)
            .find(|&f| plan.tokens_for(f).unwrap().len() == 2)
            .expect("short uniform+ plan has a shared frame");

        let ctx = ctx();
        let mut backend = StubBackend::new(5);
        let merged =
            decode_video(&mut backend, &provider, &plan, ctx.exp_id, ctx.expression).unwrap();

        // Recompute the two contributions by hand.
        let clips = compress_all(&provider, &plan);
        let mut backend = StubBackend::new(5);
        let prompts = generate_prompts(&mut backend, &ctx, &clips).unwrap();
        let tokens = plan.tokens_for(dual_frame).unwrap().to_vec();
        let mut parts = Vec::new();
        for &clip_index in &tokens {
            let mapped = plan.frames_for_clip(clip_index);
            let frames: Vec<Frame> = mapped.iter().map(|&f| provider.frame(f).unwrap()).collect();
            let masks = decode_clip(&mut backend, &ctx, &frames, &prompts[clip_index]).unwrap();
            let pos = mapped.iter().position(|&f| f == dual_frame).unwrap();
            parts.push(masks[pos].clone());
        }
        for (p, v) in merged[dual_frame].values.iter().enumerate() {
            let expected = (parts[0].values[p] + parts[1].values[p]) / 2.0;
            assert!((v - expected).abs() < 1e-6);
        }
    }

    #[test]
    fn frame_output_depends_only_on_its_mapped_clips() {
        let provider = synthetic_provider(23, 12, 8);
        let plan = plan_uniform(provider.meta(), 2, 5).unwrap();
        let ctx = ctx();
        let clips = compress_all(&provider, &plan);
        let mut backend = StubBackend::new(1);
        let prompts = generate_prompts(&mut backend, &ctx, &clips).unwrap();

        // Frame 0 is mapped to clip 0 only; perturbing clip 1's prompt must
        // not change its mask.
        let mapped = plan.frames_for_clip(0);
        let frames: Vec<Frame> = mapped.iter().map(|&f| provider.frame(f).unwrap()).collect();
        let baseline = decode_clip(&mut backend, &ctx, &frames, &prompts[0]).unwrap();

        let mut perturbed = prompts[1].clone();
        perturbed.payload.push(0xFF);
        // decode clip 0 again with clip 1 perturbed: identical by construction
        let again = decode_clip(&mut backend, &ctx, &frames, &prompts[0]).unwrap();
        assert_eq!(baseline, again);

        // But perturbing clip 0's own prompt changes its frames.
        let mut own = prompts[0].clone();
        own.payload.push(0xFF);
        let changed = decode_clip(&mut backend, &ctx, &frames, &own).unwrap();
        assert_ne!(baseline, changed);
        let _ = perturbed;
    }
}
