//! Inference scaffolding for referring video object segmentation around a
//! pluggable, model-agnostic segmenter.
//!
//! The pipeline divides a video into `N` clips of `c = g*g + 1` frames,
//! compresses each clip to a key frame plus one tiled-and-downscaled
//! composite, asks a segmenter backend for one prompt per clip, decodes
//! per-frame masks, and optionally fuses several prediction sources by
//! weighted per-pixel voting. Evaluation reports region similarity (J),
//! boundary accuracy (F) and their mean (J&F).
//!
//! Five frame-sampling strategies adapt videos of any length to the fixed
//! sampling target `T = N * c`: [`sampling::plan_uniform`],
//! [`sampling::plan_uniform_plus`], [`sampling::plan_qframe`],
//! [`sampling::plan_wrap_around`] and [`sampling::plan_wrap_around_plus`].
//!
//! Everything is deterministic: identical inputs (and stub seed) produce
//! byte-identical plans, masks and prediction directories.
//!
//! ```
//! use rvos_core::sampling::plan_wrap_around;
//! use rvos_core::segmenter::{decode_video, MemoryFrames, StubBackend};
//! use rvos_core::{Frame, RgbImage, VideoMeta};
//!
//! // a 7-frame video, sampled to T = 2 clips x 5 frames by wrap-around
//! let meta = VideoMeta::with_placeholder_uris("clip", 7, 16, 12)?;
//! let frames = (0..7)
//!     .map(|i| Frame::new(i, RgbImage::filled(16, 12, [i as u8 * 30, 0, 0])))
//!     .collect();
//! let video = MemoryFrames::new(meta.clone(), frames)?;
//!
//! let plan = plan_wrap_around(&meta, 2, 5)?;
//! assert_eq!(plan.clips[0].member_indices, vec![0, 0, 1, 1, 2]);
//!
//! let mut backend = StubBackend::new(42);
//! let masks = decode_video(&mut backend, &video, &plan, "exp0", "the red wash")?;
//! assert_eq!(masks.len(), 7);
//! # Ok::<(), rvos_core::Error>(())
//! ```

pub mod cli;
pub mod compress;
pub mod ensemble;
pub mod error;
pub mod mask_io;
pub mod metrics;
pub mod pipeline;
pub mod sampling;
pub mod segmenter;
pub mod types;

pub use error::{Error, Result};
pub use types::{
    validate_plan, BinaryMask, ClipSpec, Frame, PredictionSource, RgbImage, SamplingPlan, SoftMask,
    Strategy, VideoMeta, Violation, WeightConfig,
};
