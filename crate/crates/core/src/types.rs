//! Shared domain types: video metadata, frames, masks, sampling plans and
//! prediction sources.
//!
//! Everything here is immutable after construction and safe to share across
//! threads. Frame indices are 0-based throughout.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Metadata for one video: identity, original frame count, pixel dimensions
/// and one locator per frame.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VideoMeta {
    pub video_id: String,
    /// Original video length, `T_ori`.
    pub frame_count: usize,
    pub width: u32,
    pub height: u32,
    /// Ordered frame locators, one per original frame.
    pub frame_uris: Vec<String>,
}

impl VideoMeta {
    pub fn new(
        video_id: impl Into<String>,
        width: u32,
        height: u32,
        frame_uris: Vec<String>,
    ) -> Result<Self> {
        let meta = VideoMeta {
            video_id: video_id.into(),
            frame_count: frame_uris.len(),
            width,
            height,
            frame_uris,
        };
        meta.validate()?;
        Ok(meta)
    }

    /// Metadata with synthesized locators, for callers that only plan and
    /// never touch pixels (e.g. foreign-language bindings).
    pub fn with_placeholder_uris(
        video_id: impl Into<String>,
        frame_count: usize,
        width: u32,
        height: u32,
    ) -> Result<Self> {
        let uris = (0..frame_count).map(|i| format!("frame://{i}")).collect();
        Self::new(video_id, width, height, uris)
    }

    pub fn validate(&self) -> Result<()> {
        if self.frame_count == 0 {
            return Err(Error::validation(format!(
                "video {:?}: frame count must be positive",
                self.video_id
            )));
        }
        if self.frame_uris.len() != self.frame_count {
            return Err(Error::validation(format!(
                "video {:?}: {} frame uris for {} frames",
                self.video_id,
                self.frame_uris.len(),
                self.frame_count
            )));
        }
        if self.width == 0 || self.height == 0 {
            return Err(Error::validation(format!(
                "video {:?}: zero pixel dimension {}x{}",
                self.video_id, self.width, self.height
            )));
        }
        Ok(())
    }
}

/// A plain H×W×3 8-bit RGB raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: u32,
    pub height: u32,
    /// `width * height * 3` bytes, rows top to bottom.
    pub data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        let expected = width as usize * height as usize * 3;
        if data.len() != expected {
            return Err(Error::validation(format!(
                "rgb raster {}x{} needs {} bytes, got {}",
                width,
                height,
                expected,
                data.len()
            )));
        }
        Ok(RgbImage {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: u32, height: u32, rgb: [u8; 3]) -> Self {
        let mut data = Vec::with_capacity(width as usize * height as usize * 3);
        for _ in 0..width as usize * height as usize {
            data.extend_from_slice(&rgb);
        }
        RgbImage {
            width,
            height,
            data,
        }
    }

    #[inline]
    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let off = (y as usize * self.width as usize + x as usize) * 3;
        [self.data[off], self.data[off + 1], self.data[off + 2]]
    }

    #[inline]
    pub fn set_pixel(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let off = (y as usize * self.width as usize + x as usize) * 3;
        self.data[off..off + 3].copy_from_slice(&rgb);
    }
}

/// One video frame: its original temporal index plus pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    /// Original temporal index within the video, 0-based.
    pub index: usize,
    pub image: RgbImage,
}

impl Frame {
    pub fn new(index: usize, image: RgbImage) -> Self {
        Frame { index, image }
    }

    pub fn width(&self) -> u32 {
        self.image.width
    }

    pub fn height(&self) -> u32 {
        self.image.height
    }
}

/// Per-frame H×W raster of {0,1} values, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    pub width: u32,
    pub height: u32,
    /// One byte per pixel, each 0 or 1.
    pub bits: Vec<u8>,
}

impl BinaryMask {
    pub fn new(width: u32, height: u32, bits: Vec<u8>) -> Result<Self> {
        if bits.len() != width as usize * height as usize {
            return Err(Error::validation(format!(
                "mask {}x{} needs {} bits, got {}",
                width,
                height,
                width as usize * height as usize,
                bits.len()
            )));
        }
        if let Some(bad) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::validation(format!(
                "mask value {bad} outside {{0,1}}"
            )));
        }
        Ok(BinaryMask {
            width,
            height,
            bits,
        })
    }

    pub fn zeros(width: u32, height: u32) -> Self {
        BinaryMask {
            width,
            height,
            bits: vec![0; width as usize * height as usize],
        }
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.bits[y as usize * self.width as usize + x as usize]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, v: u8) {
        debug_assert!(v <= 1);
        self.bits[y as usize * self.width as usize + x as usize] = v;
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }
}

/// Per-frame H×W raster of values in `[0,1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftMask {
    pub width: u32,
    pub height: u32,
    pub values: Vec<f32>,
}

impl SoftMask {
    pub fn new(width: u32, height: u32, values: Vec<f32>) -> Result<Self> {
        if values.len() != width as usize * height as usize {
            return Err(Error::validation(format!(
                "soft mask {}x{} needs {} values, got {}",
                width,
                height,
                width as usize * height as usize,
                values.len()
            )));
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::validation("soft mask value outside [0,1]"));
        }
        Ok(SoftMask {
            width,
            height,
            values,
        })
    }

    pub fn zeros(width: u32, height: u32) -> Self {
        SoftMask {
            width,
            height,
            values: vec![0.0; width as usize * height as usize],
        }
    }

    /// Binarize at the decoding threshold: value >= 0.5 becomes foreground.
    pub fn binarize(&self) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            bits: self
                .values
                .iter()
                .map(|&v| if v >= 0.5 { 1 } else { 0 })
                .collect(),
        }
    }
}

/// The five inference-time frame sampling strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Uniform,
    UniformPlus,
    QFrame,
    WrapAround,
    WrapAroundPlus,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Uniform,
        Strategy::UniformPlus,
        Strategy::QFrame,
        Strategy::WrapAround,
        Strategy::WrapAroundPlus,
    ];

    /// Canonical lowercase name, used in source ids and file names.
    pub fn slug(&self) -> &'static str {
        match self {
            Strategy::Uniform => "uniform",
            Strategy::UniformPlus => "uniform+",
            Strategy::QFrame => "qframe",
            Strategy::WrapAround => "wrap_around",
            Strategy::WrapAroundPlus => "wrap_around+",
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.slug())
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "uniform" => Ok(Strategy::Uniform),
            "uniform+" | "uniform_plus" => Ok(Strategy::UniformPlus),
            "qframe" | "q_frame" => Ok(Strategy::QFrame),
            "wrap_around" | "wraparound" => Ok(Strategy::WrapAround),
            "wrap_around+" | "wraparound+" | "wrap_around_plus" => Ok(Strategy::WrapAroundPlus),
            other => Err(Error::validation(format!("unknown strategy {other:?}"))),
        }
    }
}

/// One clip: its index, the `c` member frame indices it samples, and the key
/// frame (always the first member).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClipSpec {
    pub clip_index: usize,
    /// Exactly `c` original-frame indices, non-decreasing. Duplicates are
    /// permitted for videos shorter than the sampling target.
    pub member_indices: Vec<usize>,
    /// The clip's key frame; equals `member_indices[0]`.
    pub key_index: usize,
}

impl ClipSpec {
    pub fn new(clip_index: usize, member_indices: Vec<usize>) -> Result<Self> {
        let key_index = *member_indices
            .first()
            .ok_or_else(|| Error::validation("clip with no members"))?;
        Ok(ClipSpec {
            clip_index,
            member_indices,
            key_index,
        })
    }
}

/// A complete sampling plan for one video: how the `T = N*c` sampled frames
/// are grouped into clips and which clip(s) decode each original frame.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub strategy: Strategy,
    /// Number of clips, `N`.
    pub n_clips: usize,
    /// Frames per clip, `c = g*g + 1`.
    pub clip_len: usize,
    /// Grid side of the compressed image, `g`.
    pub grid: usize,
    /// Sampling target, `T = N * c`.
    pub target_len: usize,
    pub clips: Vec<ClipSpec>,
    /// For each original frame index, the clip indices whose prompt decodes
    /// it: one entry normally, two adjacent entries for frames shared by
    /// neighbouring clips.
    pub frame_token_map: BTreeMap<usize, Vec<usize>>,
    /// Frames beyond `T` are handled by the tracker's memory instead of a
    /// fresh prompt (wrap-around on videos longer than `T`).
    pub tail_propagation: bool,
}

impl SamplingPlan {
    /// Clip indices responsible for decoding `frame`.
    pub fn tokens_for(&self, frame: usize) -> Option<&[usize]> {
        self.frame_token_map.get(&frame).map(|v| v.as_slice())
    }

    /// Original frame count covered by this plan.
    pub fn frame_count(&self) -> usize {
        self.frame_token_map.len()
    }

    /// Frames mapped to clip `clip_index`, in temporal order.
    pub fn frames_for_clip(&self, clip_index: usize) -> Vec<usize> {
        self.frame_token_map
            .iter()
            .filter(|(_, clips)| clips.contains(&clip_index))
            .map(|(&frame, _)| frame)
            .collect()
    }
}

/// A single plan-invariant violation. Violations are data, not failures:
/// `validate_plan` reports all of them instead of stopping at the first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub message: String,
}

impl Violation {
    fn new(message: impl Into<String>) -> Self {
        Violation {
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

/// Check every sampling-plan invariant against the video it targets.
/// Returns an empty list iff the plan is valid.
pub fn validate_plan(plan: &SamplingPlan, meta: &VideoMeta) -> Vec<Violation> {
    let mut violations = Vec::new();
    let t_ori = meta.frame_count;

    if plan.grid == 0 || plan.clip_len != plan.grid * plan.grid + 1 {
        violations.push(Violation::new(format!(
            "c != g^2+1: c={}, g={}",
            plan.clip_len, plan.grid
        )));
    }
    if plan.target_len != plan.n_clips * plan.clip_len {
        violations.push(Violation::new(format!(
            "T != N*c: T={}, N={}, c={}",
            plan.target_len, plan.n_clips, plan.clip_len
        )));
    }
    if plan.clips.len() != plan.n_clips {
        violations.push(Violation::new(format!(
            "expected {} clips, plan has {}",
            plan.n_clips,
            plan.clips.len()
        )));
    }

    for (i, clip) in plan.clips.iter().enumerate() {
        if clip.clip_index != i {
            violations.push(Violation::new(format!(
                "clip at position {i} carries index {}",
                clip.clip_index
            )));
        }
        if clip.member_indices.len() != plan.clip_len {
            violations.push(Violation::new(format!(
                "clip {i}: {} members, expected c={}",
                clip.member_indices.len(),
                plan.clip_len
            )));
        }
        if clip.member_indices.windows(2).any(|w| w[0] > w[1]) {
            violations.push(Violation::new(format!("clip {i}: members decrease")));
        }
        if clip.member_indices.first() != Some(&clip.key_index) {
            violations.push(Violation::new(format!(
                "clip {i}: key index {} is not the first member",
                clip.key_index
            )));
        }
        if let Some(&bad) = clip.member_indices.iter().find(|&&m| m >= t_ori) {
            violations.push(Violation::new(format!(
                "clip {i}: member {bad} outside [0, {t_ori})"
            )));
        }
    }

    // Coverage: the token map keys must be exactly [0, t_ori).
    for frame in 0..t_ori {
        if !plan.frame_token_map.contains_key(&frame) {
            violations.push(Violation::new(format!(
                "frame {frame} missing from frame_token_map"
            )));
        }
    }
    let dual_allowed = matches!(plan.strategy, Strategy::UniformPlus | Strategy::QFrame)
        && t_ori < plan.target_len;
    for (&frame, clips) in &plan.frame_token_map {
        if frame >= t_ori {
            violations.push(Violation::new(format!(
                "frame_token_map key {frame} outside [0, {t_ori})"
            )));
            continue;
        }
        match clips.len() {
            0 => violations.push(Violation::new(format!("frame {frame}: empty token entry"))),
            1 => {}
            2 => {
                if clips[0] + 1 != clips[1] {
                    violations.push(Violation::new(format!(
                        "frame {frame}: tokens {:?} not adjacent",
                        clips
                    )));
                }
                if !dual_allowed {
                    violations.push(Violation::new(format!(
                        "frame {frame}: 2 tokens not permitted for {} with T_ori={} >= T={}",
                        plan.strategy, t_ori, plan.target_len
                    )));
                }
            }
            n => violations.push(Violation::new(format!("frame {frame}: {n} tokens (max 2)"))),
        }
        if let Some(&bad) = clips.iter().find(|&&c| c >= plan.n_clips) {
            violations.push(Violation::new(format!(
                "frame {frame}: token {bad} outside [0, {})",
                plan.n_clips
            )));
        }
    }

    violations
}

/// All predictions produced by one (model, strategy) pair, keyed by video
/// then expression, plus the weight it carries in ensembling.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSource {
    /// e.g. "26B/wrap_around+"
    pub source_id: String,
    pub weight: f64,
    /// video_id -> exp_id -> one mask per original frame.
    pub masks: BTreeMap<String, BTreeMap<String, Vec<BinaryMask>>>,
}

impl PredictionSource {
    pub fn new(source_id: impl Into<String>, weight: f64) -> Result<Self> {
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::validation("source weight must be >= 0"));
        }
        Ok(PredictionSource {
            source_id: source_id.into(),
            weight,
            masks: BTreeMap::new(),
        })
    }

    /// Every (video, exp) key in deterministic order.
    pub fn sequence_keys(&self) -> Vec<(String, String)> {
        self.masks
            .iter()
            .flat_map(|(v, exps)| exps.keys().map(move |e| (v.clone(), e.clone())))
            .collect()
    }

    pub fn sequence(&self, video_id: &str, exp_id: &str) -> Option<&[BinaryMask]> {
        self.masks
            .get(video_id)
            .and_then(|exps| exps.get(exp_id))
            .map(|v| v.as_slice())
    }

    pub fn insert_sequence(
        &mut self,
        video_id: impl Into<String>,
        exp_id: impl Into<String>,
        frames: Vec<BinaryMask>,
    ) {
        self.masks
            .entry(video_id.into())
            .or_default()
            .insert(exp_id.into(), frames);
    }
}

/// Weighting scheme for selective averaging: source id -> weight, plus the
/// binarization threshold (0.5 unless a config explicitly overrides it).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightConfig {
    pub entries: BTreeMap<String, f64>,
    #[serde(default = "WeightConfig::default_threshold")]
    pub threshold: f64,
}

impl WeightConfig {
    pub fn default_threshold() -> f64 {
        0.5
    }

    pub fn new(entries: BTreeMap<String, f64>) -> Result<Self> {
        let config = WeightConfig {
            entries,
            threshold: Self::default_threshold(),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.entries.values().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(Error::validation(
                "weight config: weights must be finite and >= 0",
            ));
        }
        if !self.entries.values().any(|&w| w > 0.0) {
            return Err(Error::validation(
                "weight config: needs at least one entry with weight > 0",
            ));
        }
        if !self.threshold.is_finite() || !(0.0..1.0).contains(&self.threshold) {
            return Err(Error::validation(format!(
                "weight config: threshold {} outside [0,1)",
                self.threshold
            )));
        }
        Ok(())
    }
}
