//! Selective averaging: fuse prediction sources by weighted per-pixel
//! voting, binarized at a strict threshold.
//!
//! A pixel becomes foreground iff its weighted vote strictly exceeds the
//! threshold, so an equal-weight two-source disagreement lands exactly on
//! 0.5 and resolves to background. To keep that tie exact the vote is
//! evaluated in integer arithmetic whenever every weight (and the
//! threshold) has a short decimal form; otherwise a division-free float
//! comparison is used.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::types::{BinaryMask, PredictionSource, WeightConfig};

/// Weights scaled to integers when exactly representable at 1e6 resolution.
enum VoteArithmetic {
    Exact { weights: Vec<u128>, threshold: u128 },
    Float { weights: Vec<f64>, threshold: f64 },
}

const SCALE: f64 = 1e6;

impl VoteArithmetic {
    fn for_weights(weights: &[f64], threshold: f64) -> Self {
        let mut scaled = Vec::with_capacity(weights.len());
        for &w in weights.iter().chain(std::iter::once(&threshold)) {
            let s = (w * SCALE).round();
            if s.is_finite() && s >= 0.0 && s < 2f64.powi(53) && s / SCALE == w {
                scaled.push(s as u128);
            } else {
                return VoteArithmetic::Float {
                    weights: weights.to_vec(),
                    threshold,
                };
            }
        }
        let threshold = scaled.pop().expect("threshold was pushed last");
        VoteArithmetic::Exact {
            weights: scaled,
            threshold,
        }
    }

    /// True iff `sum(votes) / sum(weights) > threshold`, division-free.
    fn passes(&self, votes: impl Iterator<Item = bool> + Clone) -> bool {
        match self {
            VoteArithmetic::Exact { weights, threshold } => {
                let total: u128 = weights.iter().sum();
                let acc: u128 = weights
                    .iter()
                    .zip(votes)
                    .filter_map(|(&w, v)| v.then_some(w))
                    .sum();
                acc * 1_000_000 > threshold * total
            }
            VoteArithmetic::Float { weights, threshold } => {
                let total: f64 = weights.iter().sum();
                let acc: f64 = weights
                    .iter()
                    .zip(votes)
                    .filter_map(|(&w, v)| v.then_some(w))
                    .sum();
                if *threshold == 0.5 {
                    2.0 * acc > total
                } else {
                    acc > threshold * total
                }
            }
        }
    }
}

/// Fuse one pixel-aligned set of masks: output pixel is 1 iff the weighted
/// average of the input pixels strictly exceeds 0.5.
pub fn selective_average(masks_with_weights: &[(&BinaryMask, f64)]) -> Result<BinaryMask> {
    selective_average_with_threshold(masks_with_weights, 0.5)
}

/// `selective_average` with an explicit vote threshold in [0, 1).
pub fn selective_average_with_threshold(
    masks_with_weights: &[(&BinaryMask, f64)],
    threshold: f64,
) -> Result<BinaryMask> {
    let (first, _) = masks_with_weights
        .first()
        .ok_or_else(|| Error::validation("selective average needs at least one mask"))?;
    let (width, height) = (first.width, first.height);
    for (mask, weight) in masks_with_weights {
        if mask.width != width || mask.height != height {
            return Err(Error::validation(format!(
                "mask {}x{} does not match {}x{}",
                mask.width, mask.height, width, height,
            )));
        }
        if !weight.is_finite() || *weight < 0.0 {
            return Err(Error::validation(format!("invalid weight {weight}")));
        }
    }
    let weights: Vec<f64> = masks_with_weights.iter().map(|(_, w)| *w).collect();
    if weights.iter().sum::<f64>() <= 0.0 {
        return Err(Error::validation("all ensemble weights are zero"));
    }
    if !threshold.is_finite() || !(0.0..1.0).contains(&threshold) {
        return Err(Error::validation(format!(
            "vote threshold {threshold} outside [0,1)"
        )));
    }

    let vote = VoteArithmetic::for_weights(&weights, threshold);
    let mut bits = vec![0u8; width as usize * height as usize];
    for (p, bit) in bits.iter_mut().enumerate() {
        let votes = masks_with_weights.iter().map(|(m, _)| m.bits[p] == 1);
        if vote.passes(votes) {
            *bit = 1;
        }
    }
    BinaryMask::new(width, height, bits)
}

/// Run selective averaging over whole prediction sources: for every
/// (video, expression, frame), fuse the masks of the sources named by the
/// config. Sources absent from the config are ignored.
pub fn ensemble_run(
    sources: &[PredictionSource],
    config: &WeightConfig,
) -> Result<PredictionSource> {
    config.validate()?;

    let mut picked: Vec<&PredictionSource> = Vec::new();
    for source_id in config.entries.keys() {
        match sources.iter().find(|s| &s.source_id == source_id) {
            Some(s) => picked.push(s),
            None => {
                return Err(Error::validation(format!(
                    "weight config names unknown source {source_id:?}"
                )))
            }
        }
    }

    // All configured sources must cover the same sequences.
    let key_union: BTreeSet<(String, String)> =
        picked.iter().flat_map(|s| s.sequence_keys()).collect();
    let mut missing = Vec::new();
    for source in &picked {
        for (video_id, exp_id) in &key_union {
            if source.sequence(video_id, exp_id).is_none() {
                missing.push(format!("{}:{video_id}/{exp_id}", source.source_id));
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::validation(format!(
            "prediction key spaces differ; missing: {}",
            missing.join(", ")
        )));
    }

    let weights: Vec<f64> = picked
        .iter()
        .map(|s| config.entries[&s.source_id])
        .collect();

    let mut fused = PredictionSource::new("selective_average", 1.0)?;
    for (video_id, exp_id) in &key_union {
        let sequences: Vec<&[BinaryMask]> = picked
            .iter()
            .map(|s| s.sequence(video_id, exp_id).expect("checked above"))
            .collect();
        let frame_count = sequences[0].len();
        if let Some((i, seq)) = sequences
            .iter()
            .enumerate()
            .find(|(_, s)| s.len() != frame_count)
        {
            return Err(Error::validation(format!(
                "{}:{video_id}/{exp_id} has {} frames, expected {frame_count}",
                picked[i].source_id,
                seq.len()
            )));
        }
        let mut frames = Vec::with_capacity(frame_count);
        for f in 0..frame_count {
            let entries: Vec<(&BinaryMask, f64)> = sequences
                .iter()
                .zip(&weights)
                .map(|(seq, &w)| (&seq[f], w))
                .collect();
            frames.push(selective_average_with_threshold(
                &entries,
                config.threshold,
            )?);
        }
        fused.insert_sequence(video_id.clone(), exp_id.clone(), frames);
    }
    Ok(fused)
}
