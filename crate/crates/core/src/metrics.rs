//! Region similarity (J), boundary accuracy (F) and their mean (J&F).
//!
//! J is the per-frame intersection-over-union averaged over a sequence. F
//! extracts one-pixel boundaries (a foreground pixel is boundary iff any
//! 4-neighbour is background or lies outside the image) and scores
//! precision/recall of boundary pixels within a Chebyshev distance
//! tolerance. Both score 1.0 when prediction and ground truth are both
//! empty, rewarding correct prediction of absent objects.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::{BinaryMask, PredictionSource};

/// How the boundary-match tolerance is derived for a sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ToleranceRule {
    /// `max(1, round(fraction * image diagonal))` pixels.
    DiagonalFraction(f64),
    /// A fixed pixel radius.
    Fixed(u32),
}

impl Default for ToleranceRule {
    fn default() -> Self {
        // Common evaluation practice for video segmentation benchmarks.
        ToleranceRule::DiagonalFraction(0.008)
    }
}

impl ToleranceRule {
    pub fn tolerance_for(&self, width: u32, height: u32) -> u32 {
        match *self {
            ToleranceRule::Fixed(t) => t,
            ToleranceRule::DiagonalFraction(f) => {
                let diag = ((width as f64).powi(2) + (height as f64).powi(2)).sqrt();
                ((f * diag).round() as u32).max(1)
            }
        }
    }
}

/// Scores for one (video, expression) sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceScore {
    pub video_id: String,
    pub exp_id: String,
    pub j: f64,
    pub f: f64,
}

/// Evaluation output: per-sequence scores plus unweighted global means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub per_sequence: Vec<SequenceScore>,
    pub j: f64,
    pub f: f64,
    pub jf: f64,
}

impl EvalResult {
    /// Combine global J and F; J&F is their arithmetic mean by definition.
    pub fn from_parts(per_sequence: Vec<SequenceScore>, j: f64, f: f64) -> Self {
        EvalResult {
            per_sequence,
            j,
            f,
            jf: (j + f) / 2.0,
        }
    }
}

fn check_dims(pred: &BinaryMask, gt: &BinaryMask) -> Result<()> {
    if pred.width != gt.width || pred.height != gt.height {
        return Err(Error::validation(format!(
            "mask dimensions differ: {}x{} vs {}x{}",
            pred.width, pred.height, gt.width, gt.height
        )));
    }
    Ok(())
}

/// Intersection-over-union for a single frame; both-empty scores 1.0.
pub fn frame_iou(pred: &BinaryMask, gt: &BinaryMask) -> Result<f64> {
    check_dims(pred, gt)?;
    let mut intersection = 0usize;
    let mut union = 0usize;
    for (&p, &g) in pred.bits.iter().zip(&gt.bits) {
        if p == 1 && g == 1 {
            intersection += 1;
        }
        if p == 1 || g == 1 {
            union += 1;
        }
    }
    if union == 0 {
        Ok(1.0)
    } else {
        Ok(intersection as f64 / union as f64)
    }
}

/// Mean per-frame IoU over a sequence.
pub fn jaccard(pred: &[BinaryMask], gt: &[BinaryMask]) -> Result<f64> {
    if pred.len() != gt.len() {
        return Err(Error::validation(format!(
            "sequence lengths differ: {} vs {}",
            pred.len(),
            gt.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::validation("cannot score an empty sequence"));
    }
    let mut sum = 0.0;
    for (p, g) in pred.iter().zip(gt) {
        sum += frame_iou(p, g)?;
    }
    Ok(sum / pred.len() as f64)
}

/// Boundary pixels of a mask: foreground pixels with a background
/// 4-neighbour or touching the image edge.
pub fn boundary_pixels(mask: &BinaryMask) -> Vec<(u32, u32)> {
    let (w, h) = (mask.width, mask.height);
    let mut out = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if mask.get(x, y) == 0 {
                continue;
            }
            let on_edge = x == 0 || y == 0 || x == w - 1 || y == h - 1;
            let neighbour_bg = (x > 0 && mask.get(x - 1, y) == 0)
                || (x + 1 < w && mask.get(x + 1, y) == 0)
                || (y > 0 && mask.get(x, y - 1) == 0)
                || (y + 1 < h && mask.get(x, y + 1) == 0);
            if on_edge || neighbour_bg {
                out.push((x, y));
            }
        }
    }
    out
}

/// Mark every pixel within Chebyshev distance `tol` of a boundary pixel.
fn dilate_chebyshev(points: &[(u32, u32)], w: u32, h: u32, tol: u32) -> Vec<bool> {
    let mut hit = vec![false; w as usize * h as usize];
    for &(x, y) in points {
        let x0 = x.saturating_sub(tol);
        let y0 = y.saturating_sub(tol);
        let x1 = (x + tol).min(w - 1);
        let y1 = (y + tol).min(h - 1);
        for yy in y0..=y1 {
            for xx in x0..=x1 {
                hit[yy as usize * w as usize + xx as usize] = true;
            }
        }
    }
    hit
}

/// Boundary F-measure for one frame at tolerance `tol`.
pub fn boundary_f(pred: &BinaryMask, gt: &BinaryMask, tol: u32) -> Result<f64> {
    check_dims(pred, gt)?;
    let pred_boundary = boundary_pixels(pred);
    let gt_boundary = boundary_pixels(gt);
    match (pred_boundary.is_empty(), gt_boundary.is_empty()) {
        (true, true) => return Ok(1.0),
        (true, false) | (false, true) => return Ok(0.0),
        _ => {}
    }
    let (w, h) = (pred.width, pred.height);
    let near_gt = dilate_chebyshev(&gt_boundary, w, h, tol);
    let near_pred = dilate_chebyshev(&pred_boundary, w, h, tol);

    let matched_pred = pred_boundary
        .iter()
        .filter(|&&(x, y)| near_gt[y as usize * w as usize + x as usize])
        .count();
    let matched_gt = gt_boundary
        .iter()
        .filter(|&&(x, y)| near_pred[y as usize * w as usize + x as usize])
        .count();
    let precision = matched_pred as f64 / pred_boundary.len() as f64;
    let recall = matched_gt as f64 / gt_boundary.len() as f64;
    if precision + recall == 0.0 {
        Ok(0.0)
    } else {
        Ok(2.0 * precision * recall / (precision + recall))
    }
}

/// Mean boundary F over a sequence.
pub fn boundary_f_sequence(pred: &[BinaryMask], gt: &[BinaryMask], tol: u32) -> Result<f64> {
    if pred.len() != gt.len() {
        return Err(Error::validation(format!(
            "sequence lengths differ: {} vs {}",
            pred.len(),
            gt.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::validation("cannot score an empty sequence"));
    }
    let mut sum = 0.0;
    for (p, g) in pred.iter().zip(gt) {
        sum += boundary_f(p, g, tol)?;
    }
    Ok(sum / pred.len() as f64)
}

/// Score a prediction source against ground truth over their shared key
/// space. Every ground-truth sequence must have a prediction.
pub fn evaluate(
    pred: &PredictionSource,
    gt: &PredictionSource,
    tol_rule: ToleranceRule,
) -> Result<EvalResult> {
    let gt_keys = gt.sequence_keys();
    if gt_keys.is_empty() {
        return Err(Error::validation("ground truth holds no sequences"));
    }
    let missing: Vec<String> = gt_keys
        .iter()
        .filter(|(v, e)| pred.sequence(v, e).is_none())
        .map(|(v, e)| format!("{v}/{e}"))
        .collect();
    if !missing.is_empty() {
        return Err(Error::validation(format!(
            "predictions missing for: {}",
            missing.join(", ")
        )));
    }

    let mut per_sequence = Vec::with_capacity(gt_keys.len());
    let mut j_sum = 0.0;
    let mut f_sum = 0.0;
    for (video_id, exp_id) in &gt_keys {
        let p = pred.sequence(video_id, exp_id).expect("checked above");
        let g = gt.sequence(video_id, exp_id).expect("gt key");
        let g0 = g
            .first()
            .ok_or_else(|| Error::validation(format!("{video_id}/{exp_id}: empty sequence")))?;
        let tol = tol_rule.tolerance_for(g0.width, g0.height);
        let j = jaccard(p, g)?;
        let f = boundary_f_sequence(p, g, tol)?;
        j_sum += j;
        f_sum += f;
        per_sequence.push(SequenceScore {
            video_id: video_id.clone(),
            exp_id: exp_id.clone(),
            j,
            f,
        });
    }
    let n = gt_keys.len() as f64;
    Ok(EvalResult::from_parts(per_sequence, j_sum / n, f_sum / n))
}

/// Group per-sequence scores by video, for report tables.
pub fn scores_by_video(result: &EvalResult) -> BTreeMap<&str, Vec<&SequenceScore>> {
    let mut grouped: BTreeMap<&str, Vec<&SequenceScore>> = BTreeMap::new();
    for s in &result.per_sequence {
        grouped.entry(s.video_id.as_str()).or_default().push(s);
    }
    grouped
}
