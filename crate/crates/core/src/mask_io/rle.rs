//! Run-length coding of binary masks in column-major pixel order, the
//! dominant interchange convention for segmentation prediction dumps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::BinaryMask;

/// A run-length encoded mask. Counts alternate background/foreground runs
/// over column-major pixel order and always start with a background run,
/// which is 0 when the first pixel is foreground.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RleMask {
    pub width: u32,
    pub height: u32,
    pub counts: Vec<usize>,
}

/// Encode a mask. The output is canonical: only the leading count may be 0.
pub fn rle_encode(mask: &BinaryMask) -> RleMask {
    let (w, h) = (mask.width as usize, mask.height as usize);
    let mut counts = Vec::new();
    let mut current = 0u8; // runs start on background
    let mut run = 0usize;
    for x in 0..w {
        for y in 0..h {
            let bit = mask.bits[y * w + x];
            if bit == current {
                run += 1;
            } else {
                counts.push(run);
                current = bit;
                run = 1;
            }
        }
    }
    counts.push(run);
    if counts == [0] {
        // zero-pixel mask; keep the invariant sum == w*h with an empty list
        counts.clear();
    }
    RleMask {
        width: mask.width,
        height: mask.height,
        counts,
    }
}

/// Decode back to a dense mask. Fails if the counts do not cover exactly
/// `width * height` pixels.
pub fn rle_decode(rle: &RleMask) -> Result<BinaryMask> {
    let (w, h) = (rle.width as usize, rle.height as usize);
    let total: usize = rle.counts.iter().sum();
    if total != w * h {
        return Err(Error::validation(format!(
            "rle counts sum to {total}, mask {}x{} needs {}",
            rle.width,
            rle.height,
            w * h
        )));
    }
    let mut bits = vec![0u8; w * h];
    let mut pos = 0usize;
    for (i, &count) in rle.counts.iter().enumerate() {
        let value = (i % 2) as u8;
        if value == 1 {
            for p in pos..pos + count {
                // column-major position back to row-major storage
                let (x, y) = (p / h, p % h);
                bits[y * w + x] = 1;
            }
        }
        pos += count;
    }
    BinaryMask::new(rle.width, rle.height, bits)
}
