//! Key-frame compression: tile a clip's non-key frames into a g×g grid and
//! box-downscale the grid back to frame size, so each clip contributes just
//! two images (key + composite) to the prompt generator.

use crate::error::{Error, Result};
use crate::sampling::grid_for_clip_len;
use crate::types::{Frame, RgbImage};

/// A clip reduced to its two prompt images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompressedClip {
    /// The clip's first frame, passed through untouched.
    pub key_frame: Frame,
    /// The remaining g*g members tiled and resized back to H×W.
    pub compressed: RgbImage,
    /// Original indices of the tiled frames, row-major.
    pub source_indices: Vec<usize>,
}

/// Tile exactly `g*g` equally sized frames into a g×g grid image, row-major
/// (left to right, top to bottom). Output is gH×gW.
pub fn tile_grid(frames: &[Frame], grid: usize) -> Result<RgbImage> {
    if grid == 0 {
        return Err(Error::validation("grid side must be >= 1"));
    }
    if frames.len() != grid * grid {
        return Err(Error::validation(format!(
            "grid {grid}x{grid} needs {} frames, got {}",
            grid * grid,
            frames.len()
        )));
    }
    let (w, h) = (frames[0].width(), frames[0].height());
    if let Some(bad) = frames.iter().find(|f| f.width() != w || f.height() != h) {
        return Err(Error::validation(format!(
            "frame {} is {}x{}, expected {}x{}",
            bad.index,
            bad.width(),
            bad.height(),
            w,
            h
        )));
    }

    let out_w = w as usize * grid;
    let out_h = h as usize * grid;
    let mut data = vec![0u8; out_w * out_h * 3];
    for (cell, frame) in frames.iter().enumerate() {
        let (row, col) = (cell / grid, cell % grid);
        for y in 0..h as usize {
            let src_off = y * w as usize * 3;
            let dst_off = ((row * h as usize + y) * out_w + col * w as usize) * 3;
            data[dst_off..dst_off + w as usize * 3]
                .copy_from_slice(&frame.image.data[src_off..src_off + w as usize * 3]);
        }
    }
    RgbImage::new(out_w as u32, out_h as u32, data)
}

/// Downscale by an exact integer factor with a box (area-average) filter:
/// each output pixel is the per-channel mean of its source block, rounded
/// half up. Input dimensions must be integer multiples of the target.
pub fn resize_to(image: &RgbImage, target_w: u32, target_h: u32) -> Result<RgbImage> {
    if target_w == 0 || target_h == 0 {
        return Err(Error::validation("resize target must be non-zero"));
    }
    if !image.width.is_multiple_of(target_w) || !image.height.is_multiple_of(target_h) {
        return Err(Error::validation(format!(
            "resize {}x{} -> {}x{} is not an integer downscale",
            image.width, image.height, target_w, target_h
        )));
    }
    let fx = (image.width / target_w) as usize;
    let fy = (image.height / target_h) as usize;
    if fx == 1 && fy == 1 {
        return Ok(image.clone());
    }

    let block = (fx * fy) as u32;
    let src_w = image.width as usize;
    let mut data = vec![0u8; target_w as usize * target_h as usize * 3];
    for oy in 0..target_h as usize {
        for ox in 0..target_w as usize {
            let mut sums = [0u32; 3];
            for dy in 0..fy {
                let row = (oy * fy + dy) * src_w;
                for dx in 0..fx {
                    let off = (row + ox * fx + dx) * 3;
                    sums[0] += image.data[off] as u32;
                    sums[1] += image.data[off + 1] as u32;
                    sums[2] += image.data[off + 2] as u32;
                }
            }
            let dst = (oy * target_w as usize + ox) * 3;
            for ch in 0..3 {
                // round(sum / block) half up, in integers
                data[dst + ch] = ((2 * sums[ch] + block) / (2 * block)) as u8;
            }
        }
    }
    RgbImage::new(target_w, target_h, data)
}

/// Compress one clip of `c = g*g + 1` frames: the first frame is the key,
/// the rest are tiled and downscaled back to frame size.
pub fn compress_clip(clip_frames: &[Frame], grid: usize) -> Result<CompressedClip> {
    let clip_len = grid * grid + 1;
    if clip_frames.len() != clip_len {
        return Err(Error::validation(format!(
            "clip with g={grid} needs {clip_len} frames, got {}",
            clip_frames.len()
        )));
    }
    let key_frame = clip_frames[0].clone();
    let rest = &clip_frames[1..];
    let grid_image = tile_grid(rest, grid)?;
    let compressed = resize_to(&grid_image, key_frame.width(), key_frame.height())?;
    Ok(CompressedClip {
        key_frame,
        compressed,
        source_indices: rest.iter().map(|f| f.index).collect(),
    })
}

/// Compress a clip inferring `g` from its length.
pub fn compress_clip_auto(clip_frames: &[Frame]) -> Result<CompressedClip> {
    let grid = grid_for_clip_len(clip_frames.len())?;
    compress_clip(clip_frames, grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn constant_frame(index: usize, w: u32, h: u32, rgb: [u8; 3]) -> Frame {
        Frame::new(index, RgbImage::filled(w, h, rgb))
    }

    #[test]
    fn tile_2x2_constant_quadrants() {
        let frames = vec![
            constant_frame(1, 2, 2, [255, 0, 0]),     // red
            constant_frame(2, 2, 2, [0, 255, 0]),     // green
            constant_frame(3, 2, 2, [0, 0, 255]),     // blue
            constant_frame(4, 2, 2, [255, 255, 255]), // white
        ];
        let grid = tile_grid(&frames, 2).unwrap();
        assert_eq!((grid.width, grid.height), (4, 4));
        assert_eq!(grid.pixel(0, 0), [255, 0, 0]);
        assert_eq!(grid.pixel(3, 0), [0, 255, 0]);
        assert_eq!(grid.pixel(0, 3), [0, 0, 255]);
        assert_eq!(grid.pixel(3, 3), [255, 255, 255]);
    }

    #[test]
    fn tile_3x3_shape() {
        let frames: Vec<Frame> = (0..9)
            .map(|i| constant_frame(i, 5, 4, [i as u8, 0, 0]))
            .collect();
        let grid = tile_grid(&frames, 3).unwrap();
        assert_eq!((grid.width, grid.height), (15, 12));
        // row-major placement
        assert_eq!(grid.pixel(0, 0), [0, 0, 0]);
        assert_eq!(grid.pixel(5, 0), [1, 0, 0]);
        assert_eq!(grid.pixel(14, 11), [8, 0, 0]);
    }

    #[test]
    fn tile_identity_for_g1() {
        let frame = constant_frame(0, 3, 2, [7, 8, 9]);
        let grid = tile_grid(std::slice::from_ref(&frame), 1).unwrap();
        assert_eq!(grid, frame.image);
    }

    #[test]
    fn tile_rejects_mismatches() {
        let a = constant_frame(0, 2, 2, [0, 0, 0]);
        let b = constant_frame(1, 3, 2, [0, 0, 0]);
        assert!(tile_grid(std::slice::from_ref(&a), 2).is_err());
        assert!(tile_grid(&[a, b], 0).is_err());
        let c = constant_frame(0, 2, 2, [0, 0, 0]);
        let d = constant_frame(1, 3, 2, [0, 0, 0]);
        let e = constant_frame(2, 2, 2, [0, 0, 0]);
        let f = constant_frame(3, 2, 2, [0, 0, 0]);
        assert!(tile_grid(&[c, d, e, f], 2).is_err());
    }

    #[test]
    fn resize_constant_stays_constant() {
        let img = RgbImage::filled(4, 4, [33, 66, 99]);
        let out = resize_to(&img, 2, 2).unwrap();
        assert_eq!(out, RgbImage::filled(2, 2, [33, 66, 99]));
    }

    #[test]
    fn resize_block_average_matches_counting() {
        // 6x6, one channel pattern: each 3x3 block has k pixels at 255.
        let mut img = RgbImage::filled(6, 6, [0, 0, 0]);
        // top-left block: 4 ones -> round(255*4/9) = round(113.33) = 113
        for (x, y) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
            img.set_pixel(x, y, [255, 255, 255]);
        }
        // top-right block: 1 one -> round(255/9) = round(28.33) = 28
        img.set_pixel(4, 1, [255, 255, 255]);
        let out = resize_to(&img, 2, 2).unwrap();
        assert_eq!(out.pixel(0, 0), [113, 113, 113]);
        assert_eq!(out.pixel(1, 0), [28, 28, 28]);
        assert_eq!(out.pixel(0, 1), [0, 0, 0]);
    }

    #[test]
    fn resize_rejects_fractional_scale_and_zero_target() {
        let img = RgbImage::filled(6, 6, [0, 0, 0]);
        assert!(resize_to(&img, 4, 4).is_err());
        assert!(resize_to(&img, 0, 2).is_err());
    }

    #[test]
    fn compress_clip_of_5_uses_2x2_grid() {
        let frames: Vec<Frame> = (10..15)
            .map(|i| constant_frame(i, 4, 4, [i as u8 * 10, 0, 0]))
            .collect();
        let clip = compress_clip_auto(&frames).unwrap();
        assert_eq!(clip.key_frame.index, 10);
        assert_eq!(clip.source_indices, vec![11, 12, 13, 14]);
        assert_eq!((clip.compressed.width, clip.compressed.height), (4, 4));
        // Each quadrant of the compressed image is one (constant) frame.
        assert_eq!(clip.compressed.pixel(0, 0), [110, 0, 0]);
        assert_eq!(clip.compressed.pixel(3, 0), [120, 0, 0]);
        assert_eq!(clip.compressed.pixel(0, 3), [130, 0, 0]);
        assert_eq!(clip.compressed.pixel(3, 3), [140, 0, 0]);
    }

    #[test]
    fn compress_clip_of_10_uses_3x3_grid() {
        let frames: Vec<Frame> = (0..10)
            .map(|i| constant_frame(i, 6, 6, [0, i as u8, 0]))
            .collect();
        let clip = compress_clip_auto(&frames).unwrap();
        assert_eq!(clip.source_indices.len(), 9);
        assert_eq!((clip.compressed.width, clip.compressed.height), (6, 6));
    }

    #[test]
    fn compress_clip_of_2_passes_the_second_frame_through() {
        let key = constant_frame(0, 3, 3, [1, 2, 3]);
        let mut other = constant_frame(1, 3, 3, [0, 0, 0]);
        for (i, b) in other.image.data.iter_mut().enumerate() {
            *b = (i % 251) as u8;
        }
        let clip = compress_clip(&[key, other.clone()], 1).unwrap();
        assert_eq!(clip.compressed, other.image);
    }

    #[test]
    fn grid_round_trip_recovers_cells() {
        let frames: Vec<Frame> = (0..4)
            .map(|i| {
                let mut img = RgbImage::filled(3, 2, [0, 0, 0]);
                for (p, b) in img.data.iter_mut().enumerate() {
                    *b = (i * 31 + p) as u8;
                }
                Frame::new(i, img)
            })
            .collect();
        let grid = tile_grid(&frames, 2).unwrap();
        for (cell, frame) in frames.iter().enumerate() {
            let (row, col) = (cell / 2, cell % 2);
            for y in 0..2u32 {
                for x in 0..3u32 {
                    assert_eq!(
                        grid.pixel(col as u32 * 3 + x, row as u32 * 2 + y),
                        frame.image.pixel(x, y)
                    );
                }
            }
        }
    }
}
