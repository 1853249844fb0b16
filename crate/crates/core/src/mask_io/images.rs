//! PNG readers and writers for frames and masks.
//!
//! Binary masks are stored as 8-bit grayscale with foreground = 255; any
//! other value is rejected on load so soft masks cannot slip into binary
//! slots. Soft masks quantize [0,1] to the full 8-bit range.

use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::{BinaryMask, Frame, RgbImage, SoftMask};

fn write_png(
    path: &Path,
    width: u32,
    height: u32,
    color: png::ColorType,
    data: &[u8],
) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut encoder = png::Encoder::new(BufWriter::new(file), width, height);
    encoder.set_color(color);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header().map_err(|e| Error::io(path, e))?;
    writer
        .write_image_data(data)
        .map_err(|e| Error::io(path, e))?;
    Ok(())
}

fn read_png(path: &Path, expect: png::ColorType) -> Result<(u32, u32, Vec<u8>)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let decoder = png::Decoder::new(std::io::BufReader::new(file));
    let mut reader = decoder.read_info().map_err(|e| Error::io(path, e))?;
    let mut buf = vec![
        0u8;
        reader
            .output_buffer_size()
            .ok_or_else(|| { Error::io(path, "png output too large") })?
    ];
    let info = reader
        .next_frame(&mut buf)
        .map_err(|e| Error::io(path, e))?;
    if info.color_type != expect || info.bit_depth != png::BitDepth::Eight {
        return Err(Error::io(
            path,
            format!(
                "expected 8-bit {:?} png, found {:?}/{:?}",
                expect, info.color_type, info.bit_depth
            ),
        ));
    }
    buf.truncate(info.buffer_size());
    Ok((info.width, info.height, buf))
}

pub fn write_frame(path: impl AsRef<Path>, image: &RgbImage) -> Result<()> {
    write_png(
        path.as_ref(),
        image.width,
        image.height,
        png::ColorType::Rgb,
        &image.data,
    )
}

pub fn read_frame(path: impl AsRef<Path>, index: usize) -> Result<Frame> {
    let (width, height, data) = read_png(path.as_ref(), png::ColorType::Rgb)?;
    Ok(Frame::new(index, RgbImage::new(width, height, data)?))
}

pub fn write_binary_mask(path: impl AsRef<Path>, mask: &BinaryMask) -> Result<()> {
    let data: Vec<u8> = mask.bits.iter().map(|&b| b * 255).collect();
    write_png(
        path.as_ref(),
        mask.width,
        mask.height,
        png::ColorType::Grayscale,
        &data,
    )
}

pub fn read_binary_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let path = path.as_ref();
    let (width, height, data) = read_png(path, png::ColorType::Grayscale)?;
    let mut bits = Vec::with_capacity(data.len());
    for value in data {
        match value {
            0 => bits.push(0),
            255 => bits.push(1),
            other => {
                return Err(Error::io(
                    path,
                    format!("binary mask pixel {other} is neither 0 nor 255"),
                ))
            }
        }
    }
    BinaryMask::new(width, height, bits)
}

pub fn write_soft_mask(path: impl AsRef<Path>, mask: &SoftMask) -> Result<()> {
    let data: Vec<u8> = mask
        .values
        .iter()
        .map(|&v| (v * 255.0).round() as u8)
        .collect();
    write_png(
        path.as_ref(),
        mask.width,
        mask.height,
        png::ColorType::Grayscale,
        &data,
    )
}

pub fn read_soft_mask(path: impl AsRef<Path>) -> Result<SoftMask> {
    let (width, height, data) = read_png(path.as_ref(), png::ColorType::Grayscale)?;
    let values = data.iter().map(|&v| v as f32 / 255.0).collect();
    SoftMask::new(width, height, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("frame.png");
        let mut image = RgbImage::filled(5, 4, [0, 0, 0]);
        for (i, b) in image.data.iter_mut().enumerate() {
            *b = (i * 7 % 256) as u8;
        }
        write_frame(&path, &image).unwrap();
        let back = read_frame(&path, 3).unwrap();
        assert_eq!(back.index, 3);
        assert_eq!(back.image, image);
    }

    #[test]
    fn binary_mask_round_trip_and_strictness() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("mask.png");
        let mask = BinaryMask::new(3, 2, vec![0, 1, 0, 1, 1, 0]).unwrap();
        write_binary_mask(&path, &mask).unwrap();
        assert_eq!(read_binary_mask(&path).unwrap(), mask);

        // A grayscale png with value 128 must be rejected.
        let soft = SoftMask::new(2, 1, vec![0.5, 1.0]).unwrap();
        let sneaky = dir.path().join("soft.png");
        write_soft_mask(&sneaky, &soft).unwrap();
        let err = read_binary_mask(&sneaky).unwrap_err();
        assert!(err.to_string().contains("neither 0 nor 255"));
    }

    #[test]
    fn soft_mask_round_trips_within_quantization() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("soft.png");
        let mask = SoftMask::new(4, 1, vec![0.0, 0.25, 0.5, 1.0]).unwrap();
        write_soft_mask(&path, &mask).unwrap();
        let back = read_soft_mask(&path).unwrap();
        for (a, b) in mask.values.iter().zip(&back.values) {
            assert!((a - b).abs() <= 0.5 / 255.0 + 1e-6);
        }
    }

    #[test]
    fn missing_file_reports_its_path() {
        let err = read_binary_mask("/nonexistent/mask.png").unwrap_err();
        assert!(err.to_string().contains("/nonexistent/mask.png"));
        assert_eq!(err.exit_code(), 4);
    }
}
