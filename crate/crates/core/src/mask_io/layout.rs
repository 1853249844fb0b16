//! On-disk prediction layout:
//! `<root>/<video_id>/<exp_id>/<frame_index>.png` with the frame index
//! zero-padded to 5 digits, plus a `source.json` marker at the root.

use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::types::{BinaryMask, Frame, PredictionSource, VideoMeta};

use super::documents::{SourceMarker, SCHEMA_VERSION};
use super::images::{read_binary_mask, read_frame, write_binary_mask};

pub fn frame_file_name(index: usize) -> String {
    format!("{index:05}.png")
}

pub fn write_source_marker(root: impl AsRef<Path>, source_id: &str) -> Result<()> {
    let root = root.as_ref();
    std::fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
    let marker = SourceMarker {
        schema_version: SCHEMA_VERSION,
        source_id: source_id.to_string(),
    };
    let path = root.join("source.json");
    let mut text = serde_json::to_string_pretty(&marker).map_err(|e| Error::io(&path, e))?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
}

/// Read the marker if present; otherwise fall back to the directory name.
pub fn source_marker(root: impl AsRef<Path>) -> Result<String> {
    let root = root.as_ref();
    let path = root.join("source.json");
    if path.exists() {
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let marker: SourceMarker = serde_json::from_str(&text).map_err(|e| Error::Schema {
            path: path.display().to_string(),
            field: "source.json".into(),
            message: e.to_string(),
        })?;
        Ok(marker.source_id)
    } else {
        Ok(root
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| root.display().to_string()))
    }
}

pub fn write_prediction_sequence(
    root: impl AsRef<Path>,
    video_id: &str,
    exp_id: &str,
    masks: &[BinaryMask],
) -> Result<()> {
    let dir = root.as_ref().join(video_id).join(exp_id);
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    for (index, mask) in masks.iter().enumerate() {
        write_binary_mask(dir.join(frame_file_name(index)), mask)?;
    }
    Ok(())
}

fn sorted_subdirs(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut dirs = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        if entry.path().is_dir() {
            dirs.push(entry.path());
        }
    }
    dirs.sort();
    Ok(dirs)
}

/// Load a whole prediction directory back into memory. Frame files must be
/// contiguous from 00000.png; gaps are validation errors.
pub fn load_prediction_source(root: impl AsRef<Path>, weight: f64) -> Result<PredictionSource> {
    let root = root.as_ref();
    let source_id = source_marker(root)?;
    let mut source = PredictionSource::new(source_id, weight)?;
    for video_dir in sorted_subdirs(root)? {
        let video_id = video_dir
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        for exp_dir in sorted_subdirs(&video_dir)? {
            let exp_id = exp_dir
                .file_name()
                .map(|n| n.to_string_lossy().into_owned())
                .unwrap_or_default();
            let mut count = 0usize;
            for entry in std::fs::read_dir(&exp_dir).map_err(|e| Error::io(&exp_dir, e))? {
                let entry = entry.map_err(|e| Error::io(&exp_dir, e))?;
                if entry.path().extension().is_some_and(|e| e == "png") {
                    count += 1;
                }
            }
            let mut masks = Vec::with_capacity(count);
            for index in 0..count {
                let path = exp_dir.join(frame_file_name(index));
                if !path.exists() {
                    return Err(Error::validation(format!(
                        "{video_id}/{exp_id}: frame files are not contiguous, {} missing",
                        path.display()
                    )));
                }
                masks.push(read_binary_mask(&path)?);
            }
            if !masks.is_empty() {
                source.insert_sequence(video_id.clone(), exp_id, masks);
            }
        }
    }
    Ok(source)
}

/// Frames of one video read lazily from disk, with uris resolved against
/// the manifest's directory.
pub struct DiskFrames {
    meta: VideoMeta,
    base: PathBuf,
}

impl DiskFrames {
    pub fn new(meta: VideoMeta, base: impl Into<PathBuf>) -> Self {
        DiskFrames {
            meta,
            base: base.into(),
        }
    }

    pub fn meta(&self) -> &VideoMeta {
        &self.meta
    }

    pub fn frame_path(&self, index: usize) -> Result<PathBuf> {
        let uri = self.meta.frame_uris.get(index).ok_or_else(|| {
            Error::validation(format!(
                "video {:?}: frame {index} outside [0, {})",
                self.meta.video_id, self.meta.frame_count
            ))
        })?;
        Ok(self.base.join(uri))
    }

    pub fn load(&self, index: usize) -> Result<Frame> {
        let path = self.frame_path(index)?;
        let frame = read_frame(&path, index)?;
        if frame.width() != self.meta.width || frame.height() != self.meta.height {
            return Err(Error::validation(format!(
                "frame {} of {:?} is {}x{}, manifest says {}x{}",
                index,
                self.meta.video_id,
                frame.width(),
                frame.height(),
                self.meta.width,
                self.meta.height
            )));
        }
        Ok(frame)
    }
}
