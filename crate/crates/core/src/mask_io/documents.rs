//! Structured JSON documents: manifests, plan files, weight configs,
//! relevance scores and evaluation reports. Every document carries a
//! `schema_version` field and schema violations are reported with the file
//! path and the offending field.

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::EvalResult;
use crate::types::{SamplingPlan, VideoMeta, WeightConfig};

pub const SCHEMA_VERSION: u32 = 1;

/// One expression to segment in a video.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expression {
    pub exp_id: String,
    pub expression: String,
}

/// A video entry in a manifest: metadata plus the expressions to run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestVideo {
    pub video_id: String,
    pub width: u32,
    pub height: u32,
    /// Frame image paths, relative to the manifest's directory, in
    /// temporal order.
    pub frame_uris: Vec<String>,
    pub expressions: Vec<Expression>,
}

impl ManifestVideo {
    pub fn meta(&self) -> Result<VideoMeta> {
        VideoMeta::new(
            self.video_id.clone(),
            self.width,
            self.height,
            self.frame_uris.clone(),
        )
    }
}

/// The dataset description consumed by every CLI command.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub videos: Vec<ManifestVideo>,
}

impl Manifest {
    pub fn new(videos: Vec<ManifestVideo>) -> Self {
        Manifest {
            schema_version: SCHEMA_VERSION,
            videos,
        }
    }
}

/// A sampling plan for one (video, expression), as stored on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanDocument {
    pub schema_version: u32,
    pub video_id: String,
    pub exp_id: String,
    pub plan: SamplingPlan,
}

/// Q-frame relevance scores: video_id -> exp_id -> one score per frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoresDocument {
    pub schema_version: u32,
    pub scores: BTreeMap<String, BTreeMap<String, Vec<f64>>>,
}

/// Marker written at the root of a prediction directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceMarker {
    pub schema_version: u32,
    pub source_id: String,
}

/// Weight config file: entries plus an optional threshold (default 0.5).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct WeightDocument {
    pub schema_version: u32,
    #[serde(default = "WeightConfig::default_threshold")]
    pub threshold: f64,
    pub entries: BTreeMap<String, f64>,
}

/// Machine-readable evaluation report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub source_id: String,
    pub result: EvalResult,
}

fn read_document<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| Error::Schema {
        path: path.display().to_string(),
        field: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

fn check_schema_version(path: &Path, found: u32) -> Result<()> {
    if found != SCHEMA_VERSION {
        return Err(Error::Schema {
            path: path.display().to_string(),
            field: "schema_version".into(),
            message: format!("unsupported version {found}, expected {SCHEMA_VERSION}"),
        });
    }
    Ok(())
}

fn write_document<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::io(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let manifest: Manifest = read_document(path)?;
    check_schema_version(path, manifest.schema_version)?;
    for video in &manifest.videos {
        video.meta().map_err(|e| Error::Schema {
            path: path.display().to_string(),
            field: format!("videos[{}]", video.video_id),
            message: e.to_string(),
        })?;
    }
    Ok(manifest)
}

pub fn save_manifest(path: impl AsRef<Path>, manifest: &Manifest) -> Result<()> {
    write_document(path.as_ref(), manifest)
}

pub fn save_plan(path: impl AsRef<Path>, doc: &PlanDocument) -> Result<()> {
    write_document(path.as_ref(), doc)
}

pub fn load_plan(path: impl AsRef<Path>) -> Result<PlanDocument> {
    let path = path.as_ref();
    let doc: PlanDocument = read_document(path)?;
    check_schema_version(path, doc.schema_version)?;
    Ok(doc)
}

pub fn load_scores(path: impl AsRef<Path>) -> Result<ScoresDocument> {
    let path = path.as_ref();
    let doc: ScoresDocument = read_document(path)?;
    check_schema_version(path, doc.schema_version)?;
    Ok(doc)
}

pub fn load_weight_config(path: impl AsRef<Path>) -> Result<WeightConfig> {
    let path = path.as_ref();
    let doc: WeightDocument = read_document(path)?;
    check_schema_version(path, doc.schema_version)?;
    let config = WeightConfig {
        entries: doc.entries,
        threshold: doc.threshold,
    };
    config.validate().map_err(|e| Error::Schema {
        path: path.display().to_string(),
        field: "entries".into(),
        message: e.to_string(),
    })?;
    Ok(config)
}

pub fn save_weight_config(path: impl AsRef<Path>, config: &WeightConfig) -> Result<()> {
    let doc = WeightDocument {
        schema_version: SCHEMA_VERSION,
        threshold: config.threshold,
        entries: config.entries.clone(),
    };
    write_document(path.as_ref(), &doc)
}

pub fn save_report(path: impl AsRef<Path>, report: &Report) -> Result<()> {
    write_document(path.as_ref(), report)
}
