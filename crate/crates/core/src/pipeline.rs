//! End-to-end orchestration: plan, compress, segment and write prediction
//! directories for every (video, expression) in a manifest. Work items run
//! concurrently up to a job bound; all file writes go to distinct paths.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mask_io::{
    load_scores, write_prediction_sequence, write_source_marker, DiskFrames, Manifest,
    ScoresDocument,
};
use crate::sampling::{plan_for_strategy, RelevanceScores};
use crate::segmenter::{decode_video, SegmenterBackend, StubBackend, SubprocessBackend};
use crate::types::{BinaryMask, SamplingPlan, Strategy, VideoMeta};

/// Which segmenter to run.
#[derive(Debug, Clone)]
pub enum BackendChoice {
    /// The deterministic built-in stub, controlled by a seed.
    Stub { seed: u64 },
    /// An external command speaking the line-delimited protocol.
    Command(String),
}

impl BackendChoice {
    /// `"stub"` selects the built-in backend, anything else is treated as a
    /// worker command line.
    pub fn parse(spec: &str, seed: u64) -> BackendChoice {
        if spec == "stub" {
            BackendChoice::Stub { seed }
        } else {
            BackendChoice::Command(spec.to_string())
        }
    }

    fn build(&self, workdir: &Path) -> Result<Box<dyn SegmenterBackend>> {
        match self {
            BackendChoice::Stub { seed } => Ok(Box::new(StubBackend::new(*seed))),
            BackendChoice::Command(cmd) => Ok(Box::new(SubprocessBackend::spawn(cmd, workdir)?)),
        }
    }
}

/// Settings shared by the `segment` and `pipeline` commands.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub strategy: Strategy,
    pub n_clips: usize,
    pub clip_len: usize,
    pub backend: BackendChoice,
    pub jobs: usize,
}

fn scores_for(
    scores: Option<&ScoresDocument>,
    video_id: &str,
    exp_id: &str,
    strategy: Strategy,
) -> Result<Option<RelevanceScores>> {
    if strategy != Strategy::QFrame {
        return Ok(None);
    }
    let doc = scores
        .ok_or_else(|| Error::validation("qframe strategy requires a relevance scores file"))?;
    let entry = doc
        .scores
        .get(video_id)
        .and_then(|exps| exps.get(exp_id))
        .ok_or_else(|| {
            Error::validation(format!("scores file has no entry for {video_id}/{exp_id}"))
        })?;
    Ok(Some(RelevanceScores::new(entry.clone())?))
}

/// Build the plan for one (video, expression).
pub fn plan_one(
    meta: &VideoMeta,
    exp_id: &str,
    config: &RunConfig,
    scores: Option<&ScoresDocument>,
) -> Result<SamplingPlan> {
    let rel = scores_for(scores, &meta.video_id, exp_id, config.strategy)?;
    plan_for_strategy(
        config.strategy,
        meta,
        config.n_clips,
        config.clip_len,
        rel.as_ref(),
    )
}

/// Segment one (video, expression): plan, decode, binarize at 0.5.
pub fn segment_one(
    frames: &DiskFrames,
    exp_id: &str,
    expression: &str,
    plan: &SamplingPlan,
    backend_choice: &BackendChoice,
    workdir: &Path,
) -> Result<Vec<BinaryMask>> {
    let mut backend = backend_choice.build(workdir)?;
    let soft = decode_video(backend.as_mut(), frames, plan, exp_id, expression)?;
    Ok(soft.iter().map(|m| m.binarize()).collect())
}

/// One (video, expression) work item resolved from a manifest.
pub struct WorkItem {
    pub meta: VideoMeta,
    pub exp_id: String,
    pub expression: String,
}

pub fn work_items(manifest: &Manifest) -> Result<Vec<WorkItem>> {
    let mut items = Vec::new();
    for video in &manifest.videos {
        let meta = video.meta()?;
        for exp in &video.expressions {
            items.push(WorkItem {
                meta: meta.clone(),
                exp_id: exp.exp_id.clone(),
                expression: exp.expression.clone(),
            });
        }
    }
    Ok(items)
}

fn run_parallel<T, F>(items: Vec<T>, jobs: usize, f: F) -> Result<()>
where
    T: Send,
    F: Fn(T) -> Result<()> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::backend(format!("cannot build thread pool: {e}")))?;
    pool.install(|| {
        items
            .into_par_iter()
            .map(&f)
            .collect::<Result<Vec<()>>>()
            .map(|_| ())
    })
}

/// Segment every (video, expression) with a caller-supplied plan source and
/// write one prediction directory.
fn segment_manifest<F>(
    manifest: &Manifest,
    manifest_dir: &Path,
    backend: &BackendChoice,
    jobs: usize,
    source_id: &str,
    out_root: &Path,
    plan_for_item: F,
) -> Result<()>
where
    F: Fn(&WorkItem) -> Result<SamplingPlan> + Sync + Send,
{
    write_source_marker(out_root, source_id)?;
    let items = work_items(manifest)?;
    let workdir = out_root.join(".work");
    run_parallel(items, jobs, |item| {
        let plan = plan_for_item(&item)?;
        let frames = DiskFrames::new(item.meta.clone(), manifest_dir);
        let stream_dir = workdir
            .join(sanitize_component(&item.meta.video_id))
            .join(sanitize_component(&item.exp_id));
        let masks = segment_one(
            &frames,
            &item.exp_id,
            &item.expression,
            &plan,
            backend,
            &stream_dir,
        )?;
        write_prediction_sequence(out_root, &item.meta.video_id, &item.exp_id, &masks)
    })?;
    // Request images are scratch data, not part of the prediction source.
    if workdir.exists() {
        std::fs::remove_dir_all(&workdir).map_err(|e| Error::io(&workdir, e))?;
    }
    Ok(())
}

/// Run the full pipeline over a manifest and write one prediction source
/// under `out_root`.
pub fn run_pipeline(
    manifest: &Manifest,
    manifest_dir: &Path,
    config: &RunConfig,
    scores_path: Option<&Path>,
    source_id: &str,
    out_root: &Path,
) -> Result<()> {
    let scores = scores_path.map(load_scores).transpose()?;
    segment_manifest(
        manifest,
        manifest_dir,
        &config.backend,
        config.jobs,
        source_id,
        out_root,
        |item| plan_one(&item.meta, &item.exp_id, config, scores.as_ref()),
    )
}

/// Segment a manifest using plan documents previously written by `plan`.
pub fn run_segment_with_plans(
    manifest: &Manifest,
    manifest_dir: &Path,
    plans_dir: &Path,
    backend: &BackendChoice,
    jobs: usize,
    source_id: &str,
    out_root: &Path,
) -> Result<()> {
    segment_manifest(
        manifest,
        manifest_dir,
        backend,
        jobs,
        source_id,
        out_root,
        |item| Ok(load_plan_for(plans_dir, &item.meta.video_id, &item.exp_id)?.plan),
    )
}

/// Load the plan document for one (video, expression) and check it belongs
/// to that pair.
pub fn load_plan_for(
    plans_dir: &Path,
    video_id: &str,
    exp_id: &str,
) -> Result<crate::mask_io::PlanDocument> {
    let path = plans_dir.join(plan_file_name(video_id, exp_id));
    let doc = crate::mask_io::load_plan(&path)?;
    if doc.video_id != video_id || doc.exp_id != exp_id {
        return Err(Error::validation(format!(
            "{} belongs to {}/{}, expected {video_id}/{exp_id}",
            path.display(),
            doc.video_id,
            doc.exp_id
        )));
    }
    Ok(doc)
}

fn sanitize_component(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect()
}

/// Default file name for a (video, expression) plan document.
pub fn plan_file_name(video_id: &str, exp_id: &str) -> PathBuf {
    PathBuf::from(video_id).join(format!("{exp_id}.plan.json"))
}
