//! Command-line front end: plan | compress | segment | ensemble | eval |
//! pipeline, plus a reference protocol worker. Exit codes: 0 ok,
//! 2 validation, 3 backend, 4 io.

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::compress::compress_clip;
use crate::ensemble::ensemble_run;
use crate::error::{Error, Result};
use crate::mask_io::{
    load_manifest, load_prediction_source, load_weight_config, save_plan, save_report, write_frame,
    write_prediction_sequence, write_soft_mask, write_source_marker, DiskFrames, PlanDocument,
    Report, SCHEMA_VERSION,
};
use crate::metrics::{evaluate, scores_by_video, ToleranceRule};
use crate::pipeline::{
    load_plan_for, plan_file_name, plan_one, run_pipeline, run_segment_with_plans, work_items,
    BackendChoice, RunConfig,
};
use crate::segmenter::StubBackend;
use crate::types::{validate_plan, Strategy};

/// Environment variable holding the default backend command.
pub const BACKEND_ENV: &str = "RVOS_BACKEND";

#[derive(Parser)]
#[command(
    name = "rvos",
    version,
    about = "Referring video object segmentation pipeline: clip planning, \
             key-frame compression, segmentation, ensembling and J&F evaluation"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a sampling plan per (video, expression).
    Plan(PlanArgs),
    /// Write each clip's key frame and compressed grid image.
    Compress(CompressArgs),
    /// Run a segmenter backend over existing plans.
    Segment(SegmentArgs),
    /// Fuse prediction directories by weighted voting.
    Ensemble(EnsembleArgs),
    /// Score predictions against ground truth (J, F, J&F).
    Eval(EvalArgs),
    /// plan + segment in one go, writing a prediction source.
    Pipeline(PipelineArgs),
    /// Serve the line-delimited backend protocol on stdin/stdout using the
    /// built-in stub segmenter.
    Worker(WorkerArgs),
}

#[derive(Args, Clone)]
struct SamplingArgs {
    /// Sampling strategy: uniform | uniform+ | qframe | wrap_around |
    /// wrap_around+
    #[arg(long)]
    strategy: Strategy,
    /// Number of clips (N)
    #[arg(long = "n-clips", default_value_t = 10)]
    n_clips: usize,
    /// Frames per clip (c = g*g+1)
    #[arg(long = "clip-len", default_value_t = 10)]
    clip_len: usize,
    /// Relevance scores file, required for qframe
    #[arg(long)]
    scores: Option<PathBuf>,
}

#[derive(Args)]
struct PlanArgs {
    /// Dataset manifest
    #[arg(long)]
    manifest: PathBuf,
    #[command(flatten)]
    sampling: SamplingArgs,
    /// Output directory for plan documents
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CompressArgs {
    /// Dataset manifest
    #[arg(long)]
    manifest: PathBuf,
    /// Directory of plan documents from `plan`
    #[arg(long)]
    plans: PathBuf,
    /// Output directory for clip images
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Clone)]
struct BackendArgs {
    /// Backend: "stub" or a worker command line [env: RVOS_BACKEND]
    #[arg(long)]
    backend: Option<String>,
    /// Seed for the stub backend
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Concurrent (video, expression) work items
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

impl BackendArgs {
    fn choice(&self) -> BackendChoice {
        let spec = self
            .backend
            .clone()
            .or_else(|| std::env::var(BACKEND_ENV).ok())
            .unwrap_or_else(|| "stub".to_string());
        BackendChoice::parse(&spec, self.seed)
    }
}

#[derive(Args)]
struct SegmentArgs {
    /// Dataset manifest
    #[arg(long)]
    manifest: PathBuf,
    /// Directory of plan documents from `plan`
    #[arg(long)]
    plans: PathBuf,
    #[command(flatten)]
    backend: BackendArgs,
    /// Source id recorded in the prediction directory
    #[arg(long = "source-id", default_value = "stub/unnamed")]
    source_id: String,
    /// Output prediction directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EnsembleArgs {
    /// Prediction directories to fuse
    #[arg(required = true)]
    pred_dirs: Vec<PathBuf>,
    /// Weight config file
    #[arg(long)]
    weights: PathBuf,
    /// Source id recorded in the fused prediction directory
    #[arg(long = "source-id", default_value = "selective_average")]
    source_id: String,
    /// Output prediction directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EvalArgs {
    /// Prediction directory
    #[arg(long)]
    pred: PathBuf,
    /// Ground-truth directory (same layout)
    #[arg(long)]
    gt: PathBuf,
    /// Write the machine-readable report here
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    /// Dataset manifest
    #[arg(long)]
    manifest: PathBuf,
    #[command(flatten)]
    sampling: SamplingArgs,
    #[command(flatten)]
    backend: BackendArgs,
    /// Source id recorded in the prediction directory
    /// (default: "stub/<strategy>")
    #[arg(long = "source-id")]
    source_id: Option<String>,
    /// Output prediction directory
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct WorkerArgs {
    /// Seed for the stub segmenter behind the protocol
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl Cli {
    pub fn run(self) -> Result<()> {
        match self.command {
            Command::Plan(args) => cmd_plan(args),
            Command::Compress(args) => cmd_compress(args),
            Command::Segment(args) => cmd_segment(args),
            Command::Ensemble(args) => cmd_ensemble(args),
            Command::Eval(args) => cmd_eval(args),
            Command::Pipeline(args) => cmd_pipeline(args),
            Command::Worker(args) => cmd_worker(args),
        }
    }
}

/// Parse argv and run; returns the process exit code.
pub fn main_with_exit_code() -> i32 {
    let cli = Cli::parse();
    match cli.run() {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn sampling_config(args: &SamplingArgs, backend: BackendChoice, jobs: usize) -> RunConfig {
    RunConfig {
        strategy: args.strategy,
        n_clips: args.n_clips,
        clip_len: args.clip_len,
        backend,
        jobs,
    }
}

fn cmd_plan(args: PlanArgs) -> Result<()> {
    if args.sampling.strategy == Strategy::QFrame && args.sampling.scores.is_none() {
        return Err(Error::validation("strategy qframe requires --scores"));
    }
    let manifest = load_manifest(&args.manifest)?;
    let scores = args
        .sampling
        .scores
        .as_deref()
        .map(crate::mask_io::load_scores)
        .transpose()?;
    let config = sampling_config(&args.sampling, BackendChoice::Stub { seed: 0 }, 1);
    for item in work_items(&manifest)? {
        let plan = plan_one(&item.meta, &item.exp_id, &config, scores.as_ref())?;
        let violations = validate_plan(&plan, &item.meta);
        if !violations.is_empty() {
            return Err(Error::validation(format!(
                "plan for {}/{} failed validation: {}",
                item.meta.video_id,
                item.exp_id,
                violations
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>()
                    .join("; ")
            )));
        }
        let path = args
            .out
            .join(plan_file_name(&item.meta.video_id, &item.exp_id));
        save_plan(
            &path,
            &PlanDocument {
                schema_version: SCHEMA_VERSION,
                video_id: item.meta.video_id.clone(),
                exp_id: item.exp_id.clone(),
                plan,
            },
        )?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cmd_compress(args: CompressArgs) -> Result<()> {
    let manifest = load_manifest(&args.manifest)?;
    let base = args.manifest.parent().unwrap_or(Path::new("."));
    for item in work_items(&manifest)? {
        let doc = load_plan_for(&args.plans, &item.meta.video_id, &item.exp_id)?;
        let frames = DiskFrames::new(item.meta.clone(), base);
        let dir = args.out.join(&item.meta.video_id).join(&item.exp_id);
        for clip in &doc.plan.clips {
            let members = clip
                .member_indices
                .iter()
                .map(|&m| frames.load(m))
                .collect::<Result<Vec<_>>>()?;
            let compressed = compress_clip(&members, doc.plan.grid)?;
            write_frame(
                dir.join(format!("clip_{:03}_key.png", clip.clip_index)),
                &compressed.key_frame.image,
            )?;
            write_frame(
                dir.join(format!("clip_{:03}_com.png", clip.clip_index)),
                &compressed.compressed,
            )?;
        }
        println!(
            "compressed {}/{}: {} clips -> {}",
            item.meta.video_id,
            item.exp_id,
            doc.plan.n_clips,
            dir.display()
        );
    }
    Ok(())
}

fn cmd_segment(args: SegmentArgs) -> Result<()> {
    let manifest = load_manifest(&args.manifest)?;
    let base = args
        .manifest
        .parent()
        .unwrap_or(Path::new("."))
        .to_path_buf();
    run_segment_with_plans(
        &manifest,
        &base,
        &args.plans,
        &args.backend.choice(),
        args.backend.jobs,
        &args.source_id,
        &args.out,
    )?;
    println!("segmented into {}", args.out.display());
    Ok(())
}

fn cmd_ensemble(args: EnsembleArgs) -> Result<()> {
    let config = load_weight_config(&args.weights)?;
    let sources = args
        .pred_dirs
        .iter()
        .map(|dir| load_prediction_source(dir, 1.0))
        .collect::<Result<Vec<_>>>()?;
    let fused = ensemble_run(&sources, &config)?;
    write_source_marker(&args.out, &args.source_id)?;
    for (video_id, exp_id) in fused.sequence_keys() {
        let masks = fused.sequence(&video_id, &exp_id).expect("own keys");
        write_prediction_sequence(&args.out, &video_id, &exp_id, masks)?;
    }
    println!(
        "fused {} sources into {}",
        config.entries.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<()> {
    let pred = load_prediction_source(&args.pred, 1.0)?;
    let gt = load_prediction_source(&args.gt, 1.0)?;
    let result = evaluate(&pred, &gt, ToleranceRule::default())?;

    println!("{:<40} {:>8} {:>8} {:>8}", "sequence", "J", "F", "J&F");
    for (video_id, scores) in scores_by_video(&result) {
        for s in scores {
            println!(
                "{:<40} {:>8.4} {:>8.4} {:>8.4}",
                format!("{video_id}/{}", s.exp_id),
                s.j,
                s.f,
                (s.j + s.f) / 2.0
            );
        }
    }
    println!(
        "{:<40} {:>8.4} {:>8.4} {:>8.4}",
        "global", result.j, result.f, result.jf
    );

    if let Some(report_path) = &args.report {
        save_report(
            report_path,
            &Report {
                schema_version: SCHEMA_VERSION,
                source_id: pred.source_id.clone(),
                result,
            },
        )?;
        println!("report: {}", report_path.display());
    }
    Ok(())
}

fn cmd_pipeline(args: PipelineArgs) -> Result<()> {
    if args.sampling.strategy == Strategy::QFrame && args.sampling.scores.is_none() {
        return Err(Error::validation("strategy qframe requires --scores"));
    }
    let manifest = load_manifest(&args.manifest)?;
    let base = args
        .manifest
        .parent()
        .unwrap_or(Path::new("."))
        .to_path_buf();
    let source_id = args
        .source_id
        .unwrap_or_else(|| format!("stub/{}", args.sampling.strategy.slug()));
    let config = sampling_config(&args.sampling, args.backend.choice(), args.backend.jobs);
    run_pipeline(
        &manifest,
        &base,
        &config,
        args.sampling.scores.as_deref(),
        &source_id,
        &args.out,
    )?;
    println!("pipeline complete: {}", args.out.display());
    Ok(())
}

/// Serve the subprocess protocol using the stub segmenter: prompts are
/// payload hashes, decode responses are soft-disk PNGs written next to the
/// request images. Masks are keyed by position within the request, so any
/// harness gets deterministic output.
fn cmd_worker(args: WorkerArgs) -> Result<()> {
    use crate::segmenter::wire::{WireRequest, WireResponse};

    let stub = StubBackend::new(args.seed);
    let stdin = std::io::stdin();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for line in stdin.lock().lines() {
        let line = line.map_err(|e| Error::Protocol(format!("stdin failed: {e}")))?;
        if line.trim().is_empty() {
            continue;
        }
        let request: WireRequest = serde_json::from_str(&line)
            .map_err(|e| Error::Protocol(format!("malformed request {line:?}: {e}")))?;
        let response = match request.kind.as_str() {
            "prompt" => WireResponse {
                prompt_b64: Some(crate::segmenter::wire::encode_b64(
                    &stub.prompt_payload(&request.expression, request.clip_index),
                )),
                mask_paths: None,
            },
            "decode" => {
                let payload = stub.prompt_payload(&request.expression, request.clip_index);
                let mut mask_paths = Vec::with_capacity(request.image_paths.len());
                for (ordinal, image_path) in request.image_paths.iter().enumerate() {
                    let frame = crate::mask_io::read_frame(image_path, ordinal)?;
                    let mask = stub.mask_for(
                        &request.video_id,
                        &payload,
                        ordinal,
                        frame.width(),
                        frame.height(),
                    );
                    let mask_path = format!("{image_path}.mask.png");
                    write_soft_mask(&mask_path, &mask)?;
                    mask_paths.push(mask_path);
                }
                WireResponse {
                    prompt_b64: None,
                    mask_paths: Some(mask_paths),
                }
            }
            other => {
                return Err(Error::Protocol(format!("unknown request kind {other:?}")));
            }
        };
        let mut text = serde_json::to_string(&response)
            .map_err(|e| Error::Protocol(format!("cannot encode response: {e}")))?;
        text.push('\n');
        out.write_all(text.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| Error::Protocol(format!("stdout failed: {e}")))?;
    }
    Ok(())
}
