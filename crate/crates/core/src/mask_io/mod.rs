//! Serialization: run-length mask encoding, PNG rasters, structured
//! documents (manifests, plans, weights, scores, reports) and the on-disk
//! prediction layout.

mod documents;
mod images;
mod layout;
mod rle;

pub use documents::{
    load_manifest, load_plan, load_scores, load_weight_config, save_manifest, save_plan,
    save_report, save_weight_config, Expression, Manifest, ManifestVideo, PlanDocument, Report,
    ScoresDocument, SourceMarker, SCHEMA_VERSION,
};
pub use images::{
    read_binary_mask, read_frame, read_soft_mask, write_binary_mask, write_frame, write_soft_mask,
};
pub use layout::{
    frame_file_name, load_prediction_source, source_marker, write_prediction_sequence,
    write_source_marker, DiskFrames,
};
pub use rle::{rle_decode, rle_encode, RleMask};
