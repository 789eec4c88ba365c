//! Manifests, seeded splits, normalization statistics and batch assembly.

mod batch;
mod manifest;
mod normalize;
mod source;
mod split;

pub use batch::{Batch, Batches, DEFAULT_BATCH_SIZE};
pub use manifest::{parse_manifest, write_manifest, ClassIndexMap, ManifestEntry};
pub use normalize::{compute_normalization, NormalizationStats, STD_FLOOR};
pub use source::{
    materialize_augmented, AugmentHook, FileSource, MemorySource, NoAugment, Sample, SampleSource,
    SceneAugmenter,
};
pub use split::{
    group_split, stratified_split, SplitAssignment, SplitFile, SplitPart, SplitRatios,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("manifest is missing the `{0}` column")]
    MissingColumn(String),
    #[error("manifest line {line} is not valid UTF-8")]
    UnknownLabelCharset { line: u64 },
    #[error("manifest line {line} repeats path {path}")]
    DuplicatePath { path: String, line: u64 },
    #[error("manifest line {line} has an empty path or label")]
    EmptyField { line: u64 },
    #[error("malformed manifest: {0}")]
    MalformedManifest(String),
    #[error("class `{label}` has {count} entries; at least 3 are needed to split")]
    ClassTooSmall { label: String, count: usize },
    #[error("split ratios {ratios:?} must be non-negative and sum to 1 (sum is {sum})")]
    BadRatios { ratios: [f64; 3], sum: f64 },
    #[error("split file line {line}: {message}")]
    MalformedSplitFile { line: usize, message: String },
    #[error("split file lists {0}, which is not in the manifest")]
    UnknownPath(String),
    #[error("label `{0}` is not in the class map")]
    UnknownLabel(String),
    #[error("no training images to compute normalization statistics from")]
    EmptyTrainingSet,
    #[error("batch size must be at least 1")]
    InvalidBatchSize,
    #[error("cannot load {path}: {reason}")]
    ImageLoadFailure { path: String, reason: String },
    #[error("{path} has shape {actual:?}, expected {expected:?}")]
    ShapeMismatch {
        path: String,
        expected: (usize, usize),
        actual: (usize, usize),
    },
    #[error(transparent)]
    Augment(#[from] crate::augment::AugmentError),
}
