//! Subcommand implementations. Each takes explicit writers so the binary
//! can route data to stdout and logs to stderr while tests capture both.

mod convert;
mod eval;
mod predict;
mod split;
mod train;

pub use convert::{cmd_convert, ConvertSummary};
pub use eval::{cmd_eval, EvalArgs};
pub use predict::{cmd_predict, format_prediction};
pub use split::cmd_split;
pub use train::{cmd_train, TrainArgs, TrainSummary};

use std::path::{Path, PathBuf};

use scene_core::dataset::{parse_manifest, ClassIndexMap, FileSource, ManifestEntry};
use scene_core::dsp::SpectrogramPipeline;

use crate::{CliError, PipelineConfig};

/// Manifest from an explicit flag or the config.
pub(crate) fn manifest_path(
    cfg: &PipelineConfig,
    flag: Option<&Path>,
) -> Result<PathBuf, CliError> {
    flag.map(Path::to_path_buf)
        .or_else(|| cfg.paths.manifest.clone())
        .ok_or(CliError::MissingManifest)
}

pub(crate) fn read_manifest(path: &Path) -> Result<(Vec<ManifestEntry>, ClassIndexMap), CliError> {
    let bytes = std::fs::read(path).map_err(CliError::io(path))?;
    parse_manifest(&bytes).map_err(CliError::dataset(path))
}

/// File source rooted at `paths.audio_root`, or the manifest's directory.
pub(crate) fn file_source(cfg: &PipelineConfig, manifest: &Path) -> Result<FileSource, CliError> {
    let root = cfg.paths.audio_root.clone().unwrap_or_else(|| {
        manifest
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."))
    });
    let pipeline = SpectrogramPipeline::new(cfg.dsp_config()?)?;
    Ok(FileSource::new(root, cfg.paths.image_dir.clone(), pipeline))
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    }
    std::fs::write(path, bytes).map_err(CliError::io(path))
}
