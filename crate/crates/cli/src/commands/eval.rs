use std::io::Write;
use std::path::{Path, PathBuf};

use scene_core::dataset::{Batches, SplitFile, SplitPart};
use scene_core::eval::{evaluate, export_probabilities, export_report, Evaluation, ReportFormat};
use scene_core::model::Checkpoint;

use super::{file_source, manifest_path, read_manifest, write_file};
use crate::{CliError, PipelineConfig};

#[derive(Debug, Clone)]
pub struct EvalArgs {
    pub checkpoint: PathBuf,
    pub split_file: PathBuf,
    pub manifest: Option<PathBuf>,
    pub format: ReportFormat,
    /// Where to write per-sample probabilities as CSV.
    pub probabilities: Option<PathBuf>,
    pub part: SplitPart,
}

/// Scores one part of a split with a checkpoint and writes the report to
/// `out`.
pub fn cmd_eval(
    cfg: &PipelineConfig,
    args: &EvalArgs,
    out: &mut dyn Write,
) -> Result<Evaluation, CliError> {
    let checkpoint = Checkpoint::load(&args.checkpoint, None)?;
    let manifest = manifest_path(cfg, args.manifest.as_deref())?;
    let (entries, classes) = read_manifest(&manifest)?;
    let split_text =
        std::fs::read_to_string(&args.split_file).map_err(CliError::io(&args.split_file))?;
    let split = SplitFile::parse(&split_text)
        .and_then(|f| f.resolve(&entries))
        .map_err(CliError::dataset(&args.split_file))?;
    let source = file_source(cfg, &manifest)?;
    let batches = Batches::evaluation(
        split.part(args.part),
        &classes,
        cfg.train.batch_size.max(1),
        checkpoint.normalization,
        &source,
    )
    .map_err(CliError::dataset(&manifest))?;
    let evaluation = evaluate(&checkpoint, batches, &classes)?;
    out.write_all(&export_report(&evaluation.report, args.format))
        .map_err(CliError::io(Path::new("<stdout>")))?;
    if let Some(path) = &args.probabilities {
        write_file(
            path,
            &export_probabilities(&classes, &evaluation.predictions),
        )?;
    }
    Ok(evaluation)
}
