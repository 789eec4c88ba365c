use std::io::Write;
use std::path::Path;

use scene_core::dataset::{group_split, stratified_split, SplitAssignment};

use super::{read_manifest, write_file};
use crate::{CliError, PipelineConfig};

/// Splits the manifest, writes the split file and prints per-class counts as
/// `class,train,val,test` lines.
pub fn cmd_split(
    cfg: &PipelineConfig,
    manifest: &Path,
    out_path: &Path,
    seed: u64,
    out: &mut dyn Write,
) -> Result<SplitAssignment, CliError> {
    let ratios = cfg.split_ratios()?;
    let (entries, classes) = read_manifest(manifest)?;
    let assignment = if cfg.split.group_aware {
        group_split(&entries, ratios, seed)
    } else {
        stratified_split(&entries, ratios, seed)
    }
    .map_err(CliError::dataset(manifest))?;
    write_file(out_path, assignment.to_split_file().to_text().as_bytes())?;
    let io = CliError::io(Path::new("<stdout>"));
    let mut lines = String::from("class,train,val,test\n");
    for (label, [a, b, c]) in assignment.class_counts(&classes) {
        lines.push_str(&format!("{label},{a},{b},{c}\n"));
    }
    out.write_all(lines.as_bytes()).map_err(io)?;
    log::info!(
        "split {} entries into {}/{}/{}",
        entries.len(),
        assignment.train.len(),
        assignment.validation.len(),
        assignment.test.len()
    );
    Ok(assignment)
}
