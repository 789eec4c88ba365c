use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use walkdir::WalkDir;

use scene_core::audio::read_wav;
use scene_core::dsp::{write_pgm, SpectrogramPipeline};

use super::write_file;
use crate::{CliError, PipelineConfig};

/// Outcome of a conversion run.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConvertSummary {
    pub converted: usize,
    /// Input path and reason, sorted by path.
    pub failed: Vec<(PathBuf, String)>,
}

impl ConvertSummary {
    pub fn is_success(&self) -> bool {
        self.failed.is_empty()
    }
}

fn wav_files(in_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files = Vec::new();
    for entry in WalkDir::new(in_dir).sort_by_file_name() {
        let entry = entry.map_err(|e| CliError::Io {
            path: e.path().unwrap_or(in_dir).display().to_string(),
            source: e.into(),
        })?;
        let is_wav = entry
            .path()
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("wav"));
        if entry.file_type().is_file() && is_wav {
            files.push(entry.into_path());
        }
    }
    Ok(files)
}

fn convert_one(
    pipeline: &SpectrogramPipeline,
    in_dir: &Path,
    out_dir: &Path,
    wav: &Path,
) -> Result<(), String> {
    let rel = wav.strip_prefix(in_dir).unwrap_or(wav);
    let clip = read_wav(wav).map_err(|e| e.to_string())?;
    let image = pipeline.render(&clip).map_err(|e| e.to_string())?;
    let source: Vec<String> = rel
        .components()
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .collect();
    let sidecar = pipeline.sidecar(&source.join("/"), &image);
    let base = out_dir.join(rel);
    write_file(&base.with_extension("pgm"), &write_pgm(&image)).map_err(|e| e.to_string())?;
    write_file(&base.with_extension("txt"), sidecar.to_text().as_bytes()).map_err(|e| e.to_string())
}

/// Renders every WAV under `in_dir` (recursively) to
/// `out_dir/<relative path>.pgm` plus a `.txt` sidecar.
///
/// Per-file failures are collected rather than aborting the run. Output bytes
/// do not depend on `jobs`.
pub fn cmd_convert(
    cfg: &PipelineConfig,
    in_dir: &Path,
    out_dir: &Path,
    jobs: usize,
) -> Result<ConvertSummary, CliError> {
    if !in_dir.is_dir() {
        return Err(CliError::Io {
            path: in_dir.display().to_string(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "not a directory"),
        });
    }
    let pipeline = SpectrogramPipeline::new(cfg.dsp_config()?)?;
    let files = wav_files(in_dir)?;
    let results: Mutex<Vec<Option<Result<(), String>>>> = Mutex::new(vec![None; files.len()]);
    let next = AtomicUsize::new(0);
    let workers = jobs.clamp(1, files.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(wav) = files.get(i) else { break };
                let r = convert_one(&pipeline, in_dir, out_dir, wav);
                results.lock().expect("no poisoned lock")[i] = Some(r);
            });
        }
    });
    let mut summary = ConvertSummary::default();
    for (wav, r) in files
        .iter()
        .zip(results.into_inner().expect("no poisoned lock"))
    {
        match r {
            Some(Ok(())) => {
                log::debug!("converted {}", wav.display());
                summary.converted += 1;
            }
            Some(Err(reason)) => {
                log::warn!("{}: {reason}", wav.display());
                summary.failed.push((wav.clone(), reason));
            }
            None => summary
                .failed
                .push((wav.clone(), "worker did not process file".into())),
        }
    }
    Ok(summary)
}
