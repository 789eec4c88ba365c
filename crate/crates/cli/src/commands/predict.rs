use std::io::Write;
use std::path::Path;

use scene_core::audio::read_wav;
use scene_core::dsp::{read_pgm, SpectrogramPipeline};
use scene_core::model::{predict, Checkpoint};

use crate::{CliError, PipelineConfig};

/// Aligned `class  probability` table, most likely class first.
pub fn format_prediction(ranked: &[(String, f64)]) -> String {
    let w = ranked.iter().map(|r| r.0.len()).max().unwrap_or(0).max(5);
    let mut s = format!("{:<w$}  probability\n", "class");
    for (name, p) in ranked {
        s.push_str(&format!("{name:<w$}  {p:.6}\n"));
    }
    s
}

/// Classifies a WAV (rendered with the configured pipeline) or a PGM image.
pub fn cmd_predict(
    cfg: &PipelineConfig,
    checkpoint: &Path,
    input: &Path,
    out: &mut dyn Write,
) -> Result<Vec<(String, f64)>, CliError> {
    let checkpoint = Checkpoint::load(checkpoint, None)?;
    let is_pgm = input
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    let image = if is_pgm {
        read_pgm(&std::fs::read(input).map_err(CliError::io(input))?)?
    } else {
        let clip = read_wav(input).map_err(|source| CliError::Audio {
            file: input.display().to_string(),
            source,
        })?;
        SpectrogramPipeline::new(cfg.dsp_config()?)?.render(&clip)?
    };
    let ranked = predict(&checkpoint, &image)?;
    out.write_all(format_prediction(&ranked).as_bytes())
        .map_err(CliError::io(Path::new("<stdout>")))?;
    Ok(ranked)
}
