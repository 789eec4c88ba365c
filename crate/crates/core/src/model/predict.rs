use super::{Checkpoint, ModelError};
use crate::dsp::SpectrogramImage;

/// Class probabilities for one image, highest first. Equal probabilities
/// keep class-index order.
pub fn predict(
    checkpoint: &Checkpoint,
    image: &SpectrogramImage,
) -> Result<Vec<(String, f64)>, ModelError> {
    let spec = &checkpoint.spec;
    let shape = (image.n_bins(), image.n_frames());
    if shape != (spec.input_height, spec.input_width) {
        return Err(ModelError::ShapeMismatch {
            expected: vec![1, 1, spec.input_height, spec.input_width],
            actual: shape.0 * shape.1,
        });
    }
    let net = checkpoint.network()?;
    let pixels: Vec<f64> = image
        .pixels()
        .iter()
        .map(|&p| checkpoint.normalization.apply(p))
        .collect();
    let out = net.forward(&pixels, 1)?;
    let mut ranked: Vec<(String, f64)> = out
        .probabilities_row(0)
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let name = checkpoint.classes.name(i).unwrap_or_default().to_string();
            (name, p)
        })
        .collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    Ok(ranked)
}
