use serde::{Deserialize, Serialize};

use super::DatasetError;
use crate::dsp::SpectrogramImage;

/// Smallest standard deviation used for normalization.
pub const STD_FLOOR: f64 = 1e-6;

/// Single-channel pixel statistics on the `[0, 1]` scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats {
    pub mean: f64,
    pub std: f64,
}

impl NormalizationStats {
    pub fn apply(&self, pixel: u8) -> f64 {
        (pixel as f64 / 255.0 - self.mean) / self.std
    }
}

impl Default for NormalizationStats {
    fn default() -> Self {
        Self {
            mean: 0.0,
            std: 1.0,
        }
    }
}

/// Population mean and standard deviation of every training pixel.
///
/// Sums are accumulated in integers, so the result does not depend on how
/// the pixels are grouped into images.
pub fn compute_normalization<'a, I>(images: I) -> Result<NormalizationStats, DatasetError>
where
    I: IntoIterator<Item = &'a SpectrogramImage>,
{
    let mut count: u128 = 0;
    let mut sum: u128 = 0;
    let mut sum_sq: u128 = 0;
    let mut n_images = 0usize;
    for img in images {
        n_images += 1;
        for &p in img.pixels() {
            let p = p as u128;
            count += 1;
            sum += p;
            sum_sq += p * p;
        }
    }
    if n_images == 0 || count == 0 {
        return Err(DatasetError::EmptyTrainingSet);
    }
    let n = count as f64;
    let mean = sum as f64 / n / 255.0;
    // N * sum_sq - sum^2 is exact and non-negative.
    let numerator = (count * sum_sq - sum * sum) as f64;
    let std = (numerator / (n * n)).sqrt() / 255.0;
    Ok(NormalizationStats {
        mean,
        std: std.max(STD_FLOOR),
    })
}
