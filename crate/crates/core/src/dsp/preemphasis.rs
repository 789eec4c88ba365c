use crate::audio::AudioClip;

use super::DspError;

/// Emphasis filter coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PreEmphasisConfig {
    alpha: f64,
}

impl PreEmphasisConfig {
    pub const DEFAULT_ALPHA: f64 = 0.97;

    pub fn new(alpha: f64) -> Result<Self, DspError> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(DspError::InvalidConfig(format!(
                "pre-emphasis alpha {alpha} outside [0, 1)"
            )));
        }
        Ok(Self { alpha })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

impl Default for PreEmphasisConfig {
    fn default() -> Self {
        Self {
            alpha: Self::DEFAULT_ALPHA,
        }
    }
}

/// `y[n] = (x[n] - alpha * x[n-1]) / (1 - alpha)` with `x[-1] = 0`.
///
/// The `1 / (1 - alpha)` gain keeps a constant input at its original level
/// after the first sample.
pub fn pre_emphasis(clip: &AudioClip, cfg: PreEmphasisConfig) -> AudioClip {
    let alpha = cfg.alpha;
    if alpha == 0.0 {
        return clip.clone();
    }
    let gain = 1.0 - alpha;
    let x = clip.samples();
    let mut prev = 0.0;
    let y = x
        .iter()
        .map(|&s| {
            let v = (s - alpha * prev) / gain;
            prev = s;
            v
        })
        .collect();
    clip.with_samples(y)
}
