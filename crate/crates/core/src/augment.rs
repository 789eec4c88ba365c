//! Seeded augmentation: resampling time stretch on raw audio and frequency
//! masking on spectrograms.

use thiserror::Error;

use crate::audio::{interpolate_at, AudioClip};
use crate::dsp::{Scale, Spectrogram, SpectrogramImage};
pub use crate::rng::AugmentRng;

pub const MIN_STRETCH_RATE: f64 = 0.25;
pub const MAX_STRETCH_RATE: f64 = 4.0;

#[derive(Debug, Error)]
pub enum AugmentError {
    #[error("stretch rate {0} outside [0.25, 4.0]")]
    RateOutOfRange(f64),
    #[error("stretch would produce an empty clip")]
    DegenerateOutput,
    #[error("mask width {max_width} must be smaller than the {n_bins} available bins")]
    MaskTooWide { max_width: usize, n_bins: usize },
    #[error("invalid policy: {0}")]
    InvalidPolicy(String),
}

/// Stretches by reading the input at `n * rate`.
///
/// Output length is `round(len / rate)` and the sample rate is unchanged, so
/// `rate > 1` shortens the clip and `rate < 1` lengthens it. Pitch moves by
/// the same factor; no phase vocoder is involved.
pub fn time_stretch(clip: &AudioClip, rate: f64) -> Result<AudioClip, AugmentError> {
    if !(MIN_STRETCH_RATE..=MAX_STRETCH_RATE).contains(&rate) {
        return Err(AugmentError::RateOutOfRange(rate));
    }
    if rate == 1.0 {
        return Ok(clip.clone());
    }
    let out_len = (clip.len() as f64 / rate).round() as usize;
    if out_len == 0 {
        return Err(AugmentError::DegenerateOutput);
    }
    Ok(clip.with_samples(interpolate_at(clip.samples(), rate, out_len)))
}

/// Uniform stretch-rate interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeStretchPolicy {
    rate_min: f64,
    rate_max: f64,
}

impl TimeStretchPolicy {
    pub fn new(rate_min: f64, rate_max: f64) -> Result<Self, AugmentError> {
        if !(rate_min > 0.0 && rate_min <= rate_max && rate_max.is_finite()) {
            return Err(AugmentError::InvalidPolicy(format!(
                "stretch interval [{rate_min}, {rate_max}] must satisfy 0 < min <= max"
            )));
        }
        Ok(Self { rate_min, rate_max })
    }

    pub fn rate_min(&self) -> f64 {
        self.rate_min
    }

    pub fn rate_max(&self) -> f64 {
        self.rate_max
    }

    /// Consumes exactly one draw from `rng`.
    pub fn draw_rate(&self, rng: &mut AugmentRng) -> f64 {
        rng.uniform(self.rate_min, self.rate_max)
    }
}

impl Default for TimeStretchPolicy {
    fn default() -> Self {
        Self {
            rate_min: 0.8,
            rate_max: 1.2,
        }
    }
}

pub fn random_time_stretch(
    clip: &AudioClip,
    policy: &TimeStretchPolicy,
    rng: &mut AugmentRng,
) -> Result<AudioClip, AugmentError> {
    time_stretch(clip, policy.draw_rate(rng))
}

/// Crops or cyclically repeats a clip to exactly `len` samples.
pub fn fit_length(clip: &AudioClip, len: usize) -> AudioClip {
    if clip.len() == len || len == 0 {
        return clip.clone();
    }
    let s = clip.samples();
    clip.with_samples((0..len).map(|i| s[i % s.len()]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskFill {
    Zero,
    /// Minimum of the input, taken before any mask is applied.
    SpecMin,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqMaskPolicy {
    max_width: usize,
    n_masks: usize,
    fill: MaskFill,
}

impl FreqMaskPolicy {
    pub fn new(max_width: usize, n_masks: usize, fill: MaskFill) -> Result<Self, AugmentError> {
        if max_width == 0 || n_masks == 0 {
            return Err(AugmentError::InvalidPolicy(
                "max_width and n_masks must be at least 1".into(),
            ));
        }
        Ok(Self {
            max_width,
            n_masks,
            fill,
        })
    }

    /// Zero fill for power spectrograms, minimum fill for dB and images.
    pub fn default_for(scale: Scale) -> Self {
        Self {
            max_width: 16,
            n_masks: 2,
            fill: if scale.is_power() {
                MaskFill::Zero
            } else {
                MaskFill::SpecMin
            },
        }
    }

    pub fn max_width(&self) -> usize {
        self.max_width
    }

    pub fn n_masks(&self) -> usize {
        self.n_masks
    }

    pub fn fill(&self) -> MaskFill {
        self.fill
    }

    /// Draws the `(width, start)` pairs for an `n_bins`-row target: width
    /// uniform in `[1, max_width]`, then start uniform in `[0, n_bins - width]`.
    pub fn draw_bands(
        &self,
        n_bins: usize,
        rng: &mut AugmentRng,
    ) -> Result<Vec<(usize, usize)>, AugmentError> {
        if self.max_width >= n_bins {
            return Err(AugmentError::MaskTooWide {
                max_width: self.max_width,
                n_bins,
            });
        }
        Ok((0..self.n_masks)
            .map(|_| {
                let w = rng.range_inclusive(1, self.max_width);
                let f0 = rng.range_inclusive(0, n_bins - w);
                (w, f0)
            })
            .collect())
    }
}

/// Anything with frequency rows that can be blanked.
pub trait FrequencyMaskable: Clone {
    fn n_rows(&self) -> usize;
    /// Fill value for `fill`, computed on the unmasked input.
    fn fill_value(&self, fill: MaskFill) -> f64;
    fn fill_row(&mut self, row: usize, value: f64);
}

impl FrequencyMaskable for Spectrogram {
    fn n_rows(&self) -> usize {
        self.n_bins()
    }

    fn fill_value(&self, fill: MaskFill) -> f64 {
        match fill {
            MaskFill::Zero => 0.0,
            MaskFill::SpecMin => self.data().iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    fn fill_row(&mut self, row: usize, value: f64) {
        self.row_mut(row).fill(value);
    }
}

impl FrequencyMaskable for SpectrogramImage {
    fn n_rows(&self) -> usize {
        self.n_bins()
    }

    fn fill_value(&self, fill: MaskFill) -> f64 {
        match fill {
            MaskFill::Zero => 0.0,
            MaskFill::SpecMin => self.pixels().iter().copied().min().unwrap_or(0) as f64,
        }
    }

    fn fill_row(&mut self, row: usize, value: f64) {
        let n = self.n_frames();
        self.pixels_mut()[row * n..(row + 1) * n].fill(value as u8);
    }
}

/// Blanks `n_masks` random horizontal bands. Rows outside the bands are left
/// untouched.
pub fn freq_mask<T: FrequencyMaskable>(
    input: &T,
    policy: &FreqMaskPolicy,
    rng: &mut AugmentRng,
) -> Result<T, AugmentError> {
    let bands = policy.draw_bands(input.n_rows(), rng)?;
    let value = input.fill_value(policy.fill);
    let mut out = input.clone();
    for (w, f0) in bands {
        for row in f0..f0 + w {
            out.fill_row(row, value);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::zero_crossings;

    fn sine(freq: f64, rate: u32, len: usize) -> AudioClip {
        let s = (0..len)
            .map(|n| (2.0 * std::f64::consts::PI * freq * (n as f64 + 0.3) / rate as f64).sin())
            .collect();
        AudioClip::new(s, rate, "sine").unwrap()
    }

    #[test]
    fn stretch_identity_and_length() {
        let c = sine(440.0, 8000, 1000);
        assert_eq!(time_stretch(&c, 1.0).unwrap(), c);
        assert_eq!(time_stretch(&c, 2.0).unwrap().len(), 500);
        assert_eq!(time_stretch(&c, 0.5).unwrap().len(), 2000);
        assert!(matches!(
            time_stretch(&c, 4.5),
            Err(AugmentError::RateOutOfRange(_))
        ));
        assert!(matches!(
            time_stretch(&c, 0.1),
            Err(AugmentError::RateOutOfRange(_))
        ));
        let one = AudioClip::new(vec![0.5], 8000, "").unwrap();
        assert!(matches!(
            time_stretch(&one, 4.0),
            Err(AugmentError::DegenerateOutput)
        ));
    }

    #[test]
    fn stretch_doubles_zero_crossing_rate() {
        let c = sine(440.0, 48_000, 48_000);
        let before = zero_crossings(c.samples());
        let fast = time_stretch(&c, 2.0).unwrap();
        // Same duration of output covers twice the input, so count the
        // crossings per output sample.
        let after = zero_crossings(fast.samples());
        assert!(before.abs_diff(880) <= 2);
        assert!(
            (after as i64 - before as i64).abs() <= 2,
            "{after} vs {before}"
        );
        let per_sample_before = before as f64 / c.len() as f64;
        let per_sample_after = after as f64 / fast.len() as f64;
        assert!((per_sample_after / per_sample_before - 2.0).abs() < 0.01);
    }

    #[test]
    fn degenerate_policy_is_identity() {
        let c = sine(100.0, 8000, 300);
        let p = TimeStretchPolicy::new(1.0, 1.0).unwrap();
        for seed in 0..5 {
            let mut rng = AugmentRng::new(seed);
            assert_eq!(random_time_stretch(&c, &p, &mut rng).unwrap(), c);
        }
        assert!(TimeStretchPolicy::new(1.2, 0.8).is_err());
        assert!(TimeStretchPolicy::new(0.0, 0.8).is_err());
    }

    #[test]
    fn one_draw_per_call() {
        let c = sine(100.0, 8000, 300);
        let p = TimeStretchPolicy::default();
        let mut a = AugmentRng::new(42);
        let mut b = AugmentRng::new(42);
        random_time_stretch(&c, &p, &mut a).unwrap();
        b.next_u64();
        assert_eq!(a, b);
    }

    #[test]
    fn fit_length_wraps() {
        let c = AudioClip::new(vec![1.0, 2.0, 3.0], 8000, "").unwrap();
        assert_eq!(fit_length(&c, 5).samples(), &[1.0, 2.0, 3.0, 1.0, 2.0]);
        assert_eq!(fit_length(&c, 2).samples(), &[1.0, 2.0]);
    }

    #[test]
    fn width_one_changes_one_row() {
        let img = SpectrogramImage::new((0..40).map(|v| v as u8 + 1).collect(), 8, 5, (-80.0, 0.0))
            .unwrap();
        let p = FreqMaskPolicy::new(1, 1, MaskFill::Zero).unwrap();
        let out = freq_mask(&img, &p, &mut AugmentRng::new(5)).unwrap();
        let changed = (0..8).filter(|&b| out.row(b) != img.row(b)).count();
        assert_eq!(changed, 1);
    }

    #[test]
    fn constant_fill_input_unchanged() {
        let img = SpectrogramImage::new(vec![0; 40], 8, 5, (-80.0, 0.0)).unwrap();
        let p = FreqMaskPolicy::new(3, 2, MaskFill::SpecMin).unwrap();
        assert_eq!(freq_mask(&img, &p, &mut AugmentRng::new(1)).unwrap(), img);
    }

    #[test]
    fn too_wide() {
        let img = SpectrogramImage::new(vec![0; 40], 8, 5, (-80.0, 0.0)).unwrap();
        let p = FreqMaskPolicy::new(8, 1, MaskFill::Zero).unwrap();
        assert!(matches!(
            freq_mask(&img, &p, &mut AugmentRng::new(1)),
            Err(AugmentError::MaskTooWide { .. })
        ));
    }

    #[test]
    fn spec_min_fill_on_decibels() {
        let data: Vec<f64> = (0..12).map(|v| -(v as f64)).collect();
        let spec = Spectrogram::new(
            data,
            vec![1.0, 2.0, 3.0, 4.0],
            vec![0.0, 1.0, 2.0],
            Scale::Decibel,
        )
        .unwrap();
        let p = FreqMaskPolicy::default_for(Scale::Decibel);
        assert_eq!(p.fill(), MaskFill::SpecMin);
        let p = FreqMaskPolicy::new(2, 1, p.fill()).unwrap();
        let out = freq_mask(&spec, &p, &mut AugmentRng::new(3)).unwrap();
        let masked: Vec<usize> = (0..4).filter(|&b| out.row(b) != spec.row(b)).collect();
        for b in masked {
            assert!(out.row(b).iter().all(|&v| v == -11.0));
        }
    }
}
