use super::{DspError, Scale, Spectrogram, StftConfig};

/// HTK mel scale, `2595 * log10(1 + f / 700)`.
pub fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

pub fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MelConfig {
    n_mels: usize,
    f_min: f64,
    f_max: f64,
}

impl MelConfig {
    pub const DEFAULT_N_MELS: usize = 128;
    pub const DEFAULT_F_MIN: f64 = 32.70;

    /// 128 filters from 32.70 Hz up to the Nyquist frequency of `sample_rate`.
    pub fn default_for(sample_rate: u32) -> Self {
        Self {
            n_mels: Self::DEFAULT_N_MELS,
            f_min: Self::DEFAULT_F_MIN,
            f_max: sample_rate as f64 / 2.0,
        }
    }

    pub fn new(n_mels: usize, f_min: f64, f_max: f64) -> Result<Self, DspError> {
        if n_mels < 2 {
            return Err(DspError::InvalidConfig(format!("n_mels {n_mels} < 2")));
        }
        if !(f_min >= 0.0 && f_min < f_max && f_max.is_finite()) {
            return Err(DspError::InvalidConfig(format!(
                "mel range [{f_min}, {f_max}] must satisfy 0 <= f_min < f_max"
            )));
        }
        Ok(Self {
            n_mels,
            f_min,
            f_max,
        })
    }

    pub fn n_mels(&self) -> usize {
        self.n_mels
    }

    pub fn f_min(&self) -> f64 {
        self.f_min
    }

    pub fn f_max(&self) -> f64 {
        self.f_max
    }
}

/// Triangular mel filters over the one-sided FFT bins, row-major
/// `[n_mels x n_fft_bins]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MelFilterbank {
    weights: Vec<f64>,
    n_mels: usize,
    n_fft_bins: usize,
    center_bins: Vec<usize>,
    center_frequencies: Vec<f64>,
}

impl MelFilterbank {
    pub fn n_mels(&self) -> usize {
        self.n_mels
    }

    pub fn n_fft_bins(&self) -> usize {
        self.n_fft_bins
    }

    pub fn weight(&self, mel: usize, bin: usize) -> f64 {
        self.weights[mel * self.n_fft_bins + bin]
    }

    pub fn row(&self, mel: usize) -> &[f64] {
        &self.weights[mel * self.n_fft_bins..(mel + 1) * self.n_fft_bins]
    }

    pub fn center_bins(&self) -> &[usize] {
        &self.center_bins
    }

    pub fn center_frequencies(&self) -> &[f64] {
        &self.center_frequencies
    }
}

/// Builds `n_mels` triangles whose peaks sit on FFT bins.
///
/// `n_mels + 2` points are spaced evenly in mel between `f_min` and `f_max`.
/// Interior points snap to the nearest FFT bin and become filter peaks with
/// weight exactly 1. The outer edges snap outward (strictly below `f_min`,
/// strictly above `f_max`) so every bin inside the range is covered by at
/// least one filter. Edge positions may lie outside the one-sided spectrum.
pub fn mel_filterbank(
    cfg: &MelConfig,
    stft: &StftConfig,
    sample_rate: u32,
) -> Result<MelFilterbank, DspError> {
    let sr = sample_rate as f64;
    if cfg.f_max > sr / 2.0 {
        return Err(DspError::InvalidConfig(format!(
            "mel f_max {} exceeds Nyquist {}",
            cfg.f_max,
            sr / 2.0
        )));
    }
    let n = stft.window_size() as f64;
    let n_fft_bins = stft.n_fft_bins();
    let (mel_lo, mel_hi) = (hz_to_mel(cfg.f_min), hz_to_mel(cfg.f_max));
    let points = cfg.n_mels + 2;
    let mut edges: Vec<i64> = (0..points)
        .map(|i| {
            let mel = mel_lo + (mel_hi - mel_lo) * i as f64 / (points - 1) as f64;
            let pos = mel_to_hz(mel) * n / sr;
            pos.round() as i64
        })
        .collect();
    edges[0] = (cfg.f_min * n / sr).ceil() as i64 - 1;
    edges[points - 1] = (cfg.f_max * n / sr).floor() as i64 + 1;
    for i in 0..points - 1 {
        if edges[i + 1] <= edges[i] {
            return Err(DspError::FilterCollapse {
                index: i,
                next: i + 1,
                bin: edges[i],
            });
        }
    }

    let mut weights = vec![0.0; cfg.n_mels * n_fft_bins];
    for m in 0..cfg.n_mels {
        let (left, center, right) = (edges[m], edges[m + 1], edges[m + 2]);
        let row = &mut weights[m * n_fft_bins..(m + 1) * n_fft_bins];
        for (k, w) in row.iter_mut().enumerate() {
            let k = k as i64;
            *w = if k > left && k <= center {
                (k - left) as f64 / (center - left) as f64
            } else if k > center && k < right {
                (right - k) as f64 / (right - center) as f64
            } else {
                0.0
            };
        }
    }
    let center_bins: Vec<usize> = edges[1..=cfg.n_mels].iter().map(|&b| b as usize).collect();
    let center_frequencies = center_bins.iter().map(|&b| b as f64 * sr / n).collect();
    Ok(MelFilterbank {
        weights,
        n_mels: cfg.n_mels,
        n_fft_bins,
        center_bins,
        center_frequencies,
    })
}

/// `filterbank . power`, a plain matrix product over the FFT bin axis.
pub fn mel_spectrogram(
    spec: &Spectrogram,
    filterbank: &MelFilterbank,
) -> Result<Spectrogram, DspError> {
    if spec.scale != Scale::LinearPower {
        return Err(DspError::WrongScale(spec.scale));
    }
    if filterbank.n_fft_bins != spec.n_bins {
        return Err(DspError::ShapeMismatch {
            expected: filterbank.n_fft_bins,
            actual: spec.n_bins,
        });
    }
    let frames = spec.n_frames;
    let mut data = vec![0.0; filterbank.n_mels * frames];
    for m in 0..filterbank.n_mels {
        let out = &mut data[m * frames..(m + 1) * frames];
        for (k, &w) in filterbank.row(m).iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (o, &p) in out.iter_mut().zip(spec.row(k)) {
                *o += w * p;
            }
        }
    }
    Ok(Spectrogram {
        data,
        n_bins: filterbank.n_mels,
        n_frames: frames,
        bin_frequencies: filterbank.center_frequencies.clone(),
        frame_times: spec.frame_times.clone(),
        scale: Scale::MelPower,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::Window;

    #[test]
    fn mel_formula_points() {
        assert_eq!(hz_to_mel(0.0), 0.0);
        assert!((hz_to_mel(700.0) - 781.1728).abs() < 1e-4);
        assert!((hz_to_mel(700.0) - 2595.0 * 2f64.log10()).abs() < 1e-12);
        for f in [10.0, 440.0, 8000.0] {
            assert!((mel_to_hz(hz_to_mel(f)) - f).abs() < 1e-9);
        }
    }

    #[test]
    fn peaks_are_one_at_center() {
        let cfg = MelConfig::new(40, 0.0, 8000.0).unwrap();
        let stft = StftConfig::new(1024, 256, Window::Hann).unwrap();
        let fb = mel_filterbank(&cfg, &stft, 16_000).unwrap();
        for m in 0..40 {
            let c = fb.center_bins()[m];
            assert_eq!(fb.weight(m, c), 1.0);
            assert!(fb.row(m).iter().all(|&w| (0.0..=1.0).contains(&w)));
            assert!(fb.row(m).iter().sum::<f64>() > 0.0);
        }
        assert!(fb.center_frequencies().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn collapse_when_window_too_small() {
        let cfg = MelConfig::new(128, 0.0, 4000.0).unwrap();
        let stft = StftConfig::new(64, 32, Window::Hann).unwrap();
        assert!(matches!(
            mel_filterbank(&cfg, &stft, 8000),
            Err(DspError::FilterCollapse { .. })
        ));
    }

    #[test]
    fn f_max_above_nyquist_rejected() {
        let cfg = MelConfig::new(8, 0.0, 5000.0).unwrap();
        let stft = StftConfig::new(256, 128, Window::Hann).unwrap();
        assert!(mel_filterbank(&cfg, &stft, 8000).is_err());
    }

    #[test]
    fn single_bin_selects_column() {
        let cfg = MelConfig::new(10, 0.0, 4000.0).unwrap();
        let stft = StftConfig::new(256, 128, Window::Hann).unwrap();
        let fb = mel_filterbank(&cfg, &stft, 8000).unwrap();
        let k = 37;
        let mut data = vec![0.0; 129 * 2];
        data[k * 2] = 3.0;
        let spec = Spectrogram::new(
            data,
            (0..129).map(|k| k as f64 * 31.25).collect(),
            vec![0.0, 0.016],
            Scale::LinearPower,
        )
        .unwrap();
        let mel = mel_spectrogram(&spec, &fb).unwrap();
        for m in 0..10 {
            assert_eq!(mel.get(m, 0), fb.weight(m, k) * 3.0);
            assert_eq!(mel.get(m, 1), 0.0);
        }
    }
}
