use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::{DspError, Scale, Spectrogram};
use crate::audio::AudioClip;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Window {
    /// Periodic Hann, `0.5 - 0.5 cos(2 pi n / N)`.
    Hann,
    Rectangular,
}

impl Window {
    pub fn coefficients(self, size: usize) -> Vec<f64> {
        match self {
            Window::Rectangular => vec![1.0; size],
            Window::Hann => (0..size)
                .map(|n| 0.5 - 0.5 * (2.0 * PI * n as f64 / size as f64).cos())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StftConfig {
    window_size: usize,
    hop: usize,
    window: Window,
}

impl StftConfig {
    pub fn new(window_size: usize, hop: usize, window: Window) -> Result<Self, DspError> {
        if window_size < 2 {
            return Err(DspError::InvalidConfig(format!(
                "window_size {window_size} < 2"
            )));
        }
        if hop == 0 || hop > window_size {
            return Err(DspError::InvalidConfig(format!(
                "hop {hop} must be in [1, window_size]"
            )));
        }
        Ok(Self {
            window_size,
            hop,
            window,
        })
    }

    pub fn window_size(&self) -> usize {
        self.window_size
    }

    pub fn hop(&self) -> usize {
        self.hop
    }

    pub fn window(&self) -> Window {
        self.window
    }

    /// One-sided bin count, `window_size / 2 + 1`.
    pub fn n_fft_bins(&self) -> usize {
        self.window_size / 2 + 1
    }

    pub fn n_frames(&self, len: usize) -> usize {
        if len < self.window_size {
            0
        } else {
            (len - self.window_size) / self.hop + 1
        }
    }
}

impl Default for StftConfig {
    fn default() -> Self {
        Self {
            window_size: 2048,
            hop: 512,
            window: Window::Hann,
        }
    }
}

/// One-sided power spectrogram `|X_t[k]|^2`.
///
/// Frame `t` covers samples `[t * hop, t * hop + window_size)`; no padding is
/// added at either end.
pub fn stft_power(clip: &AudioClip, cfg: StftConfig) -> Result<Spectrogram, DspError> {
    let x = clip.samples();
    let n = cfg.window_size;
    if x.len() < n {
        return Err(DspError::ClipTooShort {
            len: x.len(),
            window_size: n,
        });
    }
    let n_frames = cfg.n_frames(x.len());
    let n_bins = cfg.n_fft_bins();
    let window = cfg.window.coefficients(n);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    let mut data = vec![0.0; n_bins * n_frames];
    for t in 0..n_frames {
        let start = t * cfg.hop;
        for (slot, (&s, &w)) in buf.iter_mut().zip(x[start..start + n].iter().zip(&window)) {
            *slot = Complex::new(s * w, 0.0);
        }
        fft.process_with_scratch(&mut buf, &mut scratch);
        for (k, c) in buf.iter().take(n_bins).enumerate() {
            data[k * n_frames + t] = c.norm_sqr();
        }
    }
    let sr = clip.sample_rate() as f64;
    let bin_frequencies = (0..n_bins).map(|k| k as f64 * sr / n as f64).collect();
    let frame_times = (0..n_frames).map(|t| (t * cfg.hop) as f64 / sr).collect();
    Ok(Spectrogram {
        data,
        n_bins,
        n_frames,
        bin_frequencies,
        frame_times,
        scale: Scale::LinearPower,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_signal_concentrates_at_dc() {
        let clip = AudioClip::new(vec![1.0; 32], 8000, "").unwrap();
        let cfg = StftConfig::new(8, 8, Window::Rectangular).unwrap();
        let s = stft_power(&clip, cfg).unwrap();
        assert_eq!(s.n_frames(), 4);
        assert_eq!(s.n_bins(), 5);
        for t in 0..4 {
            assert!((s.get(0, t) - 64.0).abs() < 1e-9);
            for k in 1..5 {
                assert!(s.get(k, t).abs() < 1e-20);
            }
        }
    }

    #[test]
    fn frame_count() {
        let clip = AudioClip::new(vec![0.0; 100], 8000, "").unwrap();
        let cfg = StftConfig::new(64, 16, Window::Hann).unwrap();
        assert_eq!(stft_power(&clip, cfg).unwrap().n_frames(), 3);
        let short = AudioClip::new(vec![0.0; 63], 8000, "").unwrap();
        assert!(matches!(
            stft_power(&short, cfg),
            Err(DspError::ClipTooShort { len: 63, .. })
        ));
    }

    #[test]
    fn config_validation() {
        assert!(StftConfig::new(1, 1, Window::Hann).is_err());
        assert!(StftConfig::new(8, 9, Window::Hann).is_err());
        assert!(StftConfig::new(8, 0, Window::Hann).is_err());
    }

    #[test]
    fn axes() {
        let clip = AudioClip::new(vec![0.1; 4000], 8000, "").unwrap();
        let cfg = StftConfig::new(256, 128, Window::Hann).unwrap();
        let s = stft_power(&clip, cfg).unwrap();
        assert_eq!(s.bin_frequencies()[1], 31.25);
        assert_eq!(*s.bin_frequencies().last().unwrap(), 4000.0);
        assert_eq!(s.frame_times()[1], 0.016);
    }
}
