//! Audio to grayscale spectrogram image.
//!
//! The chain is fixed: pre-emphasis, STFT power, mel or log-frequency
//! mapping, decibels relative to the matrix maximum, and finally an 8-bit
//! grayscale image.

mod image;
mod logfreq;
mod mel;
mod pipeline;
mod preemphasis;
mod stft;

pub use image::{
    power_to_db, read_pgm, to_grayscale, write_pgm, Sidecar, SpectrogramImage, AMIN, DB_FLOOR,
};
pub use logfreq::{log_freq_spectrogram, LogFreqConfig, LogFreqMap};
pub use mel::{hz_to_mel, mel_filterbank, mel_spectrogram, mel_to_hz, MelConfig, MelFilterbank};
pub use pipeline::{DspConfig, Representation, SpectrogramPipeline};
pub use preemphasis::{pre_emphasis, PreEmphasisConfig};
pub use stft::{stft_power, StftConfig, Window};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DspError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("clip has {len} samples, shorter than the {window_size}-sample window")]
    ClipTooShort { len: usize, window_size: usize },
    #[error("mel filters {index} and {next} share FFT bin {bin}; window too small for n_mels")]
    FilterCollapse { index: usize, next: usize, bin: i64 },
    #[error("shape mismatch: expected {expected} bins, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("log-frequency range out of bounds: {0}")]
    ConfigOutOfRange(String),
    #[error("spectrogram scale {0:?} not accepted here")]
    WrongScale(Scale),
    #[error("malformed PGM: {0}")]
    MalformedImage(String),
    #[error(transparent)]
    Audio(#[from] crate::audio::AudioError),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// What the values of a [`Spectrogram`] mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    LinearPower,
    MelPower,
    LogFreqPower,
    Decibel,
}

impl Scale {
    pub fn is_power(self) -> bool {
        !matches!(self, Scale::Decibel)
    }
}

/// Frequency x time matrix, stored row-major (`data[bin * n_frames + frame]`).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub(crate) data: Vec<f64>,
    pub(crate) n_bins: usize,
    pub(crate) n_frames: usize,
    pub(crate) bin_frequencies: Vec<f64>,
    pub(crate) frame_times: Vec<f64>,
    pub(crate) scale: Scale,
}

impl Spectrogram {
    /// Builds a spectrogram after checking the shape and axis invariants.
    pub fn new(
        data: Vec<f64>,
        bin_frequencies: Vec<f64>,
        frame_times: Vec<f64>,
        scale: Scale,
    ) -> Result<Self, DspError> {
        let n_bins = bin_frequencies.len();
        let n_frames = frame_times.len();
        if data.len() != n_bins * n_frames {
            return Err(DspError::ShapeMismatch {
                expected: n_bins * n_frames,
                actual: data.len(),
            });
        }
        if bin_frequencies.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DspError::InvalidConfig(
                "bin frequencies must be strictly increasing".into(),
            ));
        }
        if frame_times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DspError::InvalidConfig(
                "frame times must be strictly increasing".into(),
            ));
        }
        if data
            .iter()
            .any(|v| !v.is_finite() || (scale.is_power() && *v < 0.0))
        {
            return Err(DspError::InvalidConfig(
                "values must be finite and, for power scales, non-negative".into(),
            ));
        }
        Ok(Self {
            data,
            n_bins,
            n_frames,
            bin_frequencies,
            frame_times,
            scale,
        })
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn bin_frequencies(&self) -> &[f64] {
        &self.bin_frequencies
    }

    pub fn frame_times(&self) -> &[f64] {
        &self.frame_times
    }

    pub fn get(&self, bin: usize, frame: usize) -> f64 {
        self.data[bin * self.n_frames + frame]
    }

    pub fn row(&self, bin: usize) -> &[f64] {
        &self.data[bin * self.n_frames..(bin + 1) * self.n_frames]
    }

    pub(crate) fn row_mut(&mut self, bin: usize) -> &mut [f64] {
        &mut self.data[bin * self.n_frames..(bin + 1) * self.n_frames]
    }

    /// Column `frame` as a freshly allocated vector.
    pub fn column(&self, frame: usize) -> Vec<f64> {
        (0..self.n_bins).map(|b| self.get(b, frame)).collect()
    }

    /// Bin holding the largest value in `frame`; ties go to the lowest bin.
    pub fn argmax_bin(&self, frame: usize) -> usize {
        let mut best = 0;
        for b in 1..self.n_bins {
            if self.get(b, frame) > self.get(best, frame) {
                best = b;
            }
        }
        best
    }
}
