use super::{DspError, Scale, Spectrogram};

/// Geometric frequency axis: `bins_per_octave` bins per octave starting at
/// `f_min`, spanning `n_octaves` octaves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogFreqConfig {
    f_min: f64,
    bins_per_octave: usize,
    n_octaves: usize,
}

impl LogFreqConfig {
    /// C1, the lowest default center frequency.
    pub const DEFAULT_F_MIN: f64 = 32.70;

    pub fn new(f_min: f64, bins_per_octave: usize, n_octaves: usize) -> Result<Self, DspError> {
        if !(f_min > 0.0 && f_min.is_finite()) {
            return Err(DspError::InvalidConfig(format!(
                "log-frequency f_min {f_min} must be positive"
            )));
        }
        if bins_per_octave == 0 || n_octaves == 0 {
            return Err(DspError::InvalidConfig(
                "bins_per_octave and n_octaves must be positive".into(),
            ));
        }
        Ok(Self {
            f_min,
            bins_per_octave,
            n_octaves,
        })
    }

    pub fn f_min(&self) -> f64 {
        self.f_min
    }

    pub fn bins_per_octave(&self) -> usize {
        self.bins_per_octave
    }

    pub fn n_octaves(&self) -> usize {
        self.n_octaves
    }

    pub fn n_bins(&self) -> usize {
        self.bins_per_octave * self.n_octaves
    }

    /// `f_min * 2^(b / bins_per_octave)`.
    pub fn center(&self, b: usize) -> f64 {
        self.f_min * 2f64.powf(b as f64 / self.bins_per_octave as f64)
    }

    /// Lower edge of output bin `b`; `edge(b + 1)` is its upper edge.
    pub fn edge(&self, b: usize) -> f64 {
        self.f_min * 2f64.powf((b as f64 - 0.5) / self.bins_per_octave as f64)
    }

    /// Checks `f_min * 2^n_octaves <= nyquist`.
    pub fn check_range(&self, nyquist: f64) -> Result<(), DspError> {
        let top = self.f_min * 2f64.powi(self.n_octaves as i32);
        if top > nyquist * (1.0 + 1e-12) {
            return Err(DspError::ConfigOutOfRange(format!(
                "f_min * 2^n_octaves = {top} Hz exceeds Nyquist {nyquist} Hz"
            )));
        }
        Ok(())
    }
}

impl Default for LogFreqConfig {
    fn default() -> Self {
        Self {
            f_min: Self::DEFAULT_F_MIN,
            bins_per_octave: 24,
            n_octaves: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Source {
    /// Sum of input bins `[start, end)`.
    Span(usize, usize),
    /// The interval held no FFT bin; copy the one nearest the center.
    Nearest(usize),
}

/// Precomputed assignment of FFT bins to log-frequency bins.
#[derive(Debug, Clone, PartialEq)]
pub struct LogFreqMap {
    sources: Vec<Source>,
    centers: Vec<f64>,
    n_input_bins: usize,
}

impl LogFreqMap {
    /// `bin_frequencies` must be strictly increasing, with the last entry at
    /// Nyquist (as produced by the STFT).
    pub fn new(cfg: &LogFreqConfig, bin_frequencies: &[f64]) -> Result<Self, DspError> {
        let nyquist = *bin_frequencies
            .last()
            .ok_or_else(|| DspError::InvalidConfig("empty frequency axis".into()))?;
        cfg.check_range(nyquist)?;
        let n_out = cfg.n_bins();
        let edges: Vec<f64> = (0..=n_out).map(|b| cfg.edge(b)).collect();
        let first_at_or_above = |f: f64| bin_frequencies.partition_point(|&x| x < f);
        let centers: Vec<f64> = (0..n_out).map(|b| cfg.center(b)).collect();
        let sources = (0..n_out)
            .map(|b| {
                let start = first_at_or_above(edges[b]);
                let end = first_at_or_above(edges[b + 1]);
                if start < end {
                    Source::Span(start, end)
                } else {
                    Source::Nearest(nearest(bin_frequencies, centers[b]))
                }
            })
            .collect();
        Ok(Self {
            sources,
            centers,
            n_input_bins: bin_frequencies.len(),
        })
    }

    pub fn n_bins(&self) -> usize {
        self.sources.len()
    }

    pub fn centers(&self) -> &[f64] {
        &self.centers
    }

    /// True when every output interval captured at least one FFT bin.
    pub fn is_exhaustive(&self) -> bool {
        self.sources.iter().all(|s| matches!(s, Source::Span(..)))
    }

    pub fn apply(&self, spec: &Spectrogram) -> Result<Spectrogram, DspError> {
        if spec.scale != Scale::LinearPower {
            return Err(DspError::WrongScale(spec.scale));
        }
        if spec.n_bins != self.n_input_bins {
            return Err(DspError::ShapeMismatch {
                expected: self.n_input_bins,
                actual: spec.n_bins,
            });
        }
        let frames = spec.n_frames;
        let mut data = vec![0.0; self.sources.len() * frames];
        for (b, source) in self.sources.iter().enumerate() {
            let out = &mut data[b * frames..(b + 1) * frames];
            let (start, end) = match *source {
                Source::Span(s, e) => (s, e),
                Source::Nearest(k) => (k, k + 1),
            };
            for k in start..end {
                for (o, &p) in out.iter_mut().zip(spec.row(k)) {
                    *o += p;
                }
            }
        }
        Ok(Spectrogram {
            data,
            n_bins: self.sources.len(),
            n_frames: frames,
            bin_frequencies: self.centers.clone(),
            frame_times: spec.frame_times.clone(),
            scale: Scale::LogFreqPower,
        })
    }
}

fn nearest(freqs: &[f64], target: f64) -> usize {
    let mut best = 0;
    for (k, &f) in freqs.iter().enumerate() {
        if (f - target).abs() < (freqs[best] - target).abs() {
            best = k;
        }
    }
    best
}

/// Pseudo-constant-Q spectrogram: STFT power pooled over geometric bands.
///
/// Output bin `b` sums the FFT bins in
/// `[center_b * 2^(-1/(2 bpo)), center_b * 2^(1/(2 bpo)))`. Bands too narrow
/// to contain an FFT bin take the power of the bin nearest their center, so
/// low octaves repeat values when the window is short. This is a fixed-window
/// approximation; a true constant-Q transform would lengthen the window at
/// low frequencies instead.
pub fn log_freq_spectrogram(
    spec: &Spectrogram,
    cfg: &LogFreqConfig,
) -> Result<Spectrogram, DspError> {
    LogFreqMap::new(cfg, &spec.bin_frequencies)?.apply(spec)
}
