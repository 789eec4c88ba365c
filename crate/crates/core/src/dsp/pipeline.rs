use super::{
    mel_filterbank, mel_spectrogram, power_to_db, pre_emphasis, stft_power, to_grayscale, DspError,
    LogFreqConfig, LogFreqMap, MelConfig, MelFilterbank, PreEmphasisConfig, Sidecar, Spectrogram,
    SpectrogramImage, StftConfig, Window, DB_FLOOR,
};
use crate::audio::{resample, AudioClip, DEFAULT_SAMPLE_RATE};

/// Frequency axis used for the final image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Representation {
    Mel(MelConfig),
    LogFreq(LogFreqConfig),
}

/// Everything needed to turn a clip into an image.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DspConfig {
    pub sample_rate: u32,
    pub pre_emphasis: PreEmphasisConfig,
    pub stft: StftConfig,
    pub representation: Representation,
}

impl Default for DspConfig {
    fn default() -> Self {
        Self {
            sample_rate: DEFAULT_SAMPLE_RATE,
            pre_emphasis: PreEmphasisConfig::default(),
            stft: StftConfig::default(),
            representation: Representation::LogFreq(LogFreqConfig::default()),
        }
    }
}

#[derive(Debug, Clone)]
enum Mapper {
    Mel(MelFilterbank),
    LogFreq(LogFreqMap),
}

/// Resample, emphasize, STFT, frequency mapping, dB, grayscale.
///
/// Filterbanks are built once in [`SpectrogramPipeline::new`]; rendering is
/// a pure function of the clip.
#[derive(Debug, Clone)]
pub struct SpectrogramPipeline {
    cfg: DspConfig,
    mapper: Mapper,
}

impl SpectrogramPipeline {
    pub fn new(cfg: DspConfig) -> Result<Self, DspError> {
        if cfg.sample_rate == 0 {
            return Err(DspError::InvalidConfig(
                "sample_rate must be positive".into(),
            ));
        }
        let mapper = match &cfg.representation {
            Representation::Mel(mel) => {
                Mapper::Mel(mel_filterbank(mel, &cfg.stft, cfg.sample_rate)?)
            }
            Representation::LogFreq(lf) => {
                let n = cfg.stft.window_size() as f64;
                let sr = cfg.sample_rate as f64;
                let freqs: Vec<f64> = (0..cfg.stft.n_fft_bins())
                    .map(|k| k as f64 * sr / n)
                    .collect();
                Mapper::LogFreq(LogFreqMap::new(lf, &freqs)?)
            }
        };
        Ok(Self { cfg, mapper })
    }

    pub fn config(&self) -> &DspConfig {
        &self.cfg
    }

    pub fn n_bins(&self) -> usize {
        match &self.mapper {
            Mapper::Mel(fb) => fb.n_mels(),
            Mapper::LogFreq(map) => map.n_bins(),
        }
    }

    /// Mapped power spectrogram of the emphasized, resampled clip.
    pub fn power(&self, clip: &AudioClip) -> Result<Spectrogram, DspError> {
        let clip = resample(clip, self.cfg.sample_rate)?;
        let emphasized = pre_emphasis(&clip, self.cfg.pre_emphasis);
        let linear = stft_power(&emphasized, self.cfg.stft)?;
        match &self.mapper {
            Mapper::Mel(fb) => mel_spectrogram(&linear, fb),
            Mapper::LogFreq(map) => map.apply(&linear),
        }
    }

    pub fn decibels(&self, clip: &AudioClip) -> Result<Spectrogram, DspError> {
        power_to_db(&self.power(clip)?)
    }

    pub fn render(&self, clip: &AudioClip) -> Result<SpectrogramImage, DspError> {
        to_grayscale(&self.decibels(clip)?)
    }

    /// Provenance record for images produced by this pipeline.
    pub fn sidecar(&self, source: &str, image: &SpectrogramImage) -> Sidecar {
        let c = &self.cfg;
        let mut s = Sidecar::new();
        s.push("source", source);
        s.push("sample_rate", c.sample_rate);
        s.push("pre_emphasis_alpha", c.pre_emphasis.alpha());
        s.push("window_size", c.stft.window_size());
        s.push("hop", c.stft.hop());
        s.push(
            "window",
            match c.stft.window() {
                Window::Hann => "hann",
                Window::Rectangular => "rectangular",
            },
        );
        match &c.representation {
            Representation::Mel(m) => {
                s.push("representation", "mel");
                s.push("n_mels", m.n_mels());
                s.push("f_min", m.f_min());
                s.push("f_max", m.f_max());
            }
            Representation::LogFreq(l) => {
                s.push("representation", "log_freq");
                s.push("f_min", l.f_min());
                s.push("bins_per_octave", l.bins_per_octave());
                s.push("n_octaves", l.n_octaves());
            }
        }
        s.push("db_lo", DB_FLOOR);
        s.push("db_hi", 0.0);
        s.push("n_bins", image.n_bins());
        s.push("n_frames", image.n_frames());
        s
    }
}
