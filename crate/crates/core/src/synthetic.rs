//! Small synthetic scene corpus: each class is a family of tones over a
//! shared noise floor. Handy for smoke tests and overfit checks.

use std::path::Path;

use crate::audio::{encode_wav, AudioClip, WavEncoding};
use crate::dataset::ManifestEntry;
use crate::dsp::{DspConfig, LogFreqConfig, PreEmphasisConfig, Representation, StftConfig, Window};
use crate::rng::AugmentRng;

/// Class name and fundamental frequency (Hz) of each tone family.
pub const TONE_FAMILIES: [(&str, f64); 4] = [
    ("hum", 250.0),
    ("drone", 600.0),
    ("chime", 1400.0),
    ("whistle", 3000.0),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticCorpus {
    pub clips_per_class: usize,
    pub sample_rate: u32,
    pub duration_secs: f64,
    /// Peak amplitude of the uniform noise floor.
    pub noise: f64,
    /// Relative fundamental jitter between clips of one class.
    pub jitter: f64,
    pub seed: u64,
}

impl Default for SyntheticCorpus {
    fn default() -> Self {
        Self {
            clips_per_class: 16,
            sample_rate: 8_000,
            duration_secs: 1.0,
            noise: 0.05,
            jitter: 0.04,
            seed: 0,
        }
    }
}

impl SyntheticCorpus {
    pub fn n_classes(&self) -> usize {
        TONE_FAMILIES.len()
    }

    /// Clip `index` of class `class`.
    pub fn clip(&self, class: usize, index: usize) -> AudioClip {
        let (name, f0) = TONE_FAMILIES[class];
        let mut rng = AugmentRng::with_stream(self.seed, ((class as u64) << 32) | index as u64);
        let sr = self.sample_rate as f64;
        let nyquist = sr / 2.0;
        let f = f0 * (1.0 + rng.uniform(-self.jitter, self.jitter));
        let partials: Vec<(f64, f64, f64)> = [(1.0, 0.5), (2.0, 0.2), (3.0, 0.1)]
            .iter()
            .filter(|(k, _)| k * f < 0.9 * nyquist)
            .map(|&(k, a)| (k * f, a, rng.uniform(0.0, std::f64::consts::TAU)))
            .collect();
        let trem = rng.uniform(1.0, 4.0);
        let n = (self.duration_secs * sr).round() as usize;
        let samples = (0..n)
            .map(|i| {
                let t = i as f64 / sr;
                let env = 0.8 + 0.2 * (std::f64::consts::TAU * trem * t).sin();
                let tone: f64 = partials
                    .iter()
                    .map(|&(fk, a, ph)| a * (std::f64::consts::TAU * fk * t + ph).sin())
                    .sum();
                env * tone + rng.uniform(-self.noise, self.noise)
            })
            .collect();
        AudioClip::new(
            samples,
            self.sample_rate,
            format!("{name}/{name}_{index:02}.wav"),
        )
        .expect("synthetic clip is valid")
    }

    /// Manifest entries in class-major order, paths `<class>/<class>_NN.wav`.
    pub fn entries(&self) -> Vec<ManifestEntry> {
        TONE_FAMILIES
            .iter()
            .flat_map(|&(name, _)| {
                (0..self.clips_per_class).map(move |i| ManifestEntry {
                    path: format!("{name}/{name}_{i:02}.wav"),
                    label: name.to_string(),
                    group_key: None,
                })
            })
            .collect()
    }

    /// Writes every clip as 16-bit WAV under `dir` and returns the entries.
    pub fn write(&self, dir: &Path) -> std::io::Result<Vec<ManifestEntry>> {
        let entries = self.entries();
        for (k, e) in entries.iter().enumerate() {
            let clip = self.clip(k / self.clips_per_class, k % self.clips_per_class);
            let path = dir.join(&e.path);
            if let Some(parent) = path.parent() {
                std::fs::create_dir_all(parent)?;
            }
            std::fs::write(path, encode_wav(&clip, WavEncoding::Pcm16))?;
        }
        Ok(entries)
    }

    /// Pipeline sized for the corpus: 256-point STFT with hop 128 and a
    /// 24-bin log-frequency axis from 62.5 Hz, giving 24x61 images for 1 s
    /// clips at 8 kHz.
    pub fn dsp_config(&self) -> DspConfig {
        DspConfig {
            sample_rate: self.sample_rate,
            pre_emphasis: PreEmphasisConfig::default(),
            stft: StftConfig::new(256, 128, Window::Hann).expect("valid stft"),
            representation: Representation::LogFreq(
                LogFreqConfig::new(62.5, 4, 6).expect("valid log-frequency grid"),
            ),
        }
    }
}
