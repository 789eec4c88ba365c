//! Pipeline configuration file.
//!
//! The file is TOML restricted to flat `[section]` tables of `key = value`
//! pairs. Every key is optional; missing keys take the defaults below.
//! Relative paths in `[paths]` resolve against the file's directory.
//!
//! ```toml
//! [audio]
//! sample_rate = 22050
//!
//! [pre_emphasis]
//! alpha = 0.97
//!
//! [stft]
//! window_size = 2048
//! hop = 512
//! window = "hann"            # or "rectangular"
//!
//! [representation]
//! kind = "log_freq"          # or "mel"
//!
//! [mel]
//! n_mels = 128
//! f_min = 32.70
//! # f_max defaults to the Nyquist frequency
//!
//! [log_freq]
//! f_min = 32.70
//! bins_per_octave = 24
//! n_octaves = 8
//!
//! [augment]
//! time_stretch = true
//! stretch_min = 0.8
//! stretch_max = 1.2
//! freq_mask = true
//! mask_max_width = 16
//! mask_count = 2
//! mask_fill = "spec_min"     # or "zero"
//! materialize = false        # true: augment once before training
//!
//! [split]
//! train = 0.7
//! validation = 0.15
//! test = 0.15
//! group_aware = false
//!
//! [model]
//! conv_channels = [8, 16, 32]
//! fc1 = 256
//! fc2 = 128
//!
//! [train]
//! learning_rate = 0.01
//! batch_size = 32
//! max_epochs = 200
//! patience = 10
//! optimizer = "sgd_momentum" # or "sgd"
//! momentum = 0.9
//!
//! [paths]
//! manifest = "manifest.csv"
//! audio_root = "audio"
//! image_dir = "images"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use scene_core::augment::{FreqMaskPolicy, MaskFill, TimeStretchPolicy};
use scene_core::dataset::{SceneAugmenter, SplitRatios};
use scene_core::dsp::{
    DspConfig, LogFreqConfig, MelConfig, PreEmphasisConfig, Representation, StftConfig, Window,
};
use scene_core::model::{NetworkSpec, OptimizerKind, TrainConfig};

use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub audio: AudioSection,
    pub pre_emphasis: PreEmphasisSection,
    pub stft: StftSection,
    pub representation: RepresentationSection,
    pub mel: MelSection,
    pub log_freq: LogFreqSection,
    pub augment: AugmentSection,
    pub split: SplitSection,
    pub model: ModelSection,
    pub train: TrainSection,
    pub paths: PathsSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AudioSection {
    pub sample_rate: u32,
}

impl Default for AudioSection {
    fn default() -> Self {
        Self {
            sample_rate: scene_core::audio::DEFAULT_SAMPLE_RATE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreEmphasisSection {
    pub alpha: f64,
}

impl Default for PreEmphasisSection {
    fn default() -> Self {
        Self { alpha: 0.97 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowName {
    Hann,
    Rectangular,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StftSection {
    pub window_size: usize,
    pub hop: usize,
    pub window: WindowName,
}

impl Default for StftSection {
    fn default() -> Self {
        Self {
            window_size: 2048,
            hop: 512,
            window: WindowName::Hann,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepresentationKind {
    #[default]
    LogFreq,
    Mel,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RepresentationSection {
    pub kind: RepresentationKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MelSection {
    pub n_mels: usize,
    pub f_min: f64,
    pub f_max: Option<f64>,
}

impl Default for MelSection {
    fn default() -> Self {
        Self {
            n_mels: MelConfig::DEFAULT_N_MELS,
            f_min: MelConfig::DEFAULT_F_MIN,
            f_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LogFreqSection {
    pub f_min: f64,
    pub bins_per_octave: usize,
    pub n_octaves: usize,
}

impl Default for LogFreqSection {
    fn default() -> Self {
        let d = LogFreqConfig::default();
        Self {
            f_min: d.f_min(),
            bins_per_octave: d.bins_per_octave(),
            n_octaves: d.n_octaves(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskFillName {
    Zero,
    SpecMin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentSection {
    pub time_stretch: bool,
    pub stretch_min: f64,
    pub stretch_max: f64,
    pub freq_mask: bool,
    pub mask_max_width: usize,
    pub mask_count: usize,
    pub mask_fill: MaskFillName,
    pub materialize: bool,
}

impl Default for AugmentSection {
    fn default() -> Self {
        Self {
            time_stretch: true,
            stretch_min: 0.8,
            stretch_max: 1.2,
            freq_mask: true,
            mask_max_width: 16,
            mask_count: 2,
            mask_fill: MaskFillName::SpecMin,
            materialize: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSection {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
    pub group_aware: bool,
}

impl Default for SplitSection {
    fn default() -> Self {
        Self {
            train: 0.7,
            validation: 0.15,
            test: 0.15,
            group_aware: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSection {
    pub conv_channels: Vec<usize>,
    pub fc1: usize,
    pub fc2: usize,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            conv_channels: NetworkSpec::DEFAULT_CONV_CHANNELS.to_vec(),
            fc1: NetworkSpec::DEFAULT_FC1,
            fc2: NetworkSpec::DEFAULT_FC2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerName {
    Sgd,
    SgdMomentum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSection {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub optimizer: OptimizerName,
    pub momentum: f64,
}

impl Default for TrainSection {
    fn default() -> Self {
        let d = TrainConfig::default();
        Self {
            learning_rate: d.learning_rate,
            batch_size: d.batch_size,
            max_epochs: d.max_epochs,
            patience: d.patience,
            optimizer: OptimizerName::SgdMomentum,
            momentum: d.optimizer.momentum(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsSection {
    pub manifest: Option<PathBuf>,
    /// Directory manifest paths are relative to; defaults to the manifest's
    /// own directory.
    pub audio_root: Option<PathBuf>,
    /// Where `convert` wrote images; used as a cache during training.
    pub image_dir: Option<PathBuf>,
}

fn invalid(field: &str, err: impl ToString) -> CliError {
    CliError::Config {
        field: field.to_string(),
        message: err.to_string(),
    }
}

impl PipelineConfig {
    /// Parses, resolves relative paths against `base` and validates.
    pub fn from_toml(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut cfg: Self = toml::from_str(text).map_err(|e| CliError::Config {
            field: "config".into(),
            message: e.to_string(),
        })?;
        for (name, p) in [
            ("paths.manifest", &mut cfg.paths.manifest),
            ("paths.audio_root", &mut cfg.paths.audio_root),
            ("paths.image_dir", &mut cfg.paths.image_dir),
        ] {
            if let Some(path) = p {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
                if !path.exists() {
                    return Err(CliError::MissingPath {
                        field: name.into(),
                        path: path.display().to_string(),
                    });
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks every section by building the objects it describes.
    pub fn validate(&self) -> Result<(), CliError> {
        self.dsp_config()?;
        self.split_ratios()?;
        self.augmenter()?;
        self.train_config(0)?;
        if self.model.conv_channels.is_empty() {
            return Err(invalid(
                "model.conv_channels",
                "at least one conv block is required",
            ));
        }
        Ok(())
    }

    pub fn dsp_config(&self) -> Result<DspConfig, CliError> {
        let sr = self.audio.sample_rate;
        if sr == 0 {
            return Err(invalid("audio.sample_rate", "must be positive"));
        }
        let pre_emphasis = PreEmphasisConfig::new(self.pre_emphasis.alpha)
            .map_err(|e| invalid("pre_emphasis.alpha", e))?;
        let window = match self.stft.window {
            WindowName::Hann => Window::Hann,
            WindowName::Rectangular => Window::Rectangular,
        };
        let stft = StftConfig::new(self.stft.window_size, self.stft.hop, window)
            .map_err(|e| invalid("stft", e))?;
        let representation = match self.representation.kind {
            RepresentationKind::Mel => {
                let f_max = self.mel.f_max.unwrap_or(sr as f64 / 2.0);
                Representation::Mel(
                    MelConfig::new(self.mel.n_mels, self.mel.f_min, f_max)
                        .map_err(|e| invalid("mel", e))?,
                )
            }
            RepresentationKind::LogFreq => Representation::LogFreq(
                LogFreqConfig::new(
                    self.log_freq.f_min,
                    self.log_freq.bins_per_octave,
                    self.log_freq.n_octaves,
                )
                .map_err(|e| invalid("log_freq", e))?,
            ),
        };
        let cfg = DspConfig {
            sample_rate: sr,
            pre_emphasis,
            stft,
            representation,
        };
        // Building the pipeline checks ranges against the Nyquist limit.
        scene_core::dsp::SpectrogramPipeline::new(cfg).map_err(|e| invalid("representation", e))?;
        Ok(cfg)
    }

    pub fn split_ratios(&self) -> Result<SplitRatios, CliError> {
        Ok(SplitRatios::new(
            self.split.train,
            self.split.validation,
            self.split.test,
        )?)
    }

    pub fn augmenter(&self) -> Result<SceneAugmenter, CliError> {
        let a = &self.augment;
        let stretch = if a.time_stretch {
            Some(
                TimeStretchPolicy::new(a.stretch_min, a.stretch_max)
                    .map_err(|e| invalid("augment.stretch_min/stretch_max", e))?,
            )
        } else {
            None
        };
        let fill = match a.mask_fill {
            MaskFillName::Zero => MaskFill::Zero,
            MaskFillName::SpecMin => MaskFill::SpecMin,
        };
        let mask = if a.freq_mask {
            Some(
                FreqMaskPolicy::new(a.mask_max_width, a.mask_count, fill)
                    .map_err(|e| invalid("augment.mask_max_width/mask_count", e))?,
            )
        } else {
            None
        };
        Ok(SceneAugmenter { stretch, mask })
    }

    pub fn train_config(&self, seed: u64) -> Result<TrainConfig, CliError> {
        let t = &self.train;
        let optimizer = match t.optimizer {
            OptimizerName::Sgd => OptimizerKind::Sgd,
            OptimizerName::SgdMomentum => OptimizerKind::SgdMomentum {
                momentum: t.momentum,
            },
        };
        let cfg = TrainConfig {
            learning_rate: t.learning_rate,
            batch_size: t.batch_size,
            max_epochs: t.max_epochs,
            patience: t.patience,
            seed,
            optimizer,
        };
        cfg.validate().map_err(|e| invalid("train", e))?;
        Ok(cfg)
    }

    pub fn network_spec(&self, height: usize, width: usize, n_classes: usize) -> NetworkSpec {
        NetworkSpec {
            input_height: height,
            input_width: width,
            conv_channels: self.model.conv_channels.clone(),
            fc1_units: self.model.fc1,
            fc2_units: self.model.fc2,
            n_classes,
        }
    }
}
