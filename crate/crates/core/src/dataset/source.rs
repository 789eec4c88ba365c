use std::collections::HashMap;
use std::path::{Path, PathBuf};

use super::{DatasetError, ManifestEntry};
use crate::audio::{read_wav, AudioClip};
use crate::augment::{
    fit_length, freq_mask, random_time_stretch, FreqMaskPolicy, TimeStretchPolicy,
};
use crate::dsp::{read_pgm, SpectrogramImage, SpectrogramPipeline};
use crate::rng::AugmentRng;

/// Raw material for one dataset item.
#[derive(Debug, Clone)]
pub enum Sample {
    Audio(AudioClip),
    Image(SpectrogramImage),
}

/// Loads items named by manifest entries.
pub trait SampleSource {
    /// Loads `entry`. With `want_audio` the source should return raw audio
    /// when it has any; otherwise it may return a cached image.
    fn load(&self, entry: &ManifestEntry, want_audio: bool) -> Result<Sample, DatasetError>;

    /// Renders a (possibly augmented) clip into an image.
    fn render(
        &self,
        entry: &ManifestEntry,
        clip: &AudioClip,
    ) -> Result<SpectrogramImage, DatasetError>;

    fn load_image(&self, entry: &ManifestEntry) -> Result<SpectrogramImage, DatasetError> {
        match self.load(entry, false)? {
            Sample::Image(img) => Ok(img),
            Sample::Audio(clip) => self.render(entry, &clip),
        }
    }
}

/// Per-item training augmentation. Validation and test iteration never call
/// these.
pub trait AugmentHook {
    fn wants_audio(&self) -> bool {
        false
    }

    fn on_audio(
        &mut self,
        clip: AudioClip,
        _rng: &mut AugmentRng,
    ) -> Result<AudioClip, DatasetError> {
        Ok(clip)
    }

    fn on_image(
        &mut self,
        image: SpectrogramImage,
        _rng: &mut AugmentRng,
    ) -> Result<SpectrogramImage, DatasetError> {
        Ok(image)
    }
}

/// No augmentation.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoAugment;

impl AugmentHook for NoAugment {}

/// Random time stretch on audio followed by frequency masking on the image.
///
/// The stretched clip is cropped or cyclically repeated back to its original
/// length so every training image keeps the same width.
#[derive(Debug, Clone, Default)]
pub struct SceneAugmenter {
    pub stretch: Option<TimeStretchPolicy>,
    pub mask: Option<FreqMaskPolicy>,
}

impl AugmentHook for SceneAugmenter {
    fn wants_audio(&self) -> bool {
        self.stretch.is_some()
    }

    fn on_audio(
        &mut self,
        clip: AudioClip,
        rng: &mut AugmentRng,
    ) -> Result<AudioClip, DatasetError> {
        match &self.stretch {
            Some(policy) => {
                let stretched = random_time_stretch(&clip, policy, rng)?;
                Ok(fit_length(&stretched, clip.len()))
            }
            None => Ok(clip),
        }
    }

    fn on_image(
        &mut self,
        image: SpectrogramImage,
        rng: &mut AugmentRng,
    ) -> Result<SpectrogramImage, DatasetError> {
        match &self.mask {
            Some(policy) => Ok(freq_mask(&image, policy, rng)?),
            None => Ok(image),
        }
    }
}

/// Loads one item, applying `hook` when given.
pub(crate) fn load_item<'h>(
    source: &dyn SampleSource,
    entry: &ManifestEntry,
    augment: Option<(&mut AugmentRng, &mut (dyn AugmentHook + 'h))>,
) -> Result<SpectrogramImage, DatasetError> {
    match augment {
        None => source.load_image(entry),
        Some((rng, hook)) => {
            let image = match source.load(entry, hook.wants_audio())? {
                Sample::Image(img) => img,
                Sample::Audio(clip) => {
                    let clip = hook.on_audio(clip, rng)?;
                    source.render(entry, &clip)?
                }
            };
            hook.on_image(image, rng)
        }
    }
}

/// Reads WAV or PGM files relative to a root directory.
///
/// For a `.wav` entry, a pre-converted `<image_dir>/<relative path>.pgm` is
/// used when present and raw audio was not requested; otherwise the WAV is
/// decoded and rendered with `pipeline`.
#[derive(Debug, Clone)]
pub struct FileSource {
    root: PathBuf,
    image_dir: Option<PathBuf>,
    pipeline: SpectrogramPipeline,
}

impl FileSource {
    pub fn new(
        root: impl Into<PathBuf>,
        image_dir: Option<PathBuf>,
        pipeline: SpectrogramPipeline,
    ) -> Self {
        Self {
            root: root.into(),
            image_dir,
            pipeline,
        }
    }

    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        let p = Path::new(&entry.path);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.root.join(p)
        }
    }

    /// Where the converted image for `entry` lives, if an image directory is
    /// configured.
    pub fn image_path(&self, entry: &ManifestEntry) -> Option<PathBuf> {
        let dir = self.image_dir.as_ref()?;
        let p = Path::new(&entry.path);
        let rel = if p.is_absolute() {
            PathBuf::from(p.file_name()?)
        } else {
            p.to_path_buf()
        };
        Some(dir.join(rel).with_extension("pgm"))
    }

    fn fail(entry: &ManifestEntry, reason: impl ToString) -> DatasetError {
        DatasetError::ImageLoadFailure {
            path: entry.path.clone(),
            reason: reason.to_string(),
        }
    }

    fn read_image(path: &Path, entry: &ManifestEntry) -> Result<SpectrogramImage, DatasetError> {
        let bytes = std::fs::read(path).map_err(|e| Self::fail(entry, e))?;
        read_pgm(&bytes).map_err(|e| Self::fail(entry, e))
    }
}

impl SampleSource for FileSource {
    fn load(&self, entry: &ManifestEntry, want_audio: bool) -> Result<Sample, DatasetError> {
        let path = self.resolve(entry);
        let is_pgm = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
        if is_pgm {
            return Ok(Sample::Image(Self::read_image(&path, entry)?));
        }
        if !want_audio {
            if let Some(cached) = self.image_path(entry).filter(|p| p.is_file()) {
                return Ok(Sample::Image(Self::read_image(&cached, entry)?));
            }
        }
        let clip = read_wav(&path).map_err(|e| Self::fail(entry, e))?;
        if want_audio {
            Ok(Sample::Audio(clip))
        } else {
            Ok(Sample::Image(self.render(entry, &clip)?))
        }
    }

    fn render(
        &self,
        entry: &ManifestEntry,
        clip: &AudioClip,
    ) -> Result<SpectrogramImage, DatasetError> {
        self.pipeline.render(clip).map_err(|e| Self::fail(entry, e))
    }
}

/// Images held in memory, keyed by manifest path.
#[derive(Debug, Clone, Default)]
pub struct MemorySource {
    images: HashMap<String, SpectrogramImage>,
}

impl MemorySource {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, path: impl Into<String>, image: SpectrogramImage) {
        self.images.insert(path.into(), image);
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }
}

impl SampleSource for MemorySource {
    fn load(&self, entry: &ManifestEntry, _want_audio: bool) -> Result<Sample, DatasetError> {
        self.images
            .get(&entry.path)
            .cloned()
            .map(Sample::Image)
            .ok_or_else(|| DatasetError::ImageLoadFailure {
                path: entry.path.clone(),
                reason: "not in memory cache".into(),
            })
    }

    fn render(
        &self,
        entry: &ManifestEntry,
        _clip: &AudioClip,
    ) -> Result<SpectrogramImage, DatasetError> {
        Err(DatasetError::ImageLoadFailure {
            path: entry.path.clone(),
            reason: "memory source cannot render audio".into(),
        })
    }
}

/// Applies the augmentation once per entry, ahead of training, and caches the
/// results. Entries are processed in the given order with one shared `rng`.
pub fn materialize_augmented(
    entries: &[ManifestEntry],
    source: &dyn SampleSource,
    rng: &mut AugmentRng,
    hook: &mut dyn AugmentHook,
) -> Result<MemorySource, DatasetError> {
    let mut cache = MemorySource::new();
    for e in entries {
        let img = load_item(source, e, Some((&mut *rng, &mut *hook)))?;
        cache.insert(e.path.clone(), img);
    }
    Ok(cache)
}
