use super::source::load_item;
use super::{
    AugmentHook, ClassIndexMap, DatasetError, ManifestEntry, NormalizationStats, SampleSource,
};
use crate::rng::AugmentRng;

/// The batch size used throughout training and evaluation unless overridden.
pub const DEFAULT_BATCH_SIZE: usize = 32;

/// Stacked, normalized images with their labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    /// `[batch, 1, height, width]` in row-major order.
    pub images: Vec<f64>,
    pub height: usize,
    pub width: usize,
    pub labels: Vec<usize>,
    pub paths: Vec<String>,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn image(&self, i: usize) -> &[f64] {
        let n = self.height * self.width;
        &self.images[i * n..(i + 1) * n]
    }
}

/// Iterator over the batches of one pass through a split part.
///
/// Training passes shuffle entry order with the supplied generator and run
/// the augmentation hook on every item. Evaluation passes keep manifest
/// order and never augment.
pub struct Batches<'a> {
    order: Vec<&'a ManifestEntry>,
    classes: &'a ClassIndexMap,
    batch_size: usize,
    stats: NormalizationStats,
    source: &'a dyn SampleSource,
    augment: Option<(&'a mut AugmentRng, &'a mut dyn AugmentHook)>,
    pos: usize,
    shape: Option<(usize, usize)>,
}

impl<'a> Batches<'a> {
    pub fn training(
        entries: &'a [ManifestEntry],
        classes: &'a ClassIndexMap,
        batch_size: usize,
        stats: NormalizationStats,
        source: &'a dyn SampleSource,
        rng: &'a mut AugmentRng,
        hook: &'a mut dyn AugmentHook,
    ) -> Result<Self, DatasetError> {
        let mut order: Vec<&ManifestEntry> = entries.iter().collect();
        rng.shuffle(&mut order);
        Self::build(order, classes, batch_size, stats, source, Some((rng, hook)))
    }

    pub fn evaluation(
        entries: &'a [ManifestEntry],
        classes: &'a ClassIndexMap,
        batch_size: usize,
        stats: NormalizationStats,
        source: &'a dyn SampleSource,
    ) -> Result<Self, DatasetError> {
        Self::build(
            entries.iter().collect(),
            classes,
            batch_size,
            stats,
            source,
            None,
        )
    }

    fn build(
        order: Vec<&'a ManifestEntry>,
        classes: &'a ClassIndexMap,
        batch_size: usize,
        stats: NormalizationStats,
        source: &'a dyn SampleSource,
        augment: Option<(&'a mut AugmentRng, &'a mut dyn AugmentHook)>,
    ) -> Result<Self, DatasetError> {
        if batch_size == 0 {
            return Err(DatasetError::InvalidBatchSize);
        }
        Ok(Self {
            order,
            classes,
            batch_size,
            stats,
            source,
            augment,
            pos: 0,
            shape: None,
        })
    }

    fn next_batch(&mut self) -> Result<Batch, DatasetError> {
        let end = (self.pos + self.batch_size).min(self.order.len());
        let chunk = &self.order[self.pos..end];
        self.pos = end;
        let mut batch = Batch {
            images: Vec::new(),
            height: 0,
            width: 0,
            labels: Vec::with_capacity(chunk.len()),
            paths: Vec::with_capacity(chunk.len()),
        };
        for &entry in chunk {
            let label = self
                .classes
                .index_of(&entry.label)
                .ok_or_else(|| DatasetError::UnknownLabel(entry.label.clone()))?;
            let augment = self
                .augment
                .as_mut()
                .map(|(rng, hook)| (&mut **rng, &mut **hook));
            let img = load_item(self.source, entry, augment)?;
            let shape = (img.n_bins(), img.n_frames());
            match self.shape {
                None => self.shape = Some(shape),
                Some(expected) if expected != shape => {
                    return Err(DatasetError::ShapeMismatch {
                        path: entry.path.clone(),
                        expected,
                        actual: shape,
                    })
                }
                Some(_) => {}
            }
            batch
                .images
                .extend(img.pixels().iter().map(|&p| self.stats.apply(p)));
            batch.labels.push(label);
            batch.paths.push(entry.path.clone());
        }
        if let Some((h, w)) = self.shape {
            batch.height = h;
            batch.width = w;
        }
        Ok(batch)
    }
}

impl Iterator for Batches<'_> {
    type Item = Result<Batch, DatasetError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.pos >= self.order.len() {
            return None;
        }
        let result = self.next_batch();
        if result.is_err() {
            // Stop after the first failure.
            self.pos = self.order.len();
        }
        Some(result)
    }
}
