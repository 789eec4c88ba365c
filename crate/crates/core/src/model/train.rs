use std::path::PathBuf;

use super::{Checkpoint, ModelError, Network, NetworkSpec, Optimizer, OptimizerKind};
use crate::dataset::{
    AugmentHook, Batch, Batches, ClassIndexMap, DatasetError, ManifestEntry, NormalizationStats,
    SampleSource,
};
use crate::rng::AugmentRng;

/// Generator stream used for shuffling and augmentation during training.
const TRAIN_STREAM: u64 = 0x7A1E;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    pub seed: u64,
    pub optimizer: OptimizerKind,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            batch_size: crate::dataset::DEFAULT_BATCH_SIZE,
            max_epochs: 200,
            patience: 10,
            seed: 0,
            optimizer: OptimizerKind::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: String| Err(ModelError::InvalidConfig(m));
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad(format!(
                "learning rate {} must be positive",
                self.learning_rate
            ));
        }
        if self.batch_size == 0 || self.max_epochs == 0 || self.patience == 0 {
            return bad("batch size, max epochs and patience must be at least 1".into());
        }
        if self.patience > self.max_epochs {
            return bad(format!(
                "patience {} exceeds max epochs {}",
                self.patience, self.max_epochs
            ));
        }
        self.optimizer.validate()
    }
}

/// Result of observing one epoch's validation accuracy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopDecision {
    pub improved: bool,
    pub patience_left: usize,
    pub stop: bool,
}

/// Patience-based early stopping on a metric where larger is better.
#[derive(Debug, Clone, PartialEq)]
pub struct EarlyStopping {
    patience: usize,
    best: Option<f64>,
    since_best: usize,
}

impl EarlyStopping {
    pub fn new(patience: usize) -> Self {
        Self {
            patience,
            best: None,
            since_best: 0,
        }
    }

    /// Resumes with a known best value and no epochs since it.
    pub fn with_best(patience: usize, best: f64) -> Self {
        Self {
            patience,
            best: Some(best),
            since_best: 0,
        }
    }

    pub fn best(&self) -> Option<f64> {
        self.best
    }

    /// Only a strict improvement resets the counter.
    pub fn observe(&mut self, value: f64) -> StopDecision {
        let improved = self.best.is_none_or(|b| value > b);
        if improved {
            self.best = Some(value);
            self.since_best = 0;
        } else {
            self.since_best += 1;
        }
        let patience_left = self.patience.saturating_sub(self.since_best);
        StopDecision {
            improved,
            patience_left,
            stop: patience_left == 0,
        }
    }
}

/// One line of the training log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpochRecord {
    /// 1-based.
    pub epoch: usize,
    /// Sample-weighted mean loss over the epoch's batches.
    pub train_loss: f64,
    pub val_accuracy: f64,
    pub best_val_accuracy: f64,
    pub patience_left: usize,
    pub improved: bool,
}

impl std::fmt::Display for EpochRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "epoch={} train_loss={:.6} val_accuracy={:.4} best_val_accuracy={:.4} patience_left={}",
            self.epoch,
            self.train_loss,
            self.val_accuracy,
            self.best_val_accuracy,
            self.patience_left
        )
    }
}

/// Supplies the training batches of one epoch.
pub trait EpochSource {
    fn batches<'s>(
        &'s mut self,
        rng: &'s mut AugmentRng,
    ) -> Result<Box<dyn Iterator<Item = Result<Batch, DatasetError>> + 's>, DatasetError>;
}

/// Scores a network after each epoch.
pub trait Validator {
    fn accuracy(&mut self, network: &Network) -> Result<f64, ModelError>;
}

impl<F> Validator for F
where
    F: FnMut(&Network) -> Result<f64, ModelError>,
{
    fn accuracy(&mut self, network: &Network) -> Result<f64, ModelError> {
        self(network)
    }
}

/// Shuffled, augmented passes over the training part of a split.
pub struct TrainingSet<'a> {
    pub entries: &'a [ManifestEntry],
    pub classes: &'a ClassIndexMap,
    pub batch_size: usize,
    pub stats: NormalizationStats,
    pub source: &'a dyn SampleSource,
    pub hook: &'a mut dyn AugmentHook,
}

impl EpochSource for TrainingSet<'_> {
    fn batches<'s>(
        &'s mut self,
        rng: &'s mut AugmentRng,
    ) -> Result<Box<dyn Iterator<Item = Result<Batch, DatasetError>> + 's>, DatasetError> {
        let it = Batches::training(
            self.entries,
            self.classes,
            self.batch_size,
            self.stats,
            self.source,
            rng,
            &mut *self.hook,
        )?;
        Ok(Box::new(it))
    }
}

/// In-order, unaugmented passes over a held-out part.
pub struct EvalSet<'a> {
    pub entries: &'a [ManifestEntry],
    pub classes: &'a ClassIndexMap,
    pub batch_size: usize,
    pub stats: NormalizationStats,
    pub source: &'a dyn SampleSource,
}

impl EvalSet<'_> {
    pub fn batches(&self) -> Result<Batches<'_>, DatasetError> {
        Batches::evaluation(
            self.entries,
            self.classes,
            self.batch_size,
            self.stats,
            self.source,
        )
    }
}

impl Validator for EvalSet<'_> {
    fn accuracy(&mut self, network: &Network) -> Result<f64, ModelError> {
        accuracy(network, self.batches()?)
    }
}

/// Fraction of samples whose argmax prediction equals the label.
pub fn accuracy<I>(network: &Network, batches: I) -> Result<f64, ModelError>
where
    I: IntoIterator<Item = Result<Batch, DatasetError>>,
{
    let (mut correct, mut total) = (0usize, 0usize);
    for batch in batches {
        let batch = batch?;
        let out = network.forward(&batch.images, batch.len())?;
        correct += out
            .predictions()
            .iter()
            .zip(&batch.labels)
            .filter(|(p, l)| p == l)
            .count();
        total += batch.len();
    }
    if total == 0 {
        return Err(ModelError::EmptyDataset);
    }
    Ok(correct as f64 / total as f64)
}

/// Outcome of a training run.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// The state with the highest validation accuracy.
    pub best: Checkpoint,
    pub history: Vec<EpochRecord>,
    /// Whether patience ran out before `max_epochs`.
    pub stopped_early: bool,
}

/// Mini-batch training with validation-accuracy early stopping.
type EpochHook<'a> = Box<dyn FnMut(&EpochRecord) + 'a>;

pub struct Trainer<'a> {
    spec: NetworkSpec,
    config: TrainConfig,
    classes: ClassIndexMap,
    normalization: NormalizationStats,
    checkpoint_path: Option<PathBuf>,
    resume: Option<Checkpoint>,
    on_epoch: Option<EpochHook<'a>>,
}

impl<'a> Trainer<'a> {
    pub fn new(
        spec: NetworkSpec,
        config: TrainConfig,
        classes: ClassIndexMap,
        normalization: NormalizationStats,
    ) -> Self {
        Self {
            spec,
            config,
            classes,
            normalization,
            checkpoint_path: None,
            resume: None,
            on_epoch: None,
        }
    }

    /// Saves every new best state to `path`.
    pub fn checkpoint_path(mut self, path: impl Into<PathBuf>) -> Self {
        self.checkpoint_path = Some(path.into());
        self
    }

    /// Continues from a saved state instead of a fresh initialization.
    pub fn resume_from(mut self, checkpoint: Checkpoint) -> Self {
        self.resume = Some(checkpoint);
        self
    }

    pub fn on_epoch(mut self, f: impl FnMut(&EpochRecord) + 'a) -> Self {
        self.on_epoch = Some(Box::new(f));
        self
    }

    pub fn run(
        mut self,
        data: &mut dyn EpochSource,
        validator: &mut dyn Validator,
    ) -> Result<TrainOutcome, ModelError> {
        self.config.validate()?;
        self.spec.validate()?;
        if self.classes.len() != self.spec.n_classes {
            return Err(ModelError::InvalidConfig(format!(
                "{} classes in the class map but the network has {} outputs",
                self.classes.len(),
                self.spec.n_classes
            )));
        }
        let cfg = self.config;
        let (mut net, mut opt, mut rng, mut stopper, start, mut best) = match self.resume.take() {
            Some(ck) => {
                if ck.spec.fingerprint() != self.spec.fingerprint() {
                    return Err(ModelError::SpecMismatch {
                        expected: self.spec.canonical(),
                        found: ck.spec.canonical(),
                    });
                }
                (
                    ck.network()?,
                    ck.restore_optimizer(),
                    ck.restore_rng(),
                    EarlyStopping::with_best(cfg.patience, ck.best_val_accuracy),
                    ck.epoch as usize + 1,
                    Some(ck),
                )
            }
            None => {
                let net = Network::init(&self.spec, cfg.seed)?;
                let opt = Optimizer::new(cfg.optimizer, cfg.learning_rate, net.params());
                (
                    net,
                    opt,
                    AugmentRng::with_stream(cfg.seed, TRAIN_STREAM),
                    EarlyStopping::new(cfg.patience),
                    1,
                    None,
                )
            }
        };

        let mut history = Vec::new();
        let mut stopped_early = false;
        for epoch in start..=cfg.max_epochs {
            let mut loss_sum = 0.0;
            let mut seen = 0usize;
            for (b, batch) in data.batches(&mut rng)?.enumerate() {
                let batch = batch?;
                if batch.is_empty() {
                    continue;
                }
                let (loss, grads) = net.loss_and_gradients(&batch.images, &batch.labels)?;
                if !loss.is_finite() || !grads.iter().all(|g| g.is_finite()) {
                    return Err(ModelError::NonFiniteLoss {
                        epoch,
                        batch: b,
                        loss,
                    });
                }
                opt.step(net.params_mut(), &grads);
                loss_sum += loss * batch.len() as f64;
                seen += batch.len();
            }
            if seen == 0 {
                return Err(ModelError::EmptyDataset);
            }
            let val_accuracy = validator.accuracy(&net)?;
            let decision = stopper.observe(val_accuracy);
            let record = EpochRecord {
                epoch,
                train_loss: loss_sum / seen as f64,
                val_accuracy,
                best_val_accuracy: stopper.best().unwrap_or(val_accuracy),
                patience_left: decision.patience_left,
                improved: decision.improved,
            };
            if decision.improved {
                let ck = Checkpoint::from_parts(
                    &net,
                    &opt,
                    epoch as u32,
                    val_accuracy,
                    &rng,
                    &self.classes,
                    self.normalization,
                );
                if let Some(path) = &self.checkpoint_path {
                    ck.save(path)?;
                }
                best = Some(ck);
            }
            history.push(record);
            if let Some(f) = self.on_epoch.as_mut() {
                f(&record);
            }
            if decision.stop {
                stopped_early = epoch < cfg.max_epochs;
                break;
            }
        }

        // A resumed run that never improves keeps the resumed state.
        let best = best.ok_or(ModelError::EmptyDataset)?;
        Ok(TrainOutcome {
            best,
            history,
            stopped_early,
        })
    }
}
