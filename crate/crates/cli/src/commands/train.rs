use std::io::Write;
use std::path::PathBuf;

use scene_core::dataset::{
    compute_normalization, materialize_augmented, Batches, MemorySource, NoAugment, SampleSource,
    SplitFile,
};
use scene_core::eval::evaluate;
use scene_core::model::{Checkpoint, EpochRecord, EvalSet, TrainOutcome, Trainer, TrainingSet};
use scene_core::rng::AugmentRng;

use super::{file_source, manifest_path, read_manifest};
use crate::{CliError, PipelineConfig};

/// Generator stream for ahead-of-time augmentation.
const MATERIALIZE_STREAM: u64 = 0x3A7E;

#[derive(Debug, Clone, Default)]
pub struct TrainArgs {
    pub manifest: Option<PathBuf>,
    pub split_file: PathBuf,
    pub checkpoint: PathBuf,
    pub seed: u64,
    pub max_epochs: Option<usize>,
    pub patience: Option<usize>,
    pub learning_rate: Option<f64>,
    pub batch_size: Option<usize>,
    pub resume: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct TrainSummary {
    pub history: Vec<EpochRecord>,
    pub best: Checkpoint,
    pub stopped_early: bool,
    /// Accuracy of the best checkpoint on the split's test part, if any.
    pub test_accuracy: Option<f64>,
}

impl TrainSummary {
    pub fn report_lines(&self) -> String {
        let mut s = format!(
            "best_epoch={}\nbest_val_accuracy={}\nepochs_run={}\nstopped_early={}\n",
            self.best.epoch,
            self.best.best_val_accuracy,
            self.history.len(),
            self.stopped_early
        );
        if let Some(a) = self.test_accuracy {
            s.push_str(&format!("test_accuracy={a}\n"));
        }
        s
    }
}

/// Trains on the split's train part, early-stopping on validation accuracy,
/// and writes the best checkpoint. One line per epoch goes to `log_out`.
pub fn cmd_train(
    cfg: &PipelineConfig,
    args: &TrainArgs,
    log_out: &mut dyn Write,
) -> Result<TrainSummary, CliError> {
    let manifest = manifest_path(cfg, args.manifest.as_deref())?;
    let (entries, classes) = read_manifest(&manifest)?;
    let split_text =
        std::fs::read_to_string(&args.split_file).map_err(CliError::io(&args.split_file))?;
    let split = SplitFile::parse(&split_text)
        .and_then(|f| f.resolve(&entries))
        .map_err(CliError::dataset(&args.split_file))?;
    let source = file_source(cfg, &manifest)?;

    let mut train_cfg = cfg.train_config(args.seed)?;
    if let Some(v) = args.max_epochs {
        train_cfg.max_epochs = v;
    }
    if let Some(v) = args.patience {
        train_cfg.patience = v;
    }
    if let Some(v) = args.learning_rate {
        train_cfg.learning_rate = v;
    }
    if let Some(v) = args.batch_size {
        train_cfg.batch_size = v;
    }
    if train_cfg.patience > train_cfg.max_epochs {
        log::warn!(
            "patience {} exceeds max epochs {}; capping it",
            train_cfg.patience,
            train_cfg.max_epochs
        );
        train_cfg.patience = train_cfg.max_epochs;
    }

    let images = split
        .train
        .iter()
        .map(|e| source.load_image(e))
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::dataset(&manifest))?;
    let stats = compute_normalization(images.iter()).map_err(CliError::dataset(&manifest))?;
    let (h, w) = (images[0].n_bins(), images[0].n_frames());
    drop(images);
    let spec = cfg.network_spec(h, w, classes.len());
    log::info!(
        "training {} ({} parameters) on {} images, validating on {}",
        spec.canonical(),
        spec.parameter_count(),
        split.train.len(),
        split.validation.len()
    );

    let mut augmenter = cfg.augmenter()?;
    let mut no_augment = NoAugment;
    let cache: Option<MemorySource> = if cfg.augment.materialize {
        let mut rng = AugmentRng::with_stream(args.seed, MATERIALIZE_STREAM);
        Some(
            materialize_augmented(&split.train, &source, &mut rng, &mut augmenter)
                .map_err(CliError::dataset(&manifest))?,
        )
    } else {
        None
    };
    let mut data = match &cache {
        Some(c) => TrainingSet {
            entries: &split.train,
            classes: &classes,
            batch_size: train_cfg.batch_size,
            stats,
            source: c,
            hook: &mut no_augment,
        },
        None => TrainingSet {
            entries: &split.train,
            classes: &classes,
            batch_size: train_cfg.batch_size,
            stats,
            source: &source,
            hook: &mut augmenter,
        },
    };
    let mut validator = EvalSet {
        entries: &split.validation,
        classes: &classes,
        batch_size: train_cfg.batch_size,
        stats,
        source: &source,
    };

    let mut trainer = Trainer::new(spec.clone(), train_cfg, classes.clone(), stats)
        .checkpoint_path(&args.checkpoint)
        .on_epoch(|r: &EpochRecord| {
            // Best effort: a closed log stream should not abort training.
            let _ = writeln!(log_out, "{r}");
            let _ = log_out.flush();
        });
    if let Some(path) = &args.resume {
        trainer = trainer.resume_from(Checkpoint::load(path, Some(&spec))?);
    }
    let TrainOutcome {
        best,
        history,
        stopped_early,
    } = trainer.run(&mut data, &mut validator)?;
    best.save(&args.checkpoint)?;

    let test_accuracy = if split.test.is_empty() {
        None
    } else {
        let batches: Batches =
            Batches::evaluation(&split.test, &classes, train_cfg.batch_size, stats, &source)
                .map_err(CliError::dataset(&manifest))?;
        Some(evaluate(&best, batches, &classes)?.report.overall_accuracy)
    };
    Ok(TrainSummary {
        history,
        best,
        stopped_early,
        test_accuracy,
    })
}
