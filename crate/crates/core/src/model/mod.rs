//! Convolutional classifier: architecture, gradients, training and
//! checkpoints.

mod checkpoint;
mod network;
mod optim;
mod predict;
mod spec;
mod tensor;
mod train;

pub use checkpoint::{Checkpoint, FORMAT_VERSION, MAGIC};
pub use network::{argmax, cross_entropy, softmax, ForwardOutput, Network, PROB_FLOOR};
pub use optim::{Optimizer, OptimizerKind};
pub use predict::predict;
pub use spec::{NetworkSpec, KERNEL};
pub use tensor::Tensor;
pub use train::{
    accuracy, EarlyStopping, EpochRecord, EpochSource, EvalSet, StopDecision, TrainConfig,
    TrainOutcome, Trainer, TrainingSet, Validator,
};

use thiserror::Error;

use crate::dataset::DatasetError;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid network spec: {0}")]
    InvalidSpec(String),
    #[error("invalid training config: {0}")]
    InvalidConfig(String),
    #[error("parameter shape error: {0}")]
    ParameterShape(String),
    #[error("input of {actual} values does not match shape {expected:?}")]
    ShapeMismatch { expected: Vec<usize>, actual: usize },
    #[error("label {label} is out of range for {n_classes} classes")]
    InvalidLabel { label: usize, n_classes: usize },
    #[error("non-finite loss {loss} at epoch {epoch}, batch {batch}")]
    NonFiniteLoss {
        epoch: usize,
        batch: usize,
        loss: f64,
    },
    #[error("no samples to train or score")]
    EmptyDataset,
    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),
    #[error("checkpoint was built for `{found}`, expected `{expected}`")]
    SpecMismatch { expected: String, found: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}
