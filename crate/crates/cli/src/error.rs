use thiserror::Error;

use scene_core::audio::AudioError;
use scene_core::dataset::DatasetError;
use scene_core::dsp::DspError;
use scene_core::eval::EvalError;
use scene_core::model::ModelError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config field `{field}`: {message}")]
    Config { field: String, message: String },
    #[error("`{field}` points to {path}, which does not exist")]
    MissingPath { field: String, path: String },
    #[error("--seed is required for `{0}`")]
    MissingSeed(&'static str),
    #[error("no manifest given; pass --manifest or set paths.manifest")]
    MissingManifest,
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: {source}")]
    Dataset {
        file: String,
        #[source]
        source: DatasetError,
    },
    #[error("{file}: {source}")]
    Audio {
        file: String,
        #[source]
        source: AudioError,
    },
    #[error(transparent)]
    Dsp(#[from] DspError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{failed} of {total} files failed to convert")]
    ConvertFailures { failed: usize, total: usize },
    #[error("internal error: {0}")]
    Internal(String),
}

impl From<DatasetError> for CliError {
    fn from(source: DatasetError) -> Self {
        Self::Dataset {
            file: "dataset".into(),
            source,
        }
    }
}

impl CliError {
    /// 1 for expected failures (bad input, validation), 2 for internal
    /// errors and diverged training.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Model(ModelError::NonFiniteLoss { .. }) | Self::Internal(_) => 2,
            Self::Eval(EvalError::Model(ModelError::NonFiniteLoss { .. })) => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> Self + '_ {
        move |source| Self::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub(crate) fn dataset(file: &std::path::Path) -> impl FnOnce(DatasetError) -> Self + '_ {
        move |source| Self::Dataset {
            file: file.display().to_string(),
            source,
        }
    }
}
