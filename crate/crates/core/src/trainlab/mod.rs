//! Training: negative sampling, margin loss, the Adam loop with
//! validation-based model selection, and checkpoints on disk.

mod cache;
mod checkpoint;
mod loop_;
mod sampling;

pub use cache::{SubgraphCache, CACHE_DIR_ENV};
pub use checkpoint::{Checkpoint, TensorEntry, CHECKPOINT_FORMAT, MANIFEST_FILE, PARAMS_FILE};
pub use loop_::{train, EpochRecord, TrainConfig, TrainOutcome, TrainSample};
pub use sampling::{derive_rng, margin_loss, sample_negative, NegativeSampler, RESAMPLE_LIMIT};

use std::path::PathBuf;

use thiserror::Error;

use crate::evalbench::EvalError;
use crate::kgstore::KgError;
use crate::numkit::NumError;
use crate::rmpnet::ModelError;
use crate::schema::SchemaError;

#[derive(Debug, Error)]
pub enum TrainError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Graph(#[from] KgError),
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{pos} positive scores but {neg} negative scores")]
    LengthMismatch { pos: usize, neg: usize },
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl TrainError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        TrainError::Io {
            path: path.into(),
            source,
        }
    }
}

#[cfg(test)]
mod tests;
