//! Metrics, the classification and entity-ranking protocols, and
//! fully-inductive benchmark generation by recombining splits.

mod metrics;
mod protocols;
mod recombine;
mod report;

pub use metrics::{auc_pr, pessimistic_rank, ClassificationResult, RankingResult};
pub use protocols::{
    classify, rank_entities, rank_with_scorer, score_prepared, Evaluator, Side, Sides, DEFAULT_NEGATIVES,
};
pub use recombine::{
    recombine, recombine_triples, write_recombined, RecombineStats, RecombinedBench, SplitStats, FULLY_DIR, SEMI_DIR,
    STATS_FILE, UNSEEN_FILE,
};
pub use report::{mean_std, Report};

use std::path::PathBuf;

use thiserror::Error;

use crate::kgstore::KgError;
use crate::rmpnet::ModelError;
use crate::trainlab::TrainError;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("no positive labels")]
    NoPositives,
    #[error("no ranking queries")]
    NoQueries,
    #[error("{scores} scores but {labels} labels")]
    LengthMismatch { scores: usize, labels: usize },
    #[error("score {0} is not finite")]
    NonFinite(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Graph(#[from] KgError),
    #[error(transparent)]
    Train(#[from] Box<TrainError>),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl EvalError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        EvalError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<TrainError> for EvalError {
    fn from(e: TrainError) -> Self {
        EvalError::Train(Box::new(e))
    }
}
