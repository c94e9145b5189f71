//! Integer-coded knowledge graphs: vocabularies, adjacency-indexed triple
//! stores, benchmark directory ingestion, and K-hop neighborhood queries.

mod graph;
mod io;
mod vocab;

pub use graph::KnowledgeGraph;
pub use io::{
    load_benchmark, name_triples, read_triple_file, write_benchmark, write_triple_file, Benchmark, NamedTriple,
    TEST_FILE, TEST_GRAPH_FILE, TRAIN_FILE, VALID_FILE,
};
pub use vocab::Vocabulary;

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense entity index into a [`Vocabulary`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EntityId(pub usize);

/// Dense relation index into a [`Vocabulary`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelationId(pub usize);

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

impl fmt::Display for RelationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triple {
    pub head: EntityId,
    pub relation: RelationId,
    pub tail: EntityId,
}

impl Triple {
    pub fn new(head: usize, relation: usize, tail: usize) -> Self {
        Self {
            head: EntityId(head),
            relation: RelationId(relation),
            tail: EntityId(tail),
        }
    }
}

#[derive(Debug, Error)]
pub enum KgError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: expected `head<TAB>relation<TAB>tail`, got {content:?}")]
    Malformed {
        path: PathBuf,
        line: usize,
        content: String,
    },
    #[error("training file {0} contains no triples")]
    EmptyTraining(PathBuf),
    #[error("unknown entity id {0}")]
    UnknownEntity(EntityId),
    #[error("unknown relation id {0}")]
    UnknownRelation(RelationId),
    #[error("unknown entity name {0:?}")]
    UnknownEntityName(String),
    #[error("unknown relation name {0:?}")]
    UnknownRelationName(String),
    #[error("hop count must be at least 1")]
    InvalidHop,
}
