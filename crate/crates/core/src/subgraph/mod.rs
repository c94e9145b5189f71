//! Subgraph machinery around a target triple: enclosing and disclosing
//! extraction, the relation-view (line graph) transform with six typed edge
//! patterns, and pruning to the target-rooted message-passing tree.

mod extract;
mod prune;
mod relview;

pub use extract::{extract_disclosing, extract_enclosing, ExtractOptions};
pub use prune::{
    disclosing_neighborhood_direct, disclosing_one_hop, prune_to_target, DisclosingNeighbor, DisclosingNeighborhood,
    PrunedNeighborhood,
};
pub use relview::{classify_pair, to_relation_view, EdgeType, RelationViewGraph, RelationViewOptions, TypedEdge};

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kgstore::{EntityId, KgError, Triple};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InstanceSource {
    /// The injected target edge.
    Target,
    /// Index of the instance in the parent graph's triple list.
    Graph(usize),
}

/// A triple occurrence; duplicates in the parent graph stay distinct.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TripleInstance {
    pub triple: Triple,
    pub source: InstanceSource,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubgraphKind {
    Enclosing,
    Disclosing,
}

/// Entity-view subgraph around `target`. `instances[0]` is the injected
/// target edge, the rest follow parent-graph order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntitySubgraph {
    pub entities: BTreeSet<EntityId>,
    pub instances: Vec<TripleInstance>,
    pub target: Triple,
    pub kind: SubgraphKind,
}

#[derive(Debug, Error)]
pub enum SubgraphError {
    #[error("unknown entity id {0}")]
    UnknownEntity(EntityId),
    #[error("hop count must be at least 1")]
    InvalidHop,
    #[error(transparent)]
    Graph(#[from] KgError),
}
