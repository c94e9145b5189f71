//! The relational message passing network.
//!
//! Features live on relation-view nodes (triple instances) and start from
//! the node's relation label. `layers - 1` attention layers update the
//! shrinking node sets of the pruned tree, a final unweighted layer produces
//! the target representation, and a linear scorer turns it into a score,
//! optionally fused with a one-hop aggregate over the disclosing
//! neighborhood.

mod config;
mod forward;
mod model;

pub use config::{FusionMode, InitMode, ModelConfig, Variant};
pub use forward::{prepare_triple, AttentionGroup, FeatureCache, ForwardTrace, LayerFeatures, PreparedTriple};
pub use model::{
    layer_param_name, FeatureSlot, Model, ParamIds, RelationBinding, DISCLOSING, EMBEDDING, FUSION, SCHEMA_INNER,
    SCHEMA_OUTER, SCORER,
};

use thiserror::Error;

use crate::kgstore::RelationId;
use crate::numkit::NumError;
use crate::subgraph::SubgraphError;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Subgraph(#[from] SubgraphError),
    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),
    #[error("schema init needs schema vectors")]
    SchemaRequired,
    #[error("no schema vector for relation {0:?}")]
    MissingSchemaVector(String),
    #[error("relation {0} is outside the bound vocabulary")]
    UnknownRelation(RelationId),
    #[error("layer {layer} needs a feature for node {node} that was not computed")]
    Schedule { layer: usize, node: usize },
}
