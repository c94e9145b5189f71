//! Relation-view subgraph reasoning for inductive knowledge graph completion.
//!
//! Triples around a target are pulled out of the graph as enclosing and
//! disclosing subgraphs, turned into relation-view graphs whose nodes are
//! triple instances, and scored by a relational message passing network that
//! never looks at entity features. Unseen relations are handled by the same
//! message passing layers, optionally seeded by schema-derived vectors.

pub mod evalbench;
pub mod kgstore;
pub mod numkit;
pub mod rmpnet;
pub mod schema;
pub mod subgraph;
pub mod trainlab;

#[cfg(test)]
pub(crate) mod testutil;
