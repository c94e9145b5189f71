use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use crate::kgstore::{KnowledgeGraph, RelationId, Triple};

use super::relview::{RelationViewGraph, TypedEdge};
use super::{InstanceSource, SubgraphError, TripleInstance};

/// Target-rooted message-passing tree over a relation-view graph.
///
/// `frontiers[k]` is the set of nodes with a typed edge into
/// `frontiers[k - 1]`; `frontiers[0]` is the target alone. A node may sit in
/// several frontiers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrunedNeighborhood {
    pub target: usize,
    pub frontiers: Vec<Vec<usize>>,
    /// Edges whose destination is in `frontiers[0..depth]`, sorted by
    /// `(dst, kind, src)`.
    pub edges: Vec<TypedEdge>,
}

impl PrunedNeighborhood {
    pub fn depth(&self) -> usize {
        self.frontiers.len() - 1
    }

    /// Union of `frontiers[0..=m]`, ascending.
    pub fn within(&self, m: usize) -> Vec<usize> {
        let set: BTreeSet<usize> = self.frontiers[..=m.min(self.depth())]
            .iter()
            .flatten()
            .copied()
            .collect();
        set.into_iter().collect()
    }

    /// Incoming edges of `dst` kept in the tree.
    pub fn incoming(&self, dst: usize) -> &[TypedEdge] {
        let start = self.edges.partition_point(|e| e.dst < dst);
        let end = self.edges.partition_point(|e| e.dst <= dst);
        &self.edges[start..end]
    }
}

pub fn prune_to_target(rvg: &RelationViewGraph, depth: usize) -> PrunedNeighborhood {
    let incoming = rvg.incoming();
    let mut frontiers = vec![vec![rvg.target]];
    for _ in 0..depth {
        let prev = frontiers.last().expect("non-empty");
        let next: BTreeSet<usize> = prev
            .iter()
            .flat_map(|&i| incoming[i].iter().map(|&(src, _)| src))
            .collect();
        frontiers.push(next.into_iter().collect());
    }
    let inner: HashSet<usize> = frontiers[..depth].iter().flatten().copied().collect();
    let mut edges: Vec<TypedEdge> = rvg.edges.iter().filter(|e| inner.contains(&e.dst)).copied().collect();
    edges.sort_unstable_by_key(|e| (e.dst, e.kind, e.src));
    PrunedNeighborhood {
        target: rvg.target,
        frontiers,
        edges,
    }
}

/// One-hop incoming neighbors of the target in a disclosing relation-view
/// graph, each with its relation label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisclosingNeighborhood {
    pub target_relation: RelationId,
    pub neighbors: Vec<DisclosingNeighbor>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisclosingNeighbor {
    pub instance: TripleInstance,
    pub relation: RelationId,
}

pub fn disclosing_one_hop(rvg: &RelationViewGraph) -> DisclosingNeighborhood {
    let srcs: BTreeSet<usize> = rvg
        .edges
        .iter()
        .filter(|e| e.dst == rvg.target)
        .map(|e| e.src)
        .collect();
    DisclosingNeighborhood {
        target_relation: rvg.target_relation(),
        neighbors: srcs
            .into_iter()
            .map(|i| DisclosingNeighbor {
                instance: rvg.nodes[i],
                relation: rvg.label(i),
            })
            .collect(),
    }
}

/// Same neighborhood as extracting the disclosing subgraph and calling
/// [`disclosing_one_hop`], read straight off the triples touching either
/// target endpoint. Neighbors come out in graph-triple order.
pub fn disclosing_neighborhood_direct(
    graph: &KnowledgeGraph,
    target: Triple,
    exclude_target_fact: bool,
) -> Result<DisclosingNeighborhood, SubgraphError> {
    for e in [target.head, target.tail] {
        if !graph.has_entity(e) {
            return Err(SubgraphError::UnknownEntity(e));
        }
    }
    let mut found: BTreeMap<usize, Triple> = BTreeMap::new();
    for e in [target.head, target.tail] {
        for (_, idx) in graph.incident(e) {
            let t = graph.triple(idx);
            if exclude_target_fact && t == target {
                continue;
            }
            found.insert(idx, t);
        }
    }
    Ok(DisclosingNeighborhood {
        target_relation: target.relation,
        neighbors: found
            .into_iter()
            .map(|(idx, triple)| DisclosingNeighbor {
                instance: TripleInstance {
                    triple,
                    source: InstanceSource::Graph(idx),
                },
                relation: triple.relation,
            })
            .collect(),
    })
}
