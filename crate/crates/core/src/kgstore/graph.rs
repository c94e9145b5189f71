use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use super::{EntityId, KgError, RelationId, Triple};

/// Immutable triple store with per-entity in/out adjacency.
///
/// Adjacency entries carry the index of the triple instance they came from,
/// so duplicate facts stay distinguishable.
#[derive(Clone, Debug, Default)]
pub struct KnowledgeGraph {
    triples: Vec<Triple>,
    out_adj: Vec<Vec<(RelationId, EntityId, usize)>>,
    in_adj: Vec<Vec<(RelationId, EntityId, usize)>>,
    facts: HashSet<Triple>,
}

impl KnowledgeGraph {
    /// Builds a graph over an id space of `num_entities` entities.
    pub fn new(num_entities: usize, triples: Vec<Triple>) -> Result<Self, KgError> {
        let mut out_adj = vec![Vec::new(); num_entities];
        let mut in_adj = vec![Vec::new(); num_entities];
        for (idx, t) in triples.iter().enumerate() {
            for e in [t.head, t.tail] {
                if e.0 >= num_entities {
                    return Err(KgError::UnknownEntity(e));
                }
            }
            out_adj[t.head.0].push((t.relation, t.tail, idx));
            in_adj[t.tail.0].push((t.relation, t.head, idx));
        }
        let facts = triples.iter().copied().collect();
        Ok(Self {
            triples,
            out_adj,
            in_adj,
            facts,
        })
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn triple(&self, index: usize) -> Triple {
        self.triples[index]
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Size of the entity id space, not the number of entities with edges.
    pub fn id_space(&self) -> usize {
        self.out_adj.len()
    }

    pub fn out_edges(&self, entity: EntityId) -> &[(RelationId, EntityId, usize)] {
        &self.out_adj[entity.0]
    }

    pub fn in_edges(&self, entity: EntityId) -> &[(RelationId, EntityId, usize)] {
        &self.in_adj[entity.0]
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.facts.contains(triple)
    }

    pub fn has_entity(&self, entity: EntityId) -> bool {
        entity.0 < self.out_adj.len()
    }

    /// Entities incident to at least one triple, ascending.
    pub fn entities(&self) -> Vec<EntityId> {
        (0..self.out_adj.len())
            .filter(|&e| !self.out_adj[e].is_empty() || !self.in_adj[e].is_empty())
            .map(EntityId)
            .collect()
    }

    pub fn relations(&self) -> BTreeSet<RelationId> {
        self.triples.iter().map(|t| t.relation).collect()
    }

    /// Undirected neighbors with the triple index of each connecting edge.
    pub fn incident(&self, entity: EntityId) -> impl Iterator<Item = (EntityId, usize)> + '_ {
        self.out_adj[entity.0]
            .iter()
            .map(|&(_, t, i)| (t, i))
            .chain(self.in_adj[entity.0].iter().map(|&(_, h, i)| (h, i)))
    }

    /// Shortest undirected hop distance from `center` to every entity within
    /// `max_hops`, the center included at distance 0.
    pub fn khop_neighbors(&self, center: EntityId, max_hops: usize) -> Result<BTreeMap<EntityId, usize>, KgError> {
        if !self.has_entity(center) {
            return Err(KgError::UnknownEntity(center));
        }
        if max_hops == 0 {
            return Err(KgError::InvalidHop);
        }
        let mut dist = BTreeMap::new();
        dist.insert(center, 0);
        let mut queue = VecDeque::from([center]);
        while let Some(e) = queue.pop_front() {
            let d = dist[&e];
            if d == max_hops {
                continue;
            }
            for (n, _) in self.incident(e) {
                if let Entry::Vacant(slot) = dist.entry(n) {
                    slot.insert(d + 1);
                    queue.push_back(n);
                }
            }
        }
        Ok(dist)
    }
}
