use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{EntityId, KgError, RelationId};

/// Name↔id maps for entities and relations, plus a per-relation flag telling
/// whether the relation occurs in the training graph.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    entities: Vec<String>,
    relations: Vec<String>,
    seen: Vec<bool>,
    #[serde(skip)]
    entity_index: HashMap<String, EntityId>,
    #[serde(skip)]
    relation_index: HashMap<String, RelationId>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id of `name`, assigning the next dense id if new.
    pub fn intern_entity(&mut self, name: &str) -> EntityId {
        if let Some(id) = self.entity_index.get(name) {
            return *id;
        }
        let id = EntityId(self.entities.len());
        self.entities.push(name.to_owned());
        self.entity_index.insert(name.to_owned(), id);
        id
    }

    /// New relations start out unseen.
    pub fn intern_relation(&mut self, name: &str) -> RelationId {
        if let Some(id) = self.relation_index.get(name) {
            return *id;
        }
        let id = RelationId(self.relations.len());
        self.relations.push(name.to_owned());
        self.seen.push(false);
        self.relation_index.insert(name.to_owned(), id);
        id
    }

    pub fn mark_seen(&mut self, relation: RelationId) {
        self.seen[relation.0] = true;
    }

    pub fn entity_id(&self, name: &str) -> Option<EntityId> {
        self.entity_index.get(name).copied()
    }

    pub fn relation_id(&self, name: &str) -> Option<RelationId> {
        self.relation_index.get(name).copied()
    }

    pub fn entity_name(&self, id: EntityId) -> Result<&str, KgError> {
        self.entities
            .get(id.0)
            .map(String::as_str)
            .ok_or(KgError::UnknownEntity(id))
    }

    pub fn relation_name(&self, id: RelationId) -> Result<&str, KgError> {
        self.relations
            .get(id.0)
            .map(String::as_str)
            .ok_or(KgError::UnknownRelation(id))
    }

    pub fn is_seen(&self, relation: RelationId) -> bool {
        self.seen.get(relation.0).copied().unwrap_or(false)
    }

    pub fn num_entities(&self) -> usize {
        self.entities.len()
    }

    pub fn num_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn relation_names(&self) -> &[String] {
        &self.relations
    }

    pub fn seen_relations(&self) -> Vec<RelationId> {
        (0..self.relations.len())
            .filter(|&i| self.seen[i])
            .map(RelationId)
            .collect()
    }

    pub fn unseen_relations(&self) -> Vec<RelationId> {
        (0..self.relations.len())
            .filter(|&i| !self.seen[i])
            .map(RelationId)
            .collect()
    }

    /// Content digest over entity names, relation names and seen flags.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        for e in &self.entities {
            hasher.update(b"E");
            hasher.update(e.as_bytes());
            hasher.update([0u8]);
        }
        for (r, seen) in self.relations.iter().zip(&self.seen) {
            hasher.update(if *seen { b"S" } else { b"U" });
            hasher.update(r.as_bytes());
            hasher.update([0u8]);
        }
        format!("{:x}", hasher.finalize())
    }

    /// Rebuilds the name indexes after deserialization.
    pub fn reindex(&mut self) {
        self.entity_index = self
            .entities
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), EntityId(i)))
            .collect();
        self.relation_index = self
            .relations
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), RelationId(i)))
            .collect();
    }
}
