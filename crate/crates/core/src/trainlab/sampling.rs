use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::kgstore::{EntityId, KnowledgeGraph, Triple};

use super::TrainError;

/// Draws after the first that try to dodge a known triple.
pub const RESAMPLE_LIMIT: usize = 5;

/// Stream of its own for every `(seed, tags)` combination.
pub fn derive_rng(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    for t in tags {
        h.update(t.to_le_bytes());
    }
    let digest = h.finalize();
    let mut key = [0u8; 32];
    key.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(key)
}

/// Corrupts head or tail of positives with entities from a fixed pool.
#[derive(Clone, Debug)]
pub struct NegativeSampler {
    entities: Vec<EntityId>,
    /// Resample (up to [`RESAMPLE_LIMIT`] times) when the draw is a triple
    /// already in the graph.
    pub avoid_known: bool,
}

impl NegativeSampler {
    pub fn new(mut entities: Vec<EntityId>) -> Self {
        entities.sort();
        entities.dedup();
        Self {
            entities,
            avoid_known: true,
        }
    }

    pub fn entities(&self) -> &[EntityId] {
        &self.entities
    }

    /// Uniform entity other than `exclude`; `None` when the pool has none.
    fn draw_other<R: Rng + ?Sized>(&self, exclude: EntityId, rng: &mut R) -> Option<EntityId> {
        match self.entities.binary_search(&exclude) {
            Ok(p) => {
                if self.entities.len() < 2 {
                    return None;
                }
                let k = rng.gen_range(0..self.entities.len() - 1);
                Some(self.entities[if k >= p { k + 1 } else { k }])
            }
            Err(_) => self.entities.choose(rng).copied(),
        }
    }

    /// Replaces head or tail (fair coin) with a different pool entity.
    pub fn sample<R: Rng + ?Sized>(&self, pos: Triple, graph: &KnowledgeGraph, rng: &mut R) -> Triple {
        let corrupt_head = rng.gen_bool(0.5);
        let draw = |rng: &mut R| {
            if corrupt_head {
                self.draw_other(pos.head, rng).map(|e| Triple { head: e, ..pos })
            } else {
                self.draw_other(pos.tail, rng).map(|e| Triple { tail: e, ..pos })
            }
        };
        let Some(mut cand) = draw(rng) else {
            return pos;
        };
        if self.avoid_known {
            for _ in 0..RESAMPLE_LIMIT {
                if !graph.contains(&cand) {
                    break;
                }
                cand = draw(rng).unwrap_or(cand);
            }
        }
        cand
    }
}

/// Samples a negative for `pos` over the entities of `graph`.
pub fn sample_negative<R: Rng + ?Sized>(pos: Triple, graph: &KnowledgeGraph, rng: &mut R) -> Triple {
    NegativeSampler::new(graph.entities()).sample(pos, graph, rng)
}

/// `Σ max(0, neg_i − pos_i + γ)`.
pub fn margin_loss(pos: &[f64], neg: &[f64], margin: f64) -> Result<f64, TrainError> {
    if pos.len() != neg.len() {
        return Err(TrainError::LengthMismatch {
            pos: pos.len(),
            neg: neg.len(),
        });
    }
    Ok(pos.iter().zip(neg).map(|(p, n)| (n - p + margin).max(0.0)).sum())
}
