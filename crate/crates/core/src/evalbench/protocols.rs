use std::sync::Arc;

use rand::seq::IteratorRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::kgstore::{Benchmark, EntityId, KnowledgeGraph, Triple, Vocabulary};
use crate::rmpnet::{Model, ModelError, PreparedTriple, RelationBinding};
use crate::schema::SchemaVectors;
use crate::trainlab::{derive_rng, Checkpoint, NegativeSampler, SubgraphCache};

use super::{auc_pr, pessimistic_rank, ClassificationResult, EvalError, RankingResult};

/// Number of corrupted candidates per ranking query.
pub const DEFAULT_NEGATIVES: usize = 49;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Head,
    Tail,
}

/// Which sides every ranking query corrupts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sides {
    Both,
    Head,
    Tail,
}

impl Sides {
    pub fn list(self) -> &'static [Side] {
        match self {
            Sides::Both => &[Side::Head, Side::Tail],
            Sides::Head => &[Side::Head],
            Sides::Tail => &[Side::Tail],
        }
    }
}

/// Dropout-free scores of prepared triples, in input order.
pub fn score_prepared(
    model: &Model,
    binding: &RelationBinding,
    prepared: &[Arc<PreparedTriple>],
) -> Result<Vec<f64>, ModelError> {
    prepared.par_iter().map(|p| model.score(binding, p)).collect()
}

/// Draws up to `num_neg` distinct entities other than the truth on `side`,
/// then ranks the truth among them under `scorer` with pessimistic ties.
/// Returns `(rank, candidates drawn)`.
pub fn rank_with_scorer<F, R>(
    scorer: F,
    query: Triple,
    side: Side,
    entities: &[EntityId],
    num_neg: usize,
    rng: &mut R,
) -> Result<(usize, usize), EvalError>
where
    F: Fn(Triple) -> Result<f64, EvalError>,
    R: Rng + ?Sized,
{
    let truth_entity = match side {
        Side::Head => query.head,
        Side::Tail => query.tail,
    };
    let mut picked = entities
        .iter()
        .copied()
        .filter(|&e| e != truth_entity)
        .choose_multiple(rng, num_neg);
    picked.sort();
    picked.dedup();
    let truth = scorer(query)?;
    let scores = picked
        .iter()
        .map(|&e| {
            scorer(match side {
                Side::Head => Triple { head: e, ..query },
                Side::Tail => Triple { tail: e, ..query },
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((pessimistic_rank(truth, &scores), picked.len()))
}

/// Scores triples against one graph with a trained model.
pub struct Evaluator<'g> {
    model: &'g Model,
    binding: RelationBinding,
    cache: SubgraphCache<'g>,
    sampler: NegativeSampler,
}

impl<'g> Evaluator<'g> {
    /// `entities` is the pool negatives and ranking candidates come from.
    pub fn new(
        checkpoint: &'g Checkpoint,
        vocab: &Vocabulary,
        graph: &'g KnowledgeGraph,
        entities: Vec<EntityId>,
        schema: Option<&SchemaVectors>,
    ) -> Result<Self, EvalError> {
        let model = &checkpoint.model;
        let binding = model.bind(vocab, schema, checkpoint.unseen_seed)?;
        Ok(Self {
            model,
            binding,
            cache: SubgraphCache::from_env(graph, &model.config)?,
            sampler: NegativeSampler::new(entities),
        })
    }

    /// Evaluator over the test graph of `bench`.
    pub fn for_test(
        checkpoint: &'g Checkpoint,
        bench: &'g Benchmark,
        schema: Option<&SchemaVectors>,
    ) -> Result<Self, EvalError> {
        Self::new(
            checkpoint,
            &bench.vocab,
            &bench.test_graph,
            bench.test_entities(),
            schema,
        )
    }

    pub fn score(&self, triple: Triple) -> Result<f64, EvalError> {
        let prepared = self.cache.get(triple)?;
        Ok(self.model.score(&self.binding, &prepared)?)
    }

    /// Pairs every target with one sampled negative and reports AUC-PR over
    /// the pooled scores (positive, negative, positive, ...).
    pub fn classify(&self, targets: &[Triple], seed: u64) -> Result<ClassificationResult, EvalError> {
        let graph = self.cache.graph();
        let mut rng = derive_rng(seed, &[0]);
        let mut triples = Vec::with_capacity(2 * targets.len());
        let mut labels = Vec::with_capacity(2 * targets.len());
        for &t in targets {
            triples.push(t);
            labels.push(true);
            triples.push(self.sampler.sample(t, graph, &mut rng));
            labels.push(false);
        }
        let scores = triples
            .par_iter()
            .map(|&t| self.score(t))
            .collect::<Result<Vec<_>, _>>()?;
        self.cache.flush()?;
        Ok(ClassificationResult {
            auc_pr: auc_pr(&scores, &labels)?,
            scores,
            labels,
        })
    }

    /// Rank of `query` against `num_neg` corruptions of `side`.
    pub fn rank(&self, query: Triple, side: Side, num_neg: usize, seed: u64) -> Result<(usize, usize), EvalError> {
        let mut rng = derive_rng(seed, &[1, query_key(query), side as u64]);
        rank_with_scorer(
            |t| self.score(t),
            query,
            side,
            self.sampler.entities(),
            num_neg,
            &mut rng,
        )
    }

    /// Ranks every query on the requested sides; MRR and Hits@n average
    /// over all (query, side) pairs.
    pub fn rank_all(
        &self,
        queries: &[Triple],
        sides: Sides,
        num_neg: usize,
        hits_at: &[usize],
        seed: u64,
    ) -> Result<RankingResult, EvalError> {
        let jobs: Vec<(Triple, Side)> = queries
            .iter()
            .flat_map(|&q| sides.list().iter().map(move |&s| (q, s)))
            .collect();
        let out = jobs
            .par_iter()
            .map(|&(q, s)| self.rank(q, s, num_neg, seed))
            .collect::<Result<Vec<_>, _>>()?;
        self.cache.flush()?;
        let (ranks, candidates) = out.into_iter().unzip();
        RankingResult::from_ranks(ranks, candidates, hits_at)
    }
}

fn query_key(t: Triple) -> u64 {
    let mut k = t.head.0 as u64;
    k = k.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ t.relation.0 as u64;
    k = k.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ t.tail.0 as u64;
    k
}

/// Triple classification of `targets` on `graph`.
pub fn classify(
    checkpoint: &Checkpoint,
    vocab: &Vocabulary,
    graph: &KnowledgeGraph,
    targets: &[Triple],
    seed: u64,
    schema: Option<&SchemaVectors>,
) -> Result<ClassificationResult, EvalError> {
    let mut pool = graph.entities();
    pool.extend(targets.iter().flat_map(|t| [t.head, t.tail]));
    pool.sort();
    pool.dedup();
    Evaluator::new(checkpoint, vocab, graph, pool, schema)?.classify(targets, seed)
}

/// Rank of one query on `graph`, candidates drawn from the graph's entities.
#[allow(clippy::too_many_arguments)]
pub fn rank_entities(
    checkpoint: &Checkpoint,
    vocab: &Vocabulary,
    graph: &KnowledgeGraph,
    query: Triple,
    side: Side,
    num_neg: usize,
    seed: u64,
    schema: Option<&SchemaVectors>,
) -> Result<(usize, usize), EvalError> {
    let mut pool = graph.entities();
    pool.extend([query.head, query.tail]);
    pool.sort();
    pool.dedup();
    Evaluator::new(checkpoint, vocab, graph, pool, schema)?.rank(query, side, num_neg, seed)
}
