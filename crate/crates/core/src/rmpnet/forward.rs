use std::collections::HashMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::kgstore::{KnowledgeGraph, RelationId, Triple};
use crate::numkit::{Tape, Var};
use crate::subgraph::{
    disclosing_neighborhood_direct, extract_enclosing, prune_to_target, to_relation_view, DisclosingNeighborhood,
    EdgeType, ExtractOptions, PrunedNeighborhood, RelationViewGraph, RelationViewOptions,
};

use super::model::{FeatureSlot, Model, RelationBinding};
use super::{FusionMode, ModelConfig, ModelError};

/// Everything the forward pass needs for one triple: node labels of the
/// enclosing relation-view graph, its pruned tree, and (NE only) the
/// disclosing neighborhood.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreparedTriple {
    pub triple: Triple,
    pub labels: Vec<RelationId>,
    pub pruned: PrunedNeighborhood,
    pub disclosing: Option<DisclosingNeighborhood>,
}

impl PreparedTriple {
    pub fn from_parts(
        triple: Triple,
        rvg: &RelationViewGraph,
        depth: usize,
        disclosing: Option<DisclosingNeighborhood>,
    ) -> Self {
        Self {
            triple,
            labels: rvg.nodes.iter().map(|n| n.triple.relation).collect(),
            pruned: prune_to_target(rvg, depth),
            disclosing,
        }
    }

    /// True when the enclosing subgraph has no edge besides the target.
    pub fn is_empty_enclosing(&self) -> bool {
        self.labels.len() == 1
    }
}

/// Extracts, transforms and prunes the subgraphs of `triple` in `graph`.
pub fn prepare_triple(
    graph: &KnowledgeGraph,
    triple: Triple,
    config: &ModelConfig,
) -> Result<PreparedTriple, ModelError> {
    let extract = ExtractOptions {
        exclude_target_fact: config.exclude_target_fact,
    };
    let relview = RelationViewOptions {
        suppress_basic: config.suppress_basic_edges,
    };
    let sub = extract_enclosing(graph, triple, config.hop, extract)?;
    let rvg = to_relation_view(&sub, relview);
    let disclosing = if config.variant.disclosing() {
        Some(disclosing_neighborhood_direct(
            graph,
            triple,
            config.exclude_target_fact,
        )?)
    } else {
        None
    };
    Ok(PreparedTriple::from_parts(triple, &rvg, config.layers, disclosing))
}

/// Attention weights recorded during a forward pass, one entry per
/// `(layer, aggregating node, edge type)` group.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ForwardTrace {
    pub attention: Vec<AttentionGroup>,
    pub disclosing_attention: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttentionGroup {
    pub layer: usize,
    pub node: usize,
    pub edge: EdgeType,
    pub weights: Vec<f64>,
}

/// Per-forward lookup cache so nodes sharing a label share one feature.
pub struct FeatureCache {
    initial: HashMap<RelationId, Var>,
    disclosed: HashMap<RelationId, Var>,
}

impl FeatureCache {
    pub fn new() -> Self {
        Self {
            initial: HashMap::new(),
            disclosed: HashMap::new(),
        }
    }
}

impl Default for FeatureCache {
    fn default() -> Self {
        Self::new()
    }
}

/// Per-node features of one layer; `None` where the schedule did not
/// compute the node.
pub type LayerFeatures = Vec<Option<Var>>;

impl Model {
    /// Initial feature `h⁰` of a relation label.
    pub fn initial_feature(
        &self,
        tape: &mut Tape,
        binding: &RelationBinding,
        cache: &mut FeatureCache,
        relation: RelationId,
    ) -> Result<Var, ModelError> {
        if let Some(v) = cache.initial.get(&relation) {
            return Ok(*v);
        }
        let v = match binding.slot(relation)? {
            FeatureSlot::Row(row) => {
                let table = self
                    .ids
                    .embedding
                    .ok_or_else(|| ModelError::InvalidConfig("binding refers to an embedding table".into()))?;
                tape.row(table, *row)?
            }
            FeatureSlot::Fixed(vec) => {
                if vec.len() != self.config.dim {
                    return Err(ModelError::InvalidConfig(format!(
                        "fixed feature width {} differs from dim {}",
                        vec.len(),
                        self.config.dim
                    )));
                }
                tape.input(vec.clone())?
            }
            FeatureSlot::Projected(vec) => {
                let (outer, inner) = self
                    .ids
                    .schema_outer
                    .zip(self.ids.schema_inner)
                    .ok_or(ModelError::SchemaRequired)?;
                let onto = tape.input(vec.clone())?;
                let hidden = tape.matvec(inner, onto)?;
                tape.matvec(outer, hidden)?
            }
        };
        cache.initial.insert(relation, v);
        Ok(v)
    }

    /// `h⁰` for every node of the pruned tree.
    pub fn initial_features(
        &self,
        tape: &mut Tape,
        binding: &RelationBinding,
        cache: &mut FeatureCache,
        input: &PreparedTriple,
    ) -> Result<LayerFeatures, ModelError> {
        let mut h = vec![None; input.labels.len()];
        for node in input.pruned.within(input.pruned.depth()) {
            h[node] = Some(self.initial_feature(tape, binding, cache, input.labels[node])?);
        }
        Ok(h)
    }

    /// Layer `k` (1-based, `k < depth`): updates every node within
    /// `depth - k` hops of the target with attention-weighted, per-edge-type
    /// transformed messages plus a residual.
    #[allow(clippy::too_many_arguments)]
    pub fn message_layer<R: Rng + ?Sized>(
        &self,
        tape: &mut Tape,
        pruned: &PrunedNeighborhood,
        prev: &LayerFeatures,
        k: usize,
        mut dropout: Option<&mut R>,
        mut trace: Option<&mut ForwardTrace>,
    ) -> Result<LayerFeatures, ModelError> {
        let depth = pruned.depth();
        if k == 0 || k >= depth {
            return Err(ModelError::Schedule {
                layer: k,
                node: pruned.target,
            });
        }
        let weights = &self.ids.layers[k - 1];
        let target_feature = prev[pruned.target].ok_or(ModelError::Schedule {
            layer: k,
            node: pruned.target,
        })?;
        let mut next = vec![None; prev.len()];
        for node in pruned.within(depth - k) {
            let own = prev[node].ok_or(ModelError::Schedule { layer: k, node })?;
            let groups = self.grouped_incoming(pruned, node, dropout.as_deref_mut());
            let mut messages = Vec::new();
            for (edge, srcs) in groups {
                let mut feats = Vec::with_capacity(srcs.len());
                for src in &srcs {
                    feats.push(prev[*src].ok_or(ModelError::Schedule { layer: k, node: *src })?);
                }
                let pooled = if self.config.variant.target_attention() {
                    let mut logits = Vec::with_capacity(feats.len());
                    for f in &feats {
                        let sim = tape.dot(target_feature, *f)?;
                        logits.push(tape.leaky_relu(sim, self.config.leaky_slope)?);
                    }
                    let stacked = tape.stack(&logits)?;
                    let alpha = tape.softmax(stacked)?;
                    if let Some(t) = trace.as_deref_mut() {
                        t.attention.push(AttentionGroup {
                            layer: k,
                            node,
                            edge,
                            weights: tape.value(alpha).to_vec(),
                        });
                    }
                    let mut scaled = Vec::with_capacity(feats.len());
                    for (i, f) in feats.iter().enumerate() {
                        let a = tape.index(alpha, i)?;
                        scaled.push(tape.scale(*f, a)?);
                    }
                    tape.sum(&scaled)?
                } else {
                    tape.sum(&feats)?
                };
                messages.push(tape.matvec(weights[edge.index()], pooled)?);
            }
            next[node] = Some(if messages.is_empty() {
                own
            } else {
                let total = tape.sum(&messages)?;
                let aggregated = tape.relu(total)?;
                tape.add(aggregated, own)?
            });
        }
        Ok(next)
    }

    /// Last layer: equal (unweighted) aggregation into the target only.
    pub fn final_layer<R: Rng + ?Sized>(
        &self,
        tape: &mut Tape,
        pruned: &PrunedNeighborhood,
        prev: &LayerFeatures,
        dropout: Option<&mut R>,
    ) -> Result<Var, ModelError> {
        let k = pruned.depth();
        let weights = &self.ids.layers[k - 1];
        let own = prev[pruned.target].ok_or(ModelError::Schedule {
            layer: k,
            node: pruned.target,
        })?;
        let mut messages = Vec::new();
        for (edge, srcs) in self.grouped_incoming(pruned, pruned.target, dropout) {
            let mut feats = Vec::with_capacity(srcs.len());
            for src in &srcs {
                feats.push(prev[*src].ok_or(ModelError::Schedule { layer: k, node: *src })?);
            }
            let pooled = tape.sum(&feats)?;
            messages.push(tape.matvec(weights[edge.index()], pooled)?);
        }
        if messages.is_empty() {
            return Ok(own);
        }
        let total = tape.sum(&messages)?;
        let aggregated = tape.relu(total)?;
        Ok(tape.add(aggregated, own)?)
    }

    /// Incoming sources of `node` grouped by edge type, after edge dropout.
    fn grouped_incoming<R: Rng + ?Sized>(
        &self,
        pruned: &PrunedNeighborhood,
        node: usize,
        mut dropout: Option<&mut R>,
    ) -> Vec<(EdgeType, Vec<usize>)> {
        let rate = self.config.edge_dropout;
        let mut groups: Vec<(EdgeType, Vec<usize>)> = Vec::new();
        for e in pruned.incoming(node) {
            if let Some(rng) = dropout.as_deref_mut() {
                if rate > 0.0 && rng.gen::<f64>() < rate {
                    continue;
                }
            }
            match groups.last_mut() {
                Some((kind, srcs)) if *kind == e.kind => srcs.push(e.src),
                _ => groups.push((e.kind, vec![e.src])),
            }
        }
        groups
    }

    /// Attention-weighted one-hop aggregation over the disclosing
    /// neighborhood; zero vector when it is empty.
    pub fn disclosing_aggregate(
        &self,
        tape: &mut Tape,
        binding: &RelationBinding,
        cache: &mut FeatureCache,
        hood: &DisclosingNeighborhood,
        trace: Option<&mut ForwardTrace>,
    ) -> Result<Var, ModelError> {
        let w = self
            .ids
            .disclosing
            .ok_or_else(|| ModelError::InvalidConfig("variant has no disclosing transform".into()))?;
        if hood.neighbors.is_empty() {
            return Ok(tape.input(vec![0.0; self.config.dim])?);
        }
        let transformed = |tape: &mut Tape, cache: &mut FeatureCache, rel: RelationId| {
            if let Some(v) = cache.disclosed.get(&rel) {
                return Ok::<Var, ModelError>(*v);
            }
            let h0 = self.initial_feature(tape, binding, cache, rel)?;
            let v = tape.matvec(w, h0)?;
            cache.disclosed.insert(rel, v);
            Ok(v)
        };
        let target = transformed(tape, cache, hood.target_relation)?;
        let mut feats = Vec::with_capacity(hood.neighbors.len());
        let mut logits = Vec::with_capacity(hood.neighbors.len());
        for n in &hood.neighbors {
            let f = transformed(tape, cache, n.relation)?;
            let sim = tape.dot(target, f)?;
            logits.push(tape.leaky_relu(sim, self.config.leaky_slope)?);
            feats.push(f);
        }
        let stacked = tape.stack(&logits)?;
        let alpha = tape.softmax(stacked)?;
        if let Some(t) = trace {
            t.disclosing_attention = Some(tape.value(alpha).to_vec());
        }
        let mut scaled = Vec::with_capacity(feats.len());
        for (i, f) in feats.iter().enumerate() {
            let a = tape.index(alpha, i)?;
            scaled.push(tape.scale(*f, a)?);
        }
        let total = tape.sum(&scaled)?;
        Ok(tape.relu(total)?)
    }

    /// Linear scorer over the target representation, fused with the
    /// disclosing vector when one is given.
    pub fn score_head(&self, tape: &mut Tape, target: Var, disclosed: Option<Var>) -> Result<Var, ModelError> {
        let fused = match disclosed {
            None => target,
            Some(d) => match self.config.fusion {
                FusionMode::Sum => tape.add(target, d)?,
                FusionMode::Concat => {
                    let w3 = self
                        .ids
                        .fusion
                        .ok_or_else(|| ModelError::InvalidConfig("concat fusion without fusion transform".into()))?;
                    let joined = tape.concat(target, d)?;
                    tape.matvec(w3, joined)?
                }
            },
        };
        Ok(tape.matvec(self.ids.scorer, fused)?)
    }

    /// Full forward pass for one prepared triple; returns the scalar score
    /// node. Edge dropout applies only when `dropout` is given.
    pub fn forward<R: Rng + ?Sized>(
        &self,
        tape: &mut Tape,
        binding: &RelationBinding,
        input: &PreparedTriple,
        mut dropout: Option<&mut R>,
        mut trace: Option<&mut ForwardTrace>,
    ) -> Result<Var, ModelError> {
        if input.pruned.depth() != self.config.layers {
            return Err(ModelError::InvalidConfig(format!(
                "prepared with depth {}, model has {} layers",
                input.pruned.depth(),
                self.config.layers
            )));
        }
        let mut cache = FeatureCache::new();
        let mut h = self.initial_features(tape, binding, &mut cache, input)?;
        for k in 1..self.config.layers {
            h = self.message_layer(tape, &input.pruned, &h, k, dropout.as_deref_mut(), trace.as_deref_mut())?;
        }
        let target = self.final_layer(tape, &input.pruned, &h, dropout)?;
        let disclosed = if self.config.variant.disclosing() {
            let hood = input
                .disclosing
                .as_ref()
                .ok_or_else(|| ModelError::InvalidConfig("NE variant needs a disclosing neighborhood".into()))?;
            Some(self.disclosing_aggregate(tape, binding, &mut cache, hood, trace)?)
        } else {
            None
        };
        self.score_head(tape, target, disclosed)
    }

    /// Dropout-free score as a plain number.
    pub fn score(&self, binding: &RelationBinding, input: &PreparedTriple) -> Result<f64, ModelError> {
        let mut tape = Tape::new(&self.params);
        let s = self.forward::<rand_chacha::ChaCha8Rng>(&mut tape, binding, input, None, None)?;
        Ok(tape.scalar(s))
    }
}
