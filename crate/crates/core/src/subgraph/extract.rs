use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::kgstore::{EntityId, KnowledgeGraph, Triple};

use super::{EntitySubgraph, InstanceSource, SubgraphError, SubgraphKind, TripleInstance};

/// Knobs shared by both extraction flavours.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtractOptions {
    /// Leave out graph instances identical to the target fact, so a training
    /// positive does not see itself as a parallel neighbor.
    pub exclude_target_fact: bool,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            exclude_target_fact: true,
        }
    }
}

fn check_endpoints(graph: &KnowledgeGraph, target: &Triple, hops: usize) -> Result<(), SubgraphError> {
    if hops == 0 {
        return Err(SubgraphError::InvalidHop);
    }
    for e in [target.head, target.tail] {
        if !graph.has_entity(e) {
            return Err(SubgraphError::UnknownEntity(e));
        }
    }
    Ok(())
}

/// Graph triple indexes with both endpoints in `entities`, ascending.
fn induced_triples(
    graph: &KnowledgeGraph,
    entities: &BTreeSet<EntityId>,
    target: &Triple,
    opts: ExtractOptions,
) -> Vec<usize> {
    let mut out = Vec::new();
    for &e in entities {
        for &(_, tail, idx) in graph.out_edges(e) {
            if entities.contains(&tail) {
                if opts.exclude_target_fact && graph.triple(idx) == *target {
                    continue;
                }
                out.push(idx);
            }
        }
    }
    out.sort_unstable();
    out
}

fn assemble(
    graph: &KnowledgeGraph,
    target: Triple,
    entities: BTreeSet<EntityId>,
    triples: Vec<usize>,
    kind: SubgraphKind,
) -> EntitySubgraph {
    let mut instances = Vec::with_capacity(triples.len() + 1);
    instances.push(TripleInstance {
        triple: target,
        source: InstanceSource::Target,
    });
    instances.extend(triples.into_iter().map(|idx| TripleInstance {
        triple: graph.triple(idx),
        source: InstanceSource::Graph(idx),
    }));
    EntitySubgraph {
        entities,
        instances,
        target,
        kind,
    }
}

/// Undirected hop distances from `root` using only the given triples.
fn local_distances(graph: &KnowledgeGraph, triples: &[usize], root: EntityId) -> HashMap<EntityId, usize> {
    let mut adj: HashMap<EntityId, Vec<EntityId>> = HashMap::new();
    for &idx in triples {
        let t = graph.triple(idx);
        adj.entry(t.head).or_default().push(t.tail);
        adj.entry(t.tail).or_default().push(t.head);
    }
    let mut dist = HashMap::from([(root, 0)]);
    let mut queue = VecDeque::from([root]);
    while let Some(e) = queue.pop_front() {
        let d = dist[&e];
        for n in adj.get(&e).into_iter().flatten() {
            if !dist.contains_key(n) {
                dist.insert(*n, d + 1);
                queue.push_back(*n);
            }
        }
    }
    dist
}

/// K-hop enclosing subgraph: the intersection of both endpoints' K-hop
/// neighborhoods, pruned until every non-root entity lies within K hops of
/// both roots inside the induced subgraph, plus the injected target edge.
pub fn extract_enclosing(
    graph: &KnowledgeGraph,
    target: Triple,
    hops: usize,
    opts: ExtractOptions,
) -> Result<EntitySubgraph, SubgraphError> {
    check_endpoints(graph, &target, hops)?;
    let (u, v) = (target.head, target.tail);
    let around_u = graph.khop_neighbors(u, hops)?;
    let around_v = graph.khop_neighbors(v, hops)?;

    let mut entities: BTreeSet<EntityId> = around_u.keys().filter(|e| around_v.contains_key(e)).copied().collect();
    entities.insert(u);
    entities.insert(v);

    loop {
        let triples = induced_triples(graph, &entities, &target, opts);
        let from_u = local_distances(graph, &triples, u);
        let from_v = local_distances(graph, &triples, v);
        let within = |e: &EntityId| {
            *e == u
                || *e == v
                || (from_u.get(e).is_some_and(|d| *d <= hops) && from_v.get(e).is_some_and(|d| *d <= hops))
        };
        let kept: BTreeSet<EntityId> = entities.iter().filter(|e| within(e)).copied().collect();
        if kept.len() == entities.len() {
            return Ok(assemble(graph, target, entities, triples, SubgraphKind::Enclosing));
        }
        entities = kept;
    }
}

/// K-hop disclosing subgraph: the union of both endpoints' K-hop
/// neighborhoods with all induced triples, plus the injected target edge.
pub fn extract_disclosing(
    graph: &KnowledgeGraph,
    target: Triple,
    hops: usize,
    opts: ExtractOptions,
) -> Result<EntitySubgraph, SubgraphError> {
    check_endpoints(graph, &target, hops)?;
    let mut entities: BTreeSet<EntityId> = graph.khop_neighbors(target.head, hops)?.into_keys().collect();
    entities.extend(graph.khop_neighbors(target.tail, hops)?.into_keys());
    let triples = induced_triples(graph, &entities, &target, opts);
    Ok(assemble(graph, target, entities, triples, SubgraphKind::Disclosing))
}
