//! Independent oracles and random fixtures shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rmpi_core::kgstore::{KnowledgeGraph, Triple, Vocabulary};
use rmpi_core::numkit::Matrix;
use rmpi_core::rmpnet::{layer_param_name, Model, ModelConfig, RelationBinding, Variant};
use rmpi_core::subgraph::{EdgeType, EntitySubgraph, InstanceSource, RelationViewGraph, SubgraphKind, TripleInstance};

pub fn random_triples<R: Rng>(rng: &mut R, entities: usize, relations: usize, count: usize) -> Vec<Triple> {
    (0..count)
        .map(|_| {
            Triple::new(
                rng.gen_range(0..entities),
                rng.gen_range(0..relations),
                rng.gen_range(0..entities),
            )
        })
        .collect()
}

pub fn random_graph<R: Rng>(rng: &mut R, entities: usize, relations: usize, count: usize) -> KnowledgeGraph {
    KnowledgeGraph::new(entities, random_triples(rng, entities, relations, count)).unwrap()
}

/// Entity subgraph holding `target` first and then `others` verbatim.
pub fn subgraph_of(target: Triple, others: &[Triple]) -> EntitySubgraph {
    let mut instances = vec![TripleInstance {
        triple: target,
        source: InstanceSource::Target,
    }];
    instances.extend(others.iter().enumerate().map(|(i, &triple)| TripleInstance {
        triple,
        source: InstanceSource::Graph(i),
    }));
    let entities = instances.iter().flat_map(|n| [n.triple.head, n.triple.tail]).collect();
    EntitySubgraph {
        entities,
        instances,
        target,
        kind: SubgraphKind::Enclosing,
    }
}

/// Typed edges of every ordered pair of distinct nodes, checked pair by pair
/// against the entity-sharing definitions.
pub fn brute_force_edges(nodes: &[Triple], suppress: bool) -> BTreeSet<(usize, EdgeType, usize)> {
    let mut out = BTreeSet::new();
    for (i, a) in nodes.iter().enumerate() {
        for (j, b) in nodes.iter().enumerate() {
            if i == j {
                continue;
            }
            let para = a.head == b.head && a.tail == b.tail;
            let cross = a.head == b.tail && a.tail == b.head;
            if para {
                out.insert((i, EdgeType::Parallel, j));
            }
            if cross {
                out.insert((i, EdgeType::Loop, j));
            }
            let checks = [
                (EdgeType::HeadHead, a.head == b.head, para),
                (EdgeType::TailTail, a.tail == b.tail, para),
                (EdgeType::TailHead, a.tail == b.head, cross),
                (EdgeType::HeadTail, a.head == b.tail, cross),
            ];
            for (kind, holds, hidden) in checks {
                if holds && !(suppress && hidden) {
                    out.insert((i, kind, j));
                }
            }
        }
    }
    out
}

/// Hop distances by Floyd–Warshall over the undirected view of `graph`.
pub fn floyd_warshall(graph: &KnowledgeGraph) -> Vec<Vec<usize>> {
    let n = graph.id_space();
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for t in graph.triples() {
        let (h, tl) = (t.head.0, t.tail.0);
        d[h][tl] = d[h][tl].min(1);
        d[tl][h] = d[tl][h].min(1);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

fn mat_vec(m: &Matrix, x: &[f64]) -> Vec<f64> {
    (0..m.rows())
        .map(|r| m.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Target representation from running every layer over every node of the
/// full relation-view graph, in plain floating point. Random-init models
/// only; node labels index the embedding table directly.
pub fn full_graph_target(model: &Model, rvg: &RelationViewGraph) -> Vec<f64> {
    let cfg = &model.config;
    let table = model.params.get(model.ids.embedding.expect("random init"));
    let n = rvg.nodes.len();
    let mut h: Vec<Vec<f64>> = rvg
        .nodes
        .iter()
        .map(|node| table.row(node.triple.relation.0).to_vec())
        .collect();
    let weight = |k: usize, e: EdgeType| {
        let id = model.params.find(&layer_param_name(k - 1, e)).unwrap();
        model.params.get(id)
    };
    // incoming[i][e] = sources of edges of type e into i.
    let mut incoming: Vec<BTreeMap<EdgeType, Vec<usize>>> = vec![BTreeMap::new(); n];
    for e in &rvg.edges {
        incoming[e.dst].entry(e.kind).or_default().push(e.src);
    }
    let leaky = |x: f64| if x > 0.0 { x } else { cfg.leaky_slope * x };
    for k in 1..=cfg.layers {
        let last = k == cfg.layers;
        let target_prev = h[rvg.target].clone();
        let mut next = h.clone();
        for i in 0..n {
            if last && i != rvg.target {
                continue;
            }
            let mut total = vec![0.0; cfg.dim];
            let mut any = false;
            for (&e, srcs) in &incoming[i] {
                let alphas: Vec<f64> = if cfg.variant.target_attention() && !last {
                    let logits: Vec<f64> = srcs.iter().map(|&j| leaky(dot(&target_prev, &h[j]))).collect();
                    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                    let z: f64 = logits.iter().map(|l| (l - m).exp()).sum();
                    logits.iter().map(|l| (l - m).exp() / z).collect()
                } else {
                    vec![1.0; srcs.len()]
                };
                let mut pooled = vec![0.0; cfg.dim];
                for (&j, a) in srcs.iter().zip(&alphas) {
                    for (p, v) in pooled.iter_mut().zip(&h[j]) {
                        *p += a * v;
                    }
                }
                for (t, v) in total.iter_mut().zip(mat_vec(weight(k, e), &pooled)) {
                    *t += v;
                }
                any = true;
            }
            if any {
                next[i] = total.iter().zip(&h[i]).map(|(t, o)| t.max(0.0) + o).collect();
            }
        }
        h = next;
    }
    h[rvg.target].clone()
}

/// Model plus binding over relations `r0..r{n-1}`, all seen.
pub fn random_model(config: ModelConfig, relations: usize, seed: u64) -> (Model, RelationBinding) {
    let names: Vec<String> = (0..relations).map(|i| format!("r{i}")).collect();
    let model = Model::new(config, names.clone(), seed).unwrap();
    let mut vocab = Vocabulary::new();
    for n in &names {
        let r = vocab.intern_relation(n);
        vocab.mark_seen(r);
    }
    let binding = model.bind(&vocab, None, seed).unwrap();
    (model, binding)
}

pub fn small_config(variant: Variant, dim: usize, layers: usize) -> ModelConfig {
    ModelConfig {
        dim,
        layers,
        hop: layers,
        variant,
        edge_dropout: 0.0,
        ..ModelConfig::default()
    }
}

/// Worst relative error between analytic and central-difference gradients
/// of the dropout-free score with respect to every parameter entry.
/// Entries where both magnitudes stay below `1e-7` are compared absolutely.
pub fn gradient_check(
    model: &Model,
    binding: &RelationBinding,
    input: &rmpi_core::rmpnet::PreparedTriple,
    step: f64,
) -> f64 {
    use rmpi_core::numkit::Tape;
    let mut tape = Tape::new(&model.params);
    let s = model
        .forward::<rand_chacha::ChaCha8Rng>(&mut tape, binding, input, None, None)
        .unwrap();
    let grads = tape.backward(s).unwrap();
    let mut worst: f64 = 0.0;
    let mut probe = model.clone();
    for (p, m) in model.params.tensors().iter().enumerate() {
        for idx in 0..m.values().len() {
            let orig = m.values()[idx];
            probe.params.tensors_mut()[p].values_mut()[idx] = orig + step;
            let up = probe.score(binding, input).unwrap();
            probe.params.tensors_mut()[p].values_mut()[idx] = orig - step;
            let down = probe.score(binding, input).unwrap();
            probe.params.tensors_mut()[p].values_mut()[idx] = orig;
            let numeric = (up - down) / (2.0 * step);
            let analytic = grads.tensors()[p].values()[idx];
            let scale = numeric.abs().max(analytic.abs());
            let err = if scale < 1e-7 {
                (numeric - analytic).abs()
            } else {
                (numeric - analytic).abs() / scale
            };
            worst = worst.max(err);
        }
    }
    worst
}
