use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{SchemaError, SchemaGraph, SchemaPredicate, SchemaVectors};

/// Translational pretraining settings; L1 energy throughout.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransEConfig {
    pub dim: usize,
    pub epochs: usize,
    pub lr: f64,
    pub margin: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TransEConfig {
    fn default() -> Self {
        Self {
            dim: 300,
            epochs: 200,
            lr: 0.001,
            margin: 1.0,
            batch_size: 128,
            seed: 0,
        }
    }
}

/// Trained node and predicate vectors plus the per-epoch mean loss.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemaEmbedding {
    pub dim: usize,
    pub node_names: Vec<String>,
    pub nodes: Vec<Vec<f64>>,
    pub predicates: Vec<Vec<f64>>,
    pub epoch_losses: Vec<f64>,
}

impl SchemaEmbedding {
    pub fn node(&self, name: &str) -> Option<&[f64]> {
        self.node_names
            .iter()
            .position(|n| n == name)
            .map(|i| self.nodes[i].as_slice())
    }

    pub fn predicate(&self, p: SchemaPredicate) -> &[f64] {
        &self.predicates[p.index()]
    }

    /// `‖s + p − o‖₁`.
    pub fn energy(&self, subject: usize, p: SchemaPredicate, object: usize) -> f64 {
        l1_energy(&self.nodes[subject], &self.predicates[p.index()], &self.nodes[object])
    }

    /// Vectors for the given KG relation names; every one must be a schema
    /// node.
    pub fn export(&self, relation_names: &[String]) -> Result<SchemaVectors, SchemaError> {
        let mut out = SchemaVectors::new(self.dim);
        for name in relation_names {
            let v = self
                .node(name)
                .ok_or_else(|| SchemaError::MissingRelation(name.clone()))?;
            out.insert(name, v)?;
        }
        Ok(out)
    }
}

pub(crate) fn l1_energy(s: &[f64], p: &[f64], o: &[f64]) -> f64 {
    s.iter().zip(p).zip(o).map(|((a, b), c)| (a + b - c).abs()).sum()
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    let bound = 6.0 / (dim as f64).sqrt();
    let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-bound..bound)).collect();
    normalize(&mut v);
    v
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Margin ranking over `‖s + p − o‖₁` with uniform subject/object
/// corruption, minibatch SGD, and unit-L2 renormalization of node vectors
/// after every epoch.
pub fn pretrain(schema: &SchemaGraph, cfg: &TransEConfig) -> Result<SchemaEmbedding, SchemaError> {
    if schema.edges().is_empty() {
        return Err(SchemaError::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = schema.nodes().len();
    let dim = cfg.dim;
    let mut nodes: Vec<Vec<f64>> = (0..n).map(|_| random_vector(&mut rng, dim)).collect();
    let mut predicates: Vec<Vec<f64>> = (0..SchemaPredicate::ALL.len())
        .map(|_| random_vector(&mut rng, dim))
        .collect();

    let mut order: Vec<usize> = (0..schema.edges().len()).collect();
    let mut epoch_losses = Vec::with_capacity(cfg.epochs);
    let batch = cfg.batch_size.max(1);

    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for chunk in order.chunks(batch) {
            let mut node_grad: Vec<(usize, Vec<f64>)> = Vec::new();
            let mut pred_grad = vec![vec![0.0; dim]; SchemaPredicate::ALL.len()];
            for &e in chunk {
                let (s, p, o) = schema.edges()[e];
                let replace = rng.gen_range(0..n);
                let (ns, no) = if rng.gen_bool(0.5) { (replace, o) } else { (s, replace) };
                let pv = &predicates[p.index()];
                let pos = l1_energy(&nodes[s], pv, &nodes[o]);
                let neg = l1_energy(&nodes[ns], pv, &nodes[no]);
                let loss = cfg.margin + pos - neg;
                if loss <= 0.0 {
                    continue;
                }
                total += loss;
                let gp: Vec<f64> = (0..dim).map(|k| sign(nodes[s][k] + pv[k] - nodes[o][k])).collect();
                let gn: Vec<f64> = (0..dim).map(|k| sign(nodes[ns][k] + pv[k] - nodes[no][k])).collect();
                let neg_of = |v: &[f64]| v.iter().map(|x| -x).collect::<Vec<f64>>();
                node_grad.push((s, gp.clone()));
                node_grad.push((o, neg_of(&gp)));
                node_grad.push((ns, neg_of(&gn)));
                node_grad.push((no, gn.clone()));
                for k in 0..dim {
                    pred_grad[p.index()][k] += gp[k] - gn[k];
                }
            }
            for (idx, g) in node_grad {
                for (w, gv) in nodes[idx].iter_mut().zip(g) {
                    *w -= cfg.lr * gv;
                }
            }
            for (pv, g) in predicates.iter_mut().zip(&pred_grad) {
                for (w, gv) in pv.iter_mut().zip(g) {
                    *w -= cfg.lr * gv;
                }
            }
        }
        nodes.iter_mut().for_each(|v| normalize(v));
        epoch_losses.push(total / schema.edges().len() as f64);
    }

    Ok(SchemaEmbedding {
        dim,
        node_names: schema.nodes().to_vec(),
        nodes,
        predicates,
        epoch_losses,
    })
}
