use std::sync::Arc;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::evalbench::{auc_pr, score_prepared};
use crate::kgstore::{Benchmark, Triple};
use crate::numkit::{adam_step, AdamConfig, AdamState, Gradients, ParamStore, Tape};
use crate::rmpnet::{InitMode, Model, ModelConfig, PreparedTriple, RelationBinding};
use crate::schema::SchemaVectors;

use super::{derive_rng, Checkpoint, NegativeSampler, SubgraphCache, TrainError};

const TAG_SHUFFLE: u64 = 1;
const TAG_NEGATIVE: u64 = 2;
const TAG_DROPOUT: u64 = 3;
const TAG_VALID: u64 = 4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub model: ModelConfig,
    pub learning_rate: f64,
    pub batch_size: usize,
    pub margin: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Epochs without a better validation AUC-PR before stopping.
    pub patience: Option<usize>,
    pub negatives_per_positive: usize,
    pub avoid_known_negatives: bool,
    /// Worker threads for subgraph preparation and per-sample gradients;
    /// 0 lets the pool decide.
    pub workers: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            model: ModelConfig::default(),
            learning_rate: 0.001,
            batch_size: 16,
            margin: 10.0,
            epochs: 20,
            seed: 0,
            patience: Some(10),
            negatives_per_positive: 1,
            avoid_known_negatives: true,
            workers: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        self.model.validate()?;
        let bad = |m: &str| Err(TrainError::InvalidConfig(m.to_owned()));
        if !(self.margin.is_finite() && self.margin > 0.0) {
            return bad("margin must be positive");
        }
        if self.batch_size == 0 {
            return bad("batch size must be at least 1");
        }
        if self.negatives_per_positive == 0 {
            return bad("need at least one negative per positive");
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return bad("learning rate must be positive");
        }
        Ok(())
    }
}

/// A positive and one of its corruptions, prepared for the forward pass.
#[derive(Clone, Debug)]
pub struct TrainSample {
    pub positive: Arc<PreparedTriple>,
    pub negative: Arc<PreparedTriple>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Mean hinge term per (positive, negative) pair.
    pub train_loss: f64,
    pub valid_auc_pr: Option<f64>,
}

/// Result of [`train`]: the kept checkpoint and the parameters after the
/// last epoch run.
#[derive(Clone, Debug)]
pub struct TrainOutcome {
    pub checkpoint: Checkpoint,
    pub last_params: ParamStore,
}

/// Trains on `bench.train`, selecting the epoch with the best validation
/// AUC-PR. `progress` sees every epoch record as it is produced.
pub fn train(
    bench: &Benchmark,
    config: &TrainConfig,
    schema: Option<&SchemaVectors>,
    progress: &mut dyn FnMut(&EpochRecord),
) -> Result<TrainOutcome, TrainError> {
    config.validate()?;
    if config.model.init == InitMode::Schema && schema.is_none() {
        return Err(crate::rmpnet::ModelError::SchemaRequired.into());
    }
    if bench.train.is_empty() {
        return Err(crate::kgstore::KgError::EmptyTraining("train".into()).into());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| TrainError::InvalidConfig(e.to_string()))?;

    let seen: Vec<String> = bench
        .vocab
        .seen_relations()
        .into_iter()
        .map(|r| bench.vocab.relation_name(r).map(str::to_owned))
        .collect::<Result<_, _>>()?;
    let mut model = Model::new(config.model.clone(), seen, config.seed)?;
    let binding = model.bind(&bench.vocab, schema, config.seed)?;
    let initial = model.params.clone();

    let cache = SubgraphCache::from_env(&bench.train, &config.model)?;
    let mut sampler = NegativeSampler::new(bench.train_entities());
    sampler.avoid_known = config.avoid_known_negatives;

    // Validation pairs are drawn once so every epoch is scored on the same set.
    let valid = {
        let mut rng = derive_rng(config.seed, &[TAG_VALID]);
        let mut triples = Vec::with_capacity(2 * bench.valid.len());
        let mut labels = Vec::with_capacity(2 * bench.valid.len());
        for &t in &bench.valid {
            triples.push(t);
            labels.push(true);
            triples.push(sampler.sample(t, &bench.train, &mut rng));
            labels.push(false);
        }
        let prepared = pool.install(|| prepare_all(&cache, &triples))?;
        (prepared, labels)
    };

    let adam = AdamConfig {
        lr: config.learning_rate,
        ..AdamConfig::default()
    };
    let mut state = AdamState::new(&model.params);
    let mut history = Vec::new();
    let mut best: Option<(f64, usize, ParamStore)> = None;

    for epoch in 1..=config.epochs {
        let mut order: Vec<usize> = (0..bench.train.len()).collect();
        order.shuffle(&mut derive_rng(config.seed, &[TAG_SHUFFLE, epoch as u64]));
        let mut neg_rng = derive_rng(config.seed, &[TAG_NEGATIVE, epoch as u64]);
        let mut loss_sum = 0.0;
        let mut pairs = 0usize;

        for (step, chunk) in order.chunks(config.batch_size).enumerate() {
            let mut triples = Vec::new();
            for &i in chunk {
                let pos = bench.train.triple(i);
                for _ in 0..config.negatives_per_positive {
                    triples.push(pos);
                    triples.push(sampler.sample(pos, &bench.train, &mut neg_rng));
                }
            }
            let prepared = pool.install(|| prepare_all(&cache, &triples))?;
            let samples: Vec<TrainSample> = prepared
                .chunks_exact(2)
                .map(|p| TrainSample {
                    positive: Arc::clone(&p[0]),
                    negative: Arc::clone(&p[1]),
                })
                .collect();

            let results: Vec<(f64, Option<Gradients>)> = pool.install(|| {
                samples
                    .par_iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let tags = [TAG_DROPOUT, epoch as u64, step as u64, i as u64];
                        let mut rng = derive_rng(config.seed, &tags);
                        sample_gradient(&model, &binding, s, config.margin, &mut rng)
                    })
                    .collect::<Result<_, _>>()
            })?;

            // Summed in sample order so the trajectory does not depend on
            // thread scheduling.
            let mut grads = model.params.zeros_like();
            for (loss, g) in &results {
                loss_sum += loss;
                pairs += 1;
                if let Some(g) = g {
                    grads.accumulate(g)?;
                }
            }
            adam_step(&mut model.params, &grads, &mut state, &adam)?;
        }
        cache.flush()?;

        let valid_auc_pr = if valid.0.is_empty() {
            None
        } else {
            let scores = pool.install(|| score_prepared(&model, &binding, &valid.0))?;
            Some(auc_pr(&scores, &valid.1)?)
        };
        let record = EpochRecord {
            epoch,
            train_loss: loss_sum / pairs.max(1) as f64,
            valid_auc_pr,
        };
        progress(&record);
        history.push(record);

        let metric = valid_auc_pr.unwrap_or(f64::NEG_INFINITY);
        let improved = match &best {
            None => true,
            // Without validation data the latest epoch wins.
            Some((b, _, _)) => metric > *b || valid_auc_pr.is_none(),
        };
        if improved {
            best = Some((metric, epoch, model.params.clone()));
        }
        if let (Some(p), Some((_, best_epoch, _))) = (config.patience, &best) {
            if epoch - best_epoch >= p && valid_auc_pr.is_some() {
                break;
            }
        }
    }

    let last_params = model.params.clone();
    let (best_epoch, params) = match best {
        Some((_, e, p)) => (e, p),
        None => (0, initial),
    };
    model.params = params;
    Ok(TrainOutcome {
        checkpoint: Checkpoint {
            model,
            vocab_digest: bench.vocab.digest(),
            unseen_seed: config.seed,
            train_config: Some(config.clone()),
            history,
            best_epoch,
        },
        last_params,
    })
}

fn prepare_all(cache: &SubgraphCache, triples: &[Triple]) -> Result<Vec<Arc<PreparedTriple>>, TrainError> {
    triples.par_iter().map(|&t| cache.get(t)).collect()
}

/// Hinge term of one pair and its gradient; `None` when the hinge is flat.
fn sample_gradient(
    model: &Model,
    binding: &RelationBinding,
    sample: &TrainSample,
    margin: f64,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<(f64, Option<Gradients>), TrainError> {
    let mut tape = Tape::new(&model.params);
    let sp = model.forward(&mut tape, binding, &sample.positive, Some(&mut *rng), None)?;
    let sn = model.forward(&mut tape, binding, &sample.negative, Some(&mut *rng), None)?;
    let diff = tape.sub(sn, sp)?;
    let gamma = tape.input(vec![margin])?;
    let shifted = tape.add(diff, gamma)?;
    let loss = tape.relu(shifted)?;
    let value = tape.scalar(loss);
    if value == 0.0 {
        return Ok((0.0, None));
    }
    Ok((value, Some(tape.backward(loss)?)))
}
