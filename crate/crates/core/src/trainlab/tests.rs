use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::kgstore::{EntityId, KnowledgeGraph, Triple};
use crate::rmpnet::{InitMode, Model};
use crate::testutil::toy_benchmark;

#[test]
fn margin_loss_examples() {
    assert_eq!(margin_loss(&[5.0], &[1.0], 10.0).unwrap(), 6.0);
    assert_eq!(margin_loss(&[12.0, 30.0], &[1.0, 20.0], 10.0).unwrap(), 0.0);
    assert_eq!(margin_loss(&[2.0, 2.0], &[0.0, 5.0], 1.0).unwrap(), 4.0);
    assert!(matches!(
        margin_loss(&[1.0], &[1.0, 2.0], 1.0),
        Err(TrainError::LengthMismatch { pos: 1, neg: 2 })
    ));
}

#[test]
fn two_entity_graph_never_returns_positive() {
    let pos = Triple::new(0, 0, 1);
    let graph = KnowledgeGraph::new(2, vec![pos]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut seen = std::collections::BTreeSet::new();
    for _ in 0..200 {
        let neg = sample_negative(pos, &graph, &mut rng);
        assert_ne!(neg, pos);
        assert_eq!(neg.relation, pos.relation);
        assert!(neg.head == pos.head || neg.tail == pos.tail);
        seen.insert(neg);
    }
    assert!(seen.contains(&Triple::new(0, 0, 0)));
    assert!(seen.contains(&Triple::new(1, 0, 1)));
}

#[test]
fn sampling_is_reproducible() {
    let bench = toy_benchmark();
    let draw = |seed| {
        let mut rng = derive_rng(seed, &[7]);
        bench
            .train
            .triples()
            .iter()
            .map(|&t| sample_negative(t, &bench.train, &mut rng))
            .collect::<Vec<_>>()
    };
    assert_eq!(draw(1), draw(1));
    assert_ne!(draw(1), draw(2));
}

#[test]
fn known_triples_are_dodged() {
    let bench = toy_benchmark();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let hits = bench
        .train
        .triples()
        .iter()
        .filter(|&&t| bench.train.contains(&sample_negative(t, &bench.train, &mut rng)))
        .count();
    assert_eq!(hits, 0);
}

#[test]
fn replacement_entity_is_uniform() {
    // (e0, r0, e0) is corrupted on either side to one of e1..e9; the other
    // triples only register the entities and never collide.
    let pos = Triple::new(0, 0, 0);
    let mut triples = vec![pos];
    triples.extend((1..10).map(|i| Triple::new(i, 1, i)));
    let graph = KnowledgeGraph::new(10, triples).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut counts = [0usize; 10];
    for _ in 0..1000 {
        let neg = sample_negative(pos, &graph, &mut rng);
        let e = if neg.head != pos.head { neg.head } else { neg.tail };
        counts[e.0] += 1;
    }
    assert_eq!(counts[0], 0);
    let expected = 1000.0 / 9.0;
    let chi2: f64 = counts[1..]
        .iter()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    // 8 degrees of freedom, 0.01 level.
    assert!(chi2 < 20.09, "chi2 = {chi2}");
}

#[test]
fn sampler_with_single_entity_returns_positive() {
    let pos = Triple::new(0, 0, 0);
    let graph = KnowledgeGraph::new(1, vec![pos]).unwrap();
    let s = NegativeSampler::new(vec![EntityId(0)]);
    assert_eq!(s.sample(pos, &graph, &mut ChaCha8Rng::seed_from_u64(0)), pos);
}

fn small_config(epochs: usize) -> TrainConfig {
    let mut c = TrainConfig {
        epochs,
        seed: 5,
        patience: None,
        ..TrainConfig::default()
    };
    c.model.dim = 8;
    c
}

#[test]
fn zero_epochs_returns_initial_parameters() {
    let bench = toy_benchmark();
    let cfg = small_config(0);
    let out = train(&bench, &cfg, None, &mut |_| {}).unwrap();
    let fresh = Model::new(
        cfg.model.clone(),
        vec!["next".into(), "back".into(), "skip".into()],
        cfg.seed,
    )
    .unwrap();
    assert_eq!(out.checkpoint.model.params, fresh.params);
    assert_eq!(out.checkpoint.best_epoch, 0);
    assert!(out.checkpoint.history.is_empty());
}

#[test]
fn training_reduces_loss_and_is_deterministic() {
    let bench = toy_benchmark();
    let cfg = small_config(30);
    let mut seen = Vec::new();
    let a = train(&bench, &cfg, None, &mut |r| seen.push(r.clone())).unwrap();
    let h = &a.checkpoint.history;
    assert_eq!(h.len(), 30);
    assert_eq!(&seen, h);
    assert!(h.last().unwrap().train_loss < h[0].train_loss, "{h:?}");

    let best = a.checkpoint.best_valid_auc_pr().unwrap();
    let kept = h[a.checkpoint.best_epoch - 1].valid_auc_pr.unwrap();
    assert_eq!(best, kept);

    let b = train(&bench, &cfg, None, &mut |_| {}).unwrap();
    assert_eq!(a.checkpoint, b.checkpoint);
    assert_eq!(a.last_params, b.last_params);
}

#[test]
fn worker_count_does_not_change_the_result() {
    let bench = toy_benchmark();
    let mut cfg = small_config(2);
    cfg.workers = 1;
    let one = train(&bench, &cfg, None, &mut |_| {}).unwrap();
    cfg.workers = 3;
    let three = train(&bench, &cfg, None, &mut |_| {}).unwrap();
    assert_eq!(one.last_params, three.last_params);
}

#[test]
fn early_stopping_respects_patience() {
    let bench = toy_benchmark();
    let mut cfg = small_config(40);
    cfg.patience = Some(2);
    let out = train(&bench, &cfg, None, &mut |_| {}).unwrap();
    let h = &out.checkpoint.history;
    let last = h.last().unwrap().epoch;
    assert!(last == 40 || last - out.checkpoint.best_epoch == 2);
}

#[test]
fn schema_mode_requires_vectors() {
    let bench = toy_benchmark();
    let mut cfg = small_config(1);
    cfg.model.init = InitMode::Schema;
    assert!(matches!(
        train(&bench, &cfg, None, &mut |_| {}),
        Err(TrainError::Model(crate::rmpnet::ModelError::SchemaRequired))
    ));
}

#[test]
fn invalid_config_is_rejected() {
    let bench = toy_benchmark();
    let mut cfg = small_config(1);
    cfg.batch_size = 0;
    assert!(matches!(
        train(&bench, &cfg, None, &mut |_| {}),
        Err(TrainError::InvalidConfig(_))
    ));
    let mut cfg = small_config(1);
    cfg.margin = 0.0;
    assert!(matches!(
        train(&bench, &cfg, None, &mut |_| {}),
        Err(TrainError::InvalidConfig(_))
    ));
}

#[test]
fn checkpoint_round_trip_is_exact_at_stored_precision() {
    let bench = toy_benchmark();
    let out = train(&bench, &small_config(1), None, &mut |_| {}).unwrap();
    let dir = tempfile::tempdir().unwrap();
    out.checkpoint.save(dir.path()).unwrap();
    let loaded = Checkpoint::load(dir.path()).unwrap();
    assert_eq!(loaded, out.checkpoint.rounded());
    loaded.save(dir.path()).unwrap();
    assert_eq!(Checkpoint::load(dir.path()).unwrap(), loaded);
}

#[test]
fn truncated_params_file_is_reported() {
    let bench = toy_benchmark();
    let out = train(&bench, &small_config(0), None, &mut |_| {}).unwrap();
    let dir = tempfile::tempdir().unwrap();
    out.checkpoint.save(dir.path()).unwrap();
    let path = dir.path().join(PARAMS_FILE);
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 4]).unwrap();
    assert!(matches!(Checkpoint::load(dir.path()), Err(TrainError::Format { .. })));
}

#[test]
fn cache_shares_entries_and_persists() {
    let bench = toy_benchmark();
    let cfg = crate::rmpnet::ModelConfig::default();
    let t = bench.train.triple(0);
    let cache = SubgraphCache::new(&bench.train, &cfg);
    let a = cache.get(t).unwrap();
    let b = cache.get(t).unwrap();
    assert!(std::sync::Arc::ptr_eq(&a, &b));

    let dir = tempfile::tempdir().unwrap();
    let disk = SubgraphCache::with_dir(&bench.train, &cfg, dir.path()).unwrap();
    for &t in bench.train.triples().iter().take(5) {
        disk.get(t).unwrap();
    }
    disk.flush().unwrap();
    let reloaded = SubgraphCache::with_dir(&bench.train, &cfg, dir.path()).unwrap();
    assert_eq!(reloaded.len(), 5);
    assert_eq!(*reloaded.get(t).unwrap(), *a);

    let bounded = SubgraphCache::new(&bench.train, &cfg).with_capacity(1);
    bounded.get(bench.train.triple(0)).unwrap();
    bounded.get(bench.train.triple(1)).unwrap();
    assert_eq!(bounded.len(), 1);
}
