//! Acceptance suite: one line per criterion, exit status 1 if any fails.
//!
//! Criteria 1–4 and 9 are self-contained. Criteria 5–8 need the public
//! benchmark splits and the NELL schema under `RMPI_BENCH_ROOT`; without
//! them they report NOT RUN, together with a labelled synthetic proxy where
//! one is meaningful. See the README for the expected layout.

mod common;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rmpi_core::evalbench::{
    auc_pr, mean_std, rank_with_scorer, recombine_triples, Evaluator, RecombinedBench, Side, Sides, DEFAULT_NEGATIVES,
};
use rmpi_core::kgstore::{read_triple_file, Benchmark, EntityId, KnowledgeGraph, NamedTriple, Triple};
use rmpi_core::numkit::{softmax, Tape};
use rmpi_core::rmpnet::{prepare_triple, FeatureCache, ForwardTrace, FusionMode, InitMode, PreparedTriple, Variant};
use rmpi_core::schema::{load_schema, pretrain, SchemaGraph, SchemaPredicate, SchemaVectors, TransEConfig};
use rmpi_core::subgraph::{
    disclosing_one_hop, extract_enclosing, to_relation_view, ExtractOptions, RelationViewOptions,
};
use rmpi_core::trainlab::{train, Checkpoint, TrainConfig};

use common::*;

const BENCH_ROOT_ENV: &str = "RMPI_BENCH_ROOT";
const SEEDS: u64 = 5;
const TRANSE_WARMUP: usize = 10;

enum Verdict {
    Pass(String),
    Fail(String),
    NotRun(String),
}

fn verdict(ok: bool, detail: String) -> Verdict {
    if ok {
        Verdict::Pass(detail)
    } else {
        Verdict::Fail(detail)
    }
}

fn within(limit_secs: f64, start: Instant) -> (bool, String) {
    let secs = start.elapsed().as_secs_f64();
    (secs < limit_secs, format!("{secs:.2}s of {limit_secs:.0}s"))
}

// ---------------------------------------------------------------- 1

fn line_graph_oracle() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut mismatches = 0;
    let mut edges = 0;
    for g in 0..200 {
        let count = rng.gen_range(0..30);
        let triples = random_triples(&mut rng, 8, 4, count + 1);
        let (target, others) = triples.split_first().unwrap();
        let suppress = g % 2 == 0;
        let rvg = to_relation_view(
            &subgraph_of(*target, others),
            RelationViewOptions {
                suppress_basic: suppress,
            },
        );
        let nodes: Vec<Triple> = rvg.nodes.iter().map(|n| n.triple).collect();
        let got: BTreeSet<_> = rvg.edges.iter().map(|e| (e.src, e.kind, e.dst)).collect();
        edges += got.len();
        if got.len() != rvg.edges.len() || got != brute_force_edges(&nodes, suppress) {
            mismatches += 1;
        }
    }
    let (fast, time) = within(10.0, start);
    verdict(
        mismatches == 0 && fast,
        format!("200 graphs, {edges} edges, {mismatches} mismatching graphs, {time}"),
    )
}

// ---------------------------------------------------------------- 2

fn pruning_exactness() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let mut nontrivial = 0;
    for trial in 0..100u64 {
        let graph = random_graph(&mut rng, 9, 4, 18);
        let target = random_triples(&mut rng, 9, 4, 1)[0];
        let layers = 1 + (trial % 3) as usize;
        let variant = if trial % 2 == 0 { Variant::Ta } else { Variant::Base };
        let (model, binding) = random_model(small_config(variant, 6, layers), 4, trial);
        let sub = extract_enclosing(&graph, target, 2, ExtractOptions::default()).unwrap();
        let rvg = to_relation_view(&sub, RelationViewOptions::default());
        let prepared = PreparedTriple::from_parts(target, &rvg, layers, None);
        if !rvg.edges.is_empty() {
            nontrivial += 1;
        }

        let mut tape = Tape::new(&model.params);
        let mut cache = FeatureCache::new();
        let mut h = model
            .initial_features(&mut tape, &binding, &mut cache, &prepared)
            .unwrap();
        for k in 1..layers {
            h = model
                .message_layer::<ChaCha8Rng>(&mut tape, &prepared.pruned, &h, k, None, None)
                .unwrap();
        }
        let out = model
            .final_layer::<ChaCha8Rng>(&mut tape, &prepared.pruned, &h, None)
            .unwrap();
        let oracle = full_graph_target(&model, &rvg);
        for (a, b) in tape.value(out).iter().zip(&oracle) {
            worst = worst.max((a - b).abs());
        }
    }
    let (fast, time) = within(30.0, start);
    verdict(
        worst <= 1e-9 && fast && nontrivial > 50,
        format!("100 subgraphs ({nontrivial} with edges), max |diff| {worst:.2e}, {time}"),
    )
}

// ---------------------------------------------------------------- 3

fn gradient_suite() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut inputs = Vec::new();
    while inputs.len() < 20 {
        let size = rng.gen_range(3..=6);
        let triples = random_triples(&mut rng, 4, 3, size);
        let (target, others) = triples.split_first().unwrap();
        let rvg = to_relation_view(&subgraph_of(*target, others), RelationViewOptions::default());
        if rvg.edges.is_empty() {
            continue;
        }
        let hood = disclosing_one_hop(&rvg);
        inputs.push(PreparedTriple::from_parts(*target, &rvg, 2, Some(hood)));
    }
    let mut worst: f64 = 0.0;
    let mut runs = 0;
    for variant in Variant::ALL {
        for fusion in [FusionMode::Sum, FusionMode::Concat] {
            let mut config = small_config(variant, 4, 2);
            config.fusion = fusion;
            for (i, input) in inputs.iter().enumerate() {
                let (model, binding) = random_model(config.clone(), 3, 100 + i as u64);
                worst = worst.max(gradient_check(&model, &binding, input, 1e-5));
                runs += 1;
            }
        }
    }
    let (fast, time) = within(120.0, start);
    verdict(
        worst <= 1e-4 && fast,
        format!("{runs} checks over 4 variants x 2 fusions, worst rel err {worst:.2e}, {time}"),
    )
}

// ---------------------------------------------------------------- 4

fn metric_units() -> Verdict {
    let ap = auc_pr(&[0.9, 0.8, 0.7, 0.6], &[true, false, true, false]).unwrap();
    let ap_ok = (ap - 0.8333).abs() <= 1e-4;

    let entities: Vec<EntityId> = (0..200).map(EntityId).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (rank, drawn) = rank_with_scorer(
        |_| Ok(0.25),
        Triple::new(0, 0, 1),
        Side::Tail,
        &entities,
        DEFAULT_NEGATIVES,
        &mut rng,
    )
    .unwrap();
    let rank_ok = rank == 50 && drawn == DEFAULT_NEGATIVES;

    let mut simplex_ok = true;
    for _ in 0..200 {
        let len = rng.gen_range(1..20);
        let xs: Vec<f64> = (0..len).map(|_| rng.gen_range(-50.0..50.0)).collect();
        let p = softmax(&xs).unwrap();
        simplex_ok &= p.iter().all(|&v| v >= 0.0) && (p.iter().sum::<f64>() - 1.0).abs() < 1e-12;
    }
    let (model, binding) = random_model(small_config(Variant::NeTa, 6, 3), 4, 1);
    let mut groups = 0;
    for _ in 0..20 {
        let graph = random_graph(&mut rng, 6, 4, 14);
        let target = random_triples(&mut rng, 6, 4, 1)[0];
        let prepared = prepare_triple(&graph, target, &model.config).unwrap();
        let mut tape = Tape::new(&model.params);
        let mut trace = ForwardTrace::default();
        model
            .forward::<ChaCha8Rng>(&mut tape, &binding, &prepared, None, Some(&mut trace))
            .unwrap();
        let weight_sets = trace
            .attention
            .iter()
            .map(|g| &g.weights)
            .chain(trace.disclosing_attention.as_ref());
        for w in weight_sets {
            simplex_ok &= w.iter().all(|&v| v >= 0.0) && (w.iter().sum::<f64>() - 1.0).abs() < 1e-9;
            groups += 1;
        }
    }
    verdict(
        ap_ok && rank_ok && simplex_ok && groups > 0,
        format!(
            "auc_pr {ap:.4}, constant-scorer rank {rank}/{}, simplex over {groups} attention groups ok={simplex_ok}",
            drawn + 1
        ),
    )
}

// ---------------------------------------------------------------- 9

fn empty_subgraph_robustness() -> Verdict {
    // a and b lie in different components, so the enclosing subgraph of
    // (a, r0, b) is the target alone; a's only neighbor carries r1 or r3.
    let graph_with = |label: usize| {
        KnowledgeGraph::new(
            6,
            vec![Triple::new(0, label, 2), Triple::new(1, 2, 3), Triple::new(4, 0, 5)],
        )
        .unwrap()
    };
    let target = Triple::new(0, 0, 1);
    let mut failures = Vec::new();
    let mut scored = 0;
    for variant in Variant::ALL {
        for fusion in [FusionMode::Sum, FusionMode::Concat] {
            let mut config = small_config(variant, 8, 2);
            config.fusion = fusion;
            let (model, binding) = random_model(config, 4, 9);
            let score = |label| {
                prepare_triple(&graph_with(label), target, &model.config).and_then(|p| {
                    assert!(p.is_empty_enclosing());
                    model.score(&binding, &p)
                })
            };
            match (score(1), score(3)) {
                (Ok(a), Ok(b)) if a.is_finite() && b.is_finite() => {
                    scored += 1;
                    if variant.disclosing() && a == b {
                        failures.push(format!("{}/{fusion:?} ignores the disclosing neighbor", variant.name()));
                    }
                }
                (a, b) => failures.push(format!("{}/{fusion:?}: {a:?} {b:?}", variant.name())),
            }
        }
    }
    verdict(
        failures.is_empty(),
        if failures.is_empty() {
            format!("{scored} variant/fusion pairs scored; NE scores follow the neighbor label")
        } else {
            failures.join("; ")
        },
    )
}

// ---------------------------------------------------------------- data

/// Benchmark split `name` under `root`: either one directory with
/// train/valid/test_graph/test files, or the GraIL pair `name` (train,
/// valid) plus `name_ind` (train = test graph, test = targets).
struct Split {
    train: Vec<NamedTriple>,
    valid: Vec<NamedTriple>,
    test_graph: Vec<NamedTriple>,
    test: Vec<NamedTriple>,
}

fn load_split(root: &Path, name: &str) -> Result<Split, String> {
    let dir = root.join(name);
    let ind = root.join(format!("{name}_ind"));
    let read = |p: PathBuf| read_triple_file(&p).map_err(|e| e.to_string());
    let (graph_path, test_path) = if dir.join("test_graph.txt").exists() {
        (dir.join("test_graph.txt"), dir.join("test.txt"))
    } else {
        (ind.join("train.txt"), ind.join("test.txt"))
    };
    Ok(Split {
        train: read(dir.join("train.txt"))?,
        valid: read(dir.join("valid.txt"))?,
        test_graph: read(graph_path)?,
        test: read(test_path)?,
    })
}

fn bench_root() -> Option<PathBuf> {
    std::env::var_os(BENCH_ROOT_ENV).map(PathBuf::from)
}

fn not_run(what: &str, proxy: Option<String>) -> Verdict {
    let mut detail = format!("data unavailable ({what}; set {BENCH_ROOT_ENV})");
    if let Some(p) = proxy {
        detail.push_str(&format!("; synthetic proxy: {p}"));
    }
    Verdict::NotRun(detail)
}

fn named(h: &str, r: &str, t: &str) -> NamedTriple {
    (h.to_owned(), r.to_owned(), t.to_owned())
}

// ---------------------------------------------------------------- 5

fn recombination_proxy() -> String {
    // Train uses r0..r9 on entities tN. The test side uses r5..r14 on
    // entities sN, plus one triple touching a training entity that must be
    // dropped. Expected by construction: 10 relations (5 unseen) in the semi
    // split, 5 relations in the fully split.
    let train: Vec<_> = (0..10)
        .map(|i| named(&format!("t{i}"), &format!("r{i}"), &format!("t{}", i + 1)))
        .collect();
    let graph: Vec<_> = (5..15)
        .map(|i| named(&format!("s{i}"), &format!("r{i}"), &format!("s{}", i + 1)))
        .collect();
    let test = vec![
        named("s5", "r12", "s9"),
        named("s6", "r7", "s8"),
        named("t0", "r20", "s5"),
    ];
    let out = recombine_triples(train, Vec::new(), graph, test);
    let s = &out.stats;
    let ok = s.semi.relations == 10 && s.semi.unseen_relations == 5 && s.fully.relations == 5 && s.dropped_targets == 1;
    format!(
        "{} (semi {} relations / {} unseen, fully {})",
        if ok { "counts match" } else { "COUNTS DIFFER" },
        s.semi.relations,
        s.semi.unseen_relations,
        s.fully.relations
    )
}

fn recombination(root: Option<&Path>) -> Verdict {
    let Some(root) = root else {
        return not_run("nell_v2, nell_v3", Some(recombination_proxy()));
    };
    let start = Instant::now();
    let (v2, v3) = match (load_split(root, "nell_v2"), load_split(root, "nell_v3")) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return not_run(&e, Some(recombination_proxy())),
    };
    let out = recombine_triples(v2.train, v2.valid, v3.test_graph, v3.test);
    let s = &out.stats;
    let (fast, time) = within(10.0, start);
    verdict(
        s.semi.relations == 116 && s.semi.unseen_relations == 49 && s.fully.relations == 49 && fast,
        format!(
            "TE(semi) {} relations ({} unseen), TE(fully) {} relations; expected 116 (49) / 49; {time}",
            s.semi.relations, s.semi.unseen_relations, s.fully.relations
        ),
    )
}

// ---------------------------------------------------------------- 6–8

fn train_runs(
    bench: &Benchmark,
    model: rmpi_core::rmpnet::ModelConfig,
    schema: Option<&SchemaVectors>,
) -> Result<Vec<Checkpoint>, String> {
    (0..SEEDS)
        .map(|seed| {
            let cfg = TrainConfig {
                model: model.clone(),
                seed,
                ..TrainConfig::default()
            };
            train(bench, &cfg, schema, &mut |_| {})
                .map(|o| o.checkpoint)
                .map_err(|e| e.to_string())
        })
        .collect()
}

/// Classification AUC-PR per checkpoint; also checks every target got a
/// finite score.
fn classify_runs(runs: &[Checkpoint], bench: &Benchmark, schema: Option<&SchemaVectors>) -> Result<Vec<f64>, String> {
    runs.iter()
        .enumerate()
        .map(|(i, ckpt)| {
            let eval = Evaluator::for_test(ckpt, bench, schema).map_err(|e| e.to_string())?;
            let res = eval
                .classify(&bench.test_targets, i as u64)
                .map_err(|e| e.to_string())?;
            if res.scores.len() != 2 * bench.test_targets.len() || res.scores.iter().any(|s| !s.is_finite()) {
                return Err("not every target was scored".into());
            }
            Ok(res.auc_pr)
        })
        .collect()
}

fn partially_inductive(root: Option<&Path>) -> Verdict {
    let Some(root) = root else {
        return not_run("WN18RR_v1", None);
    };
    let start = Instant::now();
    let result = (|| {
        let s = load_split(root, "WN18RR_v1")?;
        let bench = Benchmark::from_named(&s.train, &s.valid, &s.test_graph, &s.test).map_err(|e| e.to_string())?;
        let runs = train_runs(&bench, Default::default(), None)?;
        let aucs = classify_runs(&runs, &bench, None)?;
        let mut hits = Vec::new();
        for (i, ckpt) in runs.iter().enumerate() {
            let eval = Evaluator::for_test(ckpt, &bench, None).map_err(|e| e.to_string())?;
            let r = eval
                .rank_all(&bench.test_targets, Sides::Both, DEFAULT_NEGATIVES, &[10], i as u64)
                .map_err(|e| e.to_string())?;
            hits.push(r.hits_at(10).unwrap_or(0.0));
        }
        Ok::<_, String>((mean_std(&aucs), mean_std(&hits)))
    })();
    match result {
        Err(e) => Verdict::Fail(e),
        Ok(((auc, auc_sd), (h10, h10_sd))) => verdict(
            auc >= 0.90 && h10 >= 0.75,
            format!(
                "AUC-PR {:.2} ± {:.2} (floor 90), Hits@10 {:.2} ± {:.2} (floor 75), {} seeds, {:.0}s",
                100.0 * auc,
                100.0 * auc_sd,
                100.0 * h10,
                100.0 * h10_sd,
                SEEDS,
                start.elapsed().as_secs_f64()
            ),
        ),
    }
}

/// NELL-995.v1 training side with the v3 test side, as semi and fully
/// benchmarks sharing the training graph.
fn nell_v1_v3(root: &Path) -> Result<(Benchmark, Benchmark), String> {
    let v1 = load_split(root, "nell_v1")?;
    let v3 = load_split(root, "nell_v3")?;
    let RecombinedBench {
        train,
        valid,
        semi_graph,
        semi_targets,
        fully_graph,
        fully_targets,
        ..
    } = recombine_triples(v1.train, v1.valid, v3.test_graph, v3.test);
    let semi = Benchmark::from_named(&train, &valid, &semi_graph, &semi_targets).map_err(|e| e.to_string())?;
    let fully = Benchmark::from_named(&train, &valid, &fully_graph, &fully_targets).map_err(|e| e.to_string())?;
    Ok((semi, fully))
}

/// Semi-setting AUC-PR means of the RANDOM-init runs, shared with the
/// schema criterion.
type RandomBaseline = Option<f64>;

fn fully_inductive(root: Option<&Path>) -> (Verdict, RandomBaseline) {
    let Some(root) = root else {
        return (not_run("nell_v1, nell_v3", None), None);
    };
    let start = Instant::now();
    let result = (|| {
        let (semi, fully) = nell_v1_v3(root)?;
        let runs = train_runs(&semi, Default::default(), None)?;
        let semi_auc = classify_runs(&runs, &semi, None)?;
        let fully_auc = classify_runs(&runs, &fully, None)?;
        Ok::<_, String>((mean_std(&semi_auc), mean_std(&fully_auc), fully.test_targets.len()))
    })();
    match result {
        Err(e) => (Verdict::Fail(e), None),
        Ok(((semi, semi_sd), (fully, fully_sd), targets)) => (
            verdict(
                semi >= 0.78 && fully >= 0.75,
                format!(
                    "TE(semi) AUC-PR {:.2} ± {:.2} (floor 78), TE(fully) {:.2} ± {:.2} over {targets} targets (floor 75), {:.0}s",
                    100.0 * semi,
                    100.0 * semi_sd,
                    100.0 * fully,
                    100.0 * fully_sd,
                    start.elapsed().as_secs_f64()
                ),
            ),
            Some(semi),
        ),
    }
}

/// Epochs after `warmup` whose mean loss exceeds the previous epoch's,
/// with the largest such increase.
fn rises_after(losses: &[f64], warmup: usize) -> (usize, f64) {
    losses
        .windows(2)
        .skip(warmup)
        .filter(|w| w[1] > w[0])
        .fold((0, 0.0), |(n, m), w| (n + 1, f64::max(m, w[1] - w[0])))
}

/// A schema shaped like NELL's: a concept hierarchy, properties with
/// domain and range, and property hierarchies; 1186 nodes, 3055 triples.
fn synthetic_schema(rng: &mut ChaCha8Rng) -> SchemaGraph {
    let mut g = SchemaGraph::new();
    let concepts = 286;
    let properties = 900;
    for c in 1..concepts {
        g.add_edge(
            &format!("c{c}"),
            SchemaPredicate::SubClassOf,
            &format!("c{}", rng.gen_range(0..c)),
        );
    }
    for p in 0..properties {
        g.add_edge(
            &format!("p{p}"),
            SchemaPredicate::Domain,
            &format!("c{}", rng.gen_range(0..concepts)),
        );
        g.add_edge(
            &format!("p{p}"),
            SchemaPredicate::Range,
            &format!("c{}", rng.gen_range(0..concepts)),
        );
    }
    while g.edges().len() < 3055 {
        let p = rng.gen_range(1..properties);
        g.add_edge(
            &format!("p{p}"),
            SchemaPredicate::SubPropertyOf,
            &format!("p{}", rng.gen_range(0..p)),
        );
    }
    g
}

fn transe_report(schema: &SchemaGraph, losses: &[f64]) -> (bool, String) {
    let (rises, largest) = rises_after(losses, TRANSE_WARMUP);
    let text = format!(
        "TransE on {} nodes / {} triples, loss {:.4} → {:.4}, {}",
        schema.nodes().len(),
        schema.edges().len(),
        losses.first().copied().unwrap_or(f64::NAN),
        losses.last().copied().unwrap_or(f64::NAN),
        if rises == 0 {
            format!("monotone after epoch {TRANSE_WARMUP}")
        } else {
            format!(
                "{rises} of {} post-warmup epochs rise (largest +{largest:.4})",
                losses.len().saturating_sub(TRANSE_WARMUP + 1)
            )
        }
    );
    (rises == 0, text)
}

fn schema_pipeline(root: Option<&Path>, random_baseline: RandomBaseline) -> Verdict {
    let Some(root) = root else {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let schema = synthetic_schema(&mut rng);
        let proxy = match pretrain(&schema, &TransEConfig::default()) {
            Ok(emb) => transe_report(&schema, &emb.epoch_losses).1,
            Err(e) => e.to_string(),
        };
        return not_run("nell_schema.tsv, nell_v1, nell_v3", Some(proxy));
    };
    let start = Instant::now();
    let result = (|| {
        let schema = load_schema(&root.join("nell_schema.tsv")).map_err(|e| e.to_string())?;
        let cfg = TransEConfig::default();
        let emb = pretrain(&schema, &cfg).map_err(|e| e.to_string())?;
        let (converged, transe_text) = transe_report(&schema, &emb.epoch_losses);
        let (semi, _) = nell_v1_v3(root)?;
        let vectors = emb.export(semi.vocab.relation_names()).map_err(|e| e.to_string())?;
        let model = rmpi_core::rmpnet::ModelConfig {
            init: InitMode::Schema,
            schema_dim: cfg.dim,
            ..Default::default()
        };
        let runs = train_runs(&semi, model, Some(&vectors))?;
        let (schema_auc, _) = mean_std(&classify_runs(&runs, &semi, Some(&vectors))?);
        let random_auc = match random_baseline {
            Some(v) => v,
            None => {
                let runs = train_runs(&semi, Default::default(), None)?;
                mean_std(&classify_runs(&runs, &semi, None)?).0
            }
        };
        Ok::<_, String>((converged, transe_text, schema_auc, random_auc))
    })();
    match result {
        Err(e) => Verdict::Fail(e),
        Ok((converged, transe_text, schema_auc, random_auc)) => {
            let gain = 100.0 * (schema_auc - random_auc);
            verdict(
                converged && gain >= 3.0,
                format!(
                    "{transe_text}; SCHEMA {:.2} vs RANDOM {:.2} AUC-PR (gain {gain:+.2}, floor +3), {:.0}s",
                    100.0 * schema_auc,
                    100.0 * random_auc,
                    start.elapsed().as_secs_f64()
                ),
            )
        }
    }
}

// ---------------------------------------------------------------- main

fn main() -> ExitCode {
    // libtest flags such as --nocapture are accepted and ignored.
    let root = bench_root();
    let root = root.as_deref();
    let mut lines: Vec<(usize, &str, Verdict, f64)> = Vec::new();
    let mut run = |n: usize, name: &'static str, f: &mut dyn FnMut() -> Verdict| {
        let t = Instant::now();
        let v = f();
        let secs = t.elapsed().as_secs_f64();
        print_line(n, name, &v, secs);
        lines.push((n, name, v, secs));
    };
    run(1, "line-graph oracle", &mut line_graph_oracle);
    run(2, "pruning exactness", &mut pruning_exactness);
    run(3, "gradient suite", &mut gradient_suite);
    run(4, "metric units", &mut metric_units);
    run(5, "benchmark recombination", &mut || recombination(root));
    run(6, "partially inductive (WN18RR.v1)", &mut || partially_inductive(root));
    let mut baseline = None;
    run(7, "fully inductive (NELL-995.v1.v3)", &mut || {
        let (v, b) = fully_inductive(root);
        baseline = b;
        v
    });
    run(8, "schema pipeline", &mut || schema_pipeline(root, baseline));
    run(9, "empty-subgraph robustness", &mut empty_subgraph_robustness);

    let failed = lines.iter().filter(|l| matches!(l.2, Verdict::Fail(_))).count();
    let skipped = lines.iter().filter(|l| matches!(l.2, Verdict::NotRun(_))).count();
    println!(
        "acceptance: {} passed, {failed} failed, {skipped} not run",
        lines.len() - failed - skipped
    );
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}

fn print_line(n: usize, name: &str, v: &Verdict, secs: f64) {
    let (tag, detail) = match v {
        Verdict::Pass(d) => ("PASS", d),
        Verdict::Fail(d) => ("FAIL", d),
        Verdict::NotRun(d) => ("NOT RUN", d),
    };
    println!("criterion {n} [{tag}] {name}: {detail} [{secs:.1}s]");
}
