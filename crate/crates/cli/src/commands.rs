use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rmpi_core::evalbench::{mean_std, recombine, Evaluator, Report, Sides};
use rmpi_core::kgstore::{load_benchmark, Benchmark, Triple};
use rmpi_core::rmpnet::{FusionMode, InitMode, ModelConfig, Variant};
use rmpi_core::schema::{load_schema, pretrain, SchemaVectors, TransEConfig};
use rmpi_core::subgraph::{
    extract_disclosing, extract_enclosing, to_relation_view, ExtractOptions, RelationViewOptions,
};
use rmpi_core::trainlab::{self, Checkpoint, TrainConfig, MANIFEST_FILE, PARAMS_FILE};

use crate::manifest::RunManifest;
use crate::{
    BenchgenArgs, DumpArgs, EvalArgs, Failure, FusionArg, GraphArg, InitArg, KindArg, SchemaArgs, SidesArg, SplitArg,
    TaskArg, TrainArgs, VariantArg,
};

fn usage(m: impl ToString) -> Failure {
    Failure::Usage(m.to_string())
}

fn set_workers(workers: usize) -> Result<(), Failure> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .map_err(|e| Failure::Data(e.to_string()))
}

fn load_schema_vectors(path: Option<&PathBuf>, manifest: &mut RunManifest) -> Result<Option<SchemaVectors>, Failure> {
    match path {
        Some(dir) => {
            manifest.input(dir)?;
            Ok(Some(SchemaVectors::load(dir)?))
        }
        None => Ok(None),
    }
}

pub fn train(a: TrainArgs) -> Result<(), Failure> {
    let model = ModelConfig {
        hop: a.hop,
        layers: a.layers,
        dim: a.dim,
        edge_dropout: a.dropout,
        variant: match a.variant {
            VariantArg::Base => Variant::Base,
            VariantArg::Ne => Variant::Ne,
            VariantArg::Ta => Variant::Ta,
            VariantArg::NeTa => Variant::NeTa,
        },
        fusion: match a.fusion {
            FusionArg::Sum => FusionMode::Sum,
            FusionArg::Conc => FusionMode::Concat,
        },
        init: match a.init {
            InitArg::Random => InitMode::Random,
            InitArg::Schema => InitMode::Schema,
        },
        ..ModelConfig::default()
    };
    let mut base = TrainConfig {
        model,
        learning_rate: a.lr,
        batch_size: a.batch,
        margin: a.margin,
        epochs: a.epochs,
        seed: a.seed,
        patience: (a.patience > 0).then_some(a.patience),
        negatives_per_positive: a.negatives,
        avoid_known_negatives: !a.allow_known_negatives,
        workers: a.workers,
    };
    base.validate().map_err(usage)?;
    if a.runs == 0 {
        return Err(usage("--runs must be at least 1"));
    }
    if a.init == InitArg::Schema && a.schema.is_none() {
        return Err(usage("--init schema needs --schema <dir>"));
    }

    let mut manifest = RunManifest::new("train", &a, Some(a.seed));
    manifest.input(&a.data)?;
    let bench = load_benchmark(&a.data)?;
    let schema = if a.init == InitArg::Schema {
        load_schema_vectors(a.schema.as_ref(), &mut manifest)?
    } else {
        None
    };
    if let Some(v) = &schema {
        base.model.schema_dim = v.dim();
    }

    let mut report = Report::new();
    let mut bests = Vec::new();
    for run in 0..a.runs {
        let cfg = TrainConfig {
            seed: a.seed + run as u64,
            ..base.clone()
        };
        let dir = if a.runs == 1 {
            a.out.clone()
        } else {
            a.out.join(format!("run_{run}"))
        };
        let outcome = trainlab::train(&bench, &cfg, schema.as_ref(), &mut |r| {
            let auc = r.valid_auc_pr.map_or("-".into(), |v| format!("{v:.4}"));
            eprintln!(
                "run {run} epoch {:>3}  loss {:.4}  valid auc-pr {auc}",
                r.epoch, r.train_loss
            );
        })?;
        let ckpt = outcome.checkpoint;
        ckpt.save(&dir)?;
        manifest.output(&dir);
        eprintln!("run {run}: kept epoch {} -> {}", ckpt.best_epoch, dir.display());
        if let Some(b) = ckpt.best_valid_auc_pr() {
            report.metric(format!("run{run}.valid_auc_pr"), b);
            bests.push(b);
        }
    }
    if !bests.is_empty() {
        let (mean, std) = mean_std(&bests);
        report.metric("valid_auc_pr", mean).metric("valid_auc_pr.std", std);
    }
    report.detail("runs", a.runs);
    report.write(&a.out, "train_report")?;
    manifest.output(&a.out.join("train_report.tsv"));
    manifest.output(&a.out.join("train_report.json"));
    manifest.write(&a.out)?;
    Ok(())
}

/// The checkpoint itself, or its `run_*` subdirectories in name order.
fn checkpoint_dirs(root: &Path) -> Result<Vec<PathBuf>, Failure> {
    if root.join(MANIFEST_FILE).exists() {
        return Ok(vec![root.to_path_buf()]);
    }
    let entries = fs::read_dir(root).map_err(|e| Failure::Data(format!("{}: {e}", root.display())))?;
    let mut dirs: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("run_"))
                && p.join(MANIFEST_FILE).exists()
        })
        .collect();
    dirs.sort_by_key(|p| {
        p.file_name()
            .and_then(|n| n.to_str())
            .and_then(|n| n["run_".len()..].parse::<usize>().ok())
            .unwrap_or(usize::MAX)
    });
    if dirs.is_empty() {
        return Err(Failure::Data(format!("{}: no checkpoint found", root.display())));
    }
    Ok(dirs)
}

fn targets(bench: &Benchmark, split: SplitArg) -> &[Triple] {
    match split {
        SplitArg::Test => &bench.test_targets,
        SplitArg::Valid => &bench.valid,
    }
}

pub fn eval(a: EvalArgs) -> Result<(), Failure> {
    if a.hits.contains(&0) {
        return Err(usage("--hits values must be positive"));
    }
    set_workers(a.workers)?;
    let out = a.out.clone().unwrap_or_else(|| a.ckpt.join("eval"));
    let mut manifest = RunManifest::new("eval", &a, Some(a.seed));
    let dirs = checkpoint_dirs(&a.ckpt)?;
    for d in &dirs {
        manifest.input(&d.join(MANIFEST_FILE))?;
        manifest.input(&d.join(PARAMS_FILE))?;
    }
    manifest.input(&a.data)?;
    let bench = load_benchmark(&a.data)?;
    let schema = load_schema_vectors(a.schema.as_ref(), &mut manifest)?;
    let sides = match a.sides {
        SidesArg::Both => Sides::Both,
        SidesArg::Head => Sides::Head,
        SidesArg::Tail => Sides::Tail,
    };
    let queries = targets(&bench, a.split);
    if queries.is_empty() {
        return Err(Failure::Data("no targets in the chosen split".into()));
    }

    let mut per_metric: Vec<(String, Vec<f64>)> = Vec::new();
    let mut push = |name: String, v: f64| match per_metric.iter_mut().find(|(n, _)| *n == name) {
        Some((_, vs)) => vs.push(v),
        None => per_metric.push((name, vec![v])),
    };
    let mut report = Report::new();
    let mut min_candidates = usize::MAX;
    for (run, dir) in dirs.iter().enumerate() {
        let ckpt = Checkpoint::load(dir)?;
        if ckpt.vocab_digest != bench.vocab.digest() {
            eprintln!(
                "note: {} was trained on a different vocabulary; relations are matched by name",
                dir.display()
            );
        }
        let ev = match a.split {
            SplitArg::Test => Evaluator::for_test(&ckpt, &bench, schema.as_ref())?,
            SplitArg::Valid => Evaluator::new(
                &ckpt,
                &bench.vocab,
                &bench.train,
                bench.train_entities(),
                schema.as_ref(),
            )?,
        };
        let prefix = if dirs.len() > 1 {
            format!("run{run}.")
        } else {
            String::new()
        };
        if matches!(a.task, TaskArg::Classify | TaskArg::Both) {
            let c = ev.classify(queries, a.seed)?;
            if dirs.len() > 1 {
                report.metric(format!("{prefix}auc_pr"), c.auc_pr);
            }
            push("auc_pr".into(), c.auc_pr);
        }
        if matches!(a.task, TaskArg::Rank | TaskArg::Both) {
            let r = ev.rank_all(queries, sides, a.neg, &a.hits, a.seed)?;
            min_candidates = min_candidates.min(r.candidates.iter().copied().min().unwrap_or(0));
            if dirs.len() > 1 {
                report.metric(format!("{prefix}mrr"), r.mrr);
            }
            push("mrr".into(), r.mrr);
            for (n, h) in &r.hits {
                if dirs.len() > 1 {
                    report.metric(format!("{prefix}hits@{n}"), *h);
                }
                push(format!("hits@{n}"), *h);
            }
        }
        eprintln!("evaluated {}", dir.display());
    }
    for (name, values) in &per_metric {
        let (mean, std) = mean_std(values);
        report.metric(name.clone(), mean);
        if values.len() > 1 {
            report.metric(format!("{name}.std"), std);
        }
    }
    report
        .detail(
            "checkpoints",
            dirs.iter().map(|d| d.display().to_string()).collect::<Vec<_>>(),
        )
        .detail("queries", queries.len());
    if min_candidates != usize::MAX {
        report.detail("min_candidates", min_candidates);
    }
    print!("{}", report.to_tsv());
    report.write(&out, "eval")?;
    manifest.output(&out.join("eval.tsv"));
    manifest.output(&out.join("eval.json"));
    manifest.write(&out)?;
    Ok(())
}

pub fn schema_pretrain(a: SchemaArgs) -> Result<(), Failure> {
    let cfg = TransEConfig {
        dim: a.dim,
        epochs: a.epochs,
        lr: a.lr,
        margin: a.margin,
        batch_size: a.batch,
        seed: a.seed,
    };
    if cfg.dim == 0
        || cfg.batch_size == 0
        || !(cfg.lr.is_finite() && cfg.lr > 0.0)
        || !(cfg.margin.is_finite() && cfg.margin > 0.0)
    {
        return Err(usage("dim, batch, lr and margin must be positive"));
    }
    let mut manifest = RunManifest::new("schema-pretrain", &a, Some(a.seed));
    manifest.input(&a.schema)?;
    let graph = load_schema(&a.schema)?;
    let names: Vec<String> = match &a.data {
        Some(dir) => {
            manifest.input(dir)?;
            load_benchmark(dir)?.vocab.relation_names().to_vec()
        }
        None => graph
            .property_nodes()
            .into_iter()
            .map(|i| graph.nodes()[i].clone())
            .collect(),
    };
    let emb = pretrain(&graph, &cfg)?;
    let vectors = emb.export(&names)?;
    vectors.save(&a.out)?;
    let losses: String = emb
        .epoch_losses
        .iter()
        .enumerate()
        .map(|(i, l)| format!("{}\t{l:.6}\n", i + 1))
        .collect();
    let path = a.out.join("losses.tsv");
    fs::write(&path, losses)?;
    manifest.output(&a.out);
    eprintln!(
        "{} nodes, {} triples; exported {} vectors",
        graph.nodes().len(),
        graph.edges().len(),
        vectors.len()
    );
    manifest.write(&a.out)?;
    Ok(())
}

pub fn benchgen(a: BenchgenArgs) -> Result<(), Failure> {
    let mut manifest = RunManifest::new("benchgen", &a, None);
    manifest.input(&a.train_from)?;
    manifest.input(&a.test_from)?;
    let rb = recombine(&a.train_from, &a.test_from, &a.out)?;
    let s = &rb.stats;
    println!(
        "semi\t{} relations ({} unseen)\t{} graph triples\t{} targets",
        s.semi.relations, s.semi.unseen_relations, s.semi.graph_triples, s.semi.targets
    );
    println!(
        "fully\t{} relations\t{} graph triples\t{} targets",
        s.fully.relations, s.fully.graph_triples, s.fully.targets
    );
    if rb.fully_targets.is_empty() {
        eprintln!("warning: the fully inductive split has no targets");
    }
    manifest.output(&a.out);
    manifest.write(&a.out)?;
    Ok(())
}

pub fn dump_subgraph(a: DumpArgs) -> Result<(), Failure> {
    if a.hop == 0 {
        return Err(usage("--hop must be at least 1"));
    }
    let mut manifest = RunManifest::new("dump-subgraph", &a, None);
    manifest.input(&a.data)?;
    let bench = load_benchmark(&a.data)?;
    let v = &bench.vocab;
    let entity = |name: &str| {
        v.entity_id(name)
            .ok_or_else(|| Failure::Data(format!("unknown entity {name:?}")))
    };
    let relation = v
        .relation_id(&a.rel)
        .ok_or_else(|| Failure::Data(format!("unknown relation {:?}", a.rel)))?;
    let triple = Triple {
        head: entity(&a.head)?,
        relation,
        tail: entity(&a.tail)?,
    };
    let graph = match a.graph {
        GraphArg::Train => &bench.train,
        GraphArg::Test => &bench.test_graph,
    };
    let opts = ExtractOptions {
        exclude_target_fact: !a.keep_target_fact,
    };
    let sub = match a.kind {
        KindArg::Enclosing => extract_enclosing(graph, triple, a.hop, opts)?,
        KindArg::Disclosing => extract_disclosing(graph, triple, a.hop, opts)?,
    };
    let rvg = to_relation_view(
        &sub,
        RelationViewOptions {
            suppress_basic: !a.keep_basic,
        },
    );
    match &a.out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            let file = fs::File::create(path)?;
            let mut w = std::io::BufWriter::new(file);
            rvg.write_edge_list(&mut w)?;
            w.flush()?;
            manifest.output(path);
            let dir = path
                .parent()
                .filter(|p| !p.as_os_str().is_empty())
                .unwrap_or(Path::new("."));
            manifest.write(dir)?;
        }
        None => {
            let stdout = std::io::stdout();
            rvg.write_edge_list(stdout.lock())?;
        }
    }
    Ok(())
}
