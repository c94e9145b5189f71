use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::kgstore::{
    read_triple_file, write_triple_file, NamedTriple, TEST_FILE, TEST_GRAPH_FILE, TRAIN_FILE, VALID_FILE,
};

use super::EvalError;

pub const SEMI_DIR: &str = "semi";
pub const FULLY_DIR: &str = "fully";
pub const UNSEEN_FILE: &str = "unseen_relations.txt";
pub const STATS_FILE: &str = "stats.json";

/// Counts of one test side (graph plus targets).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitStats {
    pub relations: usize,
    pub unseen_relations: usize,
    pub entities: usize,
    pub graph_triples: usize,
    pub targets: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecombineStats {
    pub train_relations: usize,
    pub train_entities: usize,
    pub train_triples: usize,
    pub semi: SplitStats,
    pub fully: SplitStats,
    /// Test-graph triples and targets removed for touching a training entity.
    pub dropped_graph: usize,
    pub dropped_targets: usize,
}

/// A training graph from one benchmark version with the test side of another.
#[derive(Clone, Debug, PartialEq)]
pub struct RecombinedBench {
    pub train: Vec<NamedTriple>,
    pub valid: Vec<NamedTriple>,
    pub semi_graph: Vec<NamedTriple>,
    pub semi_targets: Vec<NamedTriple>,
    pub fully_graph: Vec<NamedTriple>,
    pub fully_targets: Vec<NamedTriple>,
    pub unseen_relations: Vec<String>,
    pub stats: RecombineStats,
}

fn split_stats(graph: &[NamedTriple], targets: &[NamedTriple], seen: &BTreeSet<&str>) -> SplitStats {
    let rels: BTreeSet<&str> = graph.iter().chain(targets).map(|t| t.1.as_str()).collect();
    let ents: BTreeSet<&str> = graph
        .iter()
        .chain(targets)
        .flat_map(|t| [t.0.as_str(), t.2.as_str()])
        .collect();
    SplitStats {
        relations: rels.len(),
        unseen_relations: rels.iter().filter(|r| !seen.contains(*r)).count(),
        entities: ents.len(),
        graph_triples: graph.len(),
        targets: targets.len(),
    }
}

/// Builds the recombined benchmark in memory.
pub fn recombine_triples(
    train: Vec<NamedTriple>,
    valid: Vec<NamedTriple>,
    test_graph: Vec<NamedTriple>,
    test_targets: Vec<NamedTriple>,
) -> RecombinedBench {
    let train_entities: BTreeSet<String> = train.iter().flat_map(|t| [t.0.clone(), t.2.clone()]).collect();
    let seen: BTreeSet<&str> = train.iter().map(|t| t.1.as_str()).collect();
    let disjoint = |t: &NamedTriple| !train_entities.contains(&t.0) && !train_entities.contains(&t.2);

    let semi_graph: Vec<NamedTriple> = test_graph.iter().filter(|t| disjoint(t)).cloned().collect();
    let semi_targets: Vec<NamedTriple> = test_targets.iter().filter(|t| disjoint(t)).cloned().collect();
    let unseen_set: BTreeSet<&str> = semi_graph
        .iter()
        .chain(&semi_targets)
        .map(|t| t.1.as_str())
        .filter(|r| !seen.contains(r))
        .collect();
    let fully_graph: Vec<NamedTriple> = semi_graph
        .iter()
        .filter(|t| unseen_set.contains(t.1.as_str()))
        .cloned()
        .collect();
    let fully_targets: Vec<NamedTriple> = semi_targets
        .iter()
        .filter(|t| unseen_set.contains(t.1.as_str()))
        .cloned()
        .collect();

    let stats = RecombineStats {
        train_relations: seen.len(),
        train_entities: train_entities.len(),
        train_triples: train.len(),
        semi: split_stats(&semi_graph, &semi_targets, &seen),
        fully: split_stats(&fully_graph, &fully_targets, &seen),
        dropped_graph: test_graph.len() - semi_graph.len(),
        dropped_targets: test_targets.len() - semi_targets.len(),
    };
    let unseen_relations = unseen_set.iter().map(|s| s.to_string()).collect();
    RecombinedBench {
        train,
        valid,
        semi_graph,
        semi_targets,
        fully_graph,
        fully_targets,
        unseen_relations,
        stats,
    }
}

/// Training side of `train_dir` with the test side of `test_dir`, written
/// under `out_dir` as `semi/` and `fully/` benchmark directories plus the
/// unseen-relation list and counts.
pub fn recombine(train_dir: &Path, test_dir: &Path, out_dir: &Path) -> Result<RecombinedBench, EvalError> {
    let bench = recombine_triples(
        read_triple_file(&train_dir.join(TRAIN_FILE))?,
        read_triple_file(&train_dir.join(VALID_FILE))?,
        read_triple_file(&test_dir.join(TEST_GRAPH_FILE))?,
        read_triple_file(&test_dir.join(TEST_FILE))?,
    );
    write_recombined(&bench, out_dir)?;
    Ok(bench)
}

pub fn write_recombined(bench: &RecombinedBench, out_dir: &Path) -> Result<(), EvalError> {
    for (sub, graph, targets) in [
        (SEMI_DIR, &bench.semi_graph, &bench.semi_targets),
        (FULLY_DIR, &bench.fully_graph, &bench.fully_targets),
    ] {
        let dir = out_dir.join(sub);
        fs::create_dir_all(&dir).map_err(|e| EvalError::io(&dir, e))?;
        write_triple_file(&dir.join(TRAIN_FILE), &bench.train)?;
        write_triple_file(&dir.join(VALID_FILE), &bench.valid)?;
        write_triple_file(&dir.join(TEST_GRAPH_FILE), graph)?;
        write_triple_file(&dir.join(TEST_FILE), targets)?;
    }
    let path = out_dir.join(UNSEEN_FILE);
    let mut text = bench.unseen_relations.join("\n");
    if !text.is_empty() {
        text.push('\n');
    }
    fs::write(&path, text).map_err(|e| EvalError::io(&path, e))?;
    let path = out_dir.join(STATS_FILE);
    let json = serde_json::to_string_pretty(&bench.stats).expect("stats serialize");
    fs::write(&path, json).map_err(|e| EvalError::io(&path, e))
}
