use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::{KgError, KnowledgeGraph, Triple, Vocabulary};

pub const TRAIN_FILE: &str = "train.txt";
pub const VALID_FILE: &str = "valid.txt";
pub const TEST_GRAPH_FILE: &str = "test_graph.txt";
pub const TEST_FILE: &str = "test.txt";

/// A named triple as it appears on disk.
pub type NamedTriple = (String, String, String);

/// One loaded benchmark directory.
#[derive(Clone, Debug)]
pub struct Benchmark {
    pub vocab: Vocabulary,
    pub train: KnowledgeGraph,
    pub valid: Vec<Triple>,
    pub test_graph: KnowledgeGraph,
    pub test_targets: Vec<Triple>,
}

impl Benchmark {
    /// Entities a ranking query on the test side may draw candidates from:
    /// everything in the test graph or its targets.
    pub fn test_entities(&self) -> Vec<super::EntityId> {
        entity_pool(&self.test_graph, &self.test_targets)
    }

    pub fn train_entities(&self) -> Vec<super::EntityId> {
        entity_pool(&self.train, &self.valid)
    }
}

fn entity_pool(graph: &KnowledgeGraph, extra: &[Triple]) -> Vec<super::EntityId> {
    let mut pool = graph.entities();
    pool.extend(extra.iter().flat_map(|t| [t.head, t.tail]));
    pool.sort();
    pool.dedup();
    pool
}

/// Reads a `head<TAB>relation<TAB>tail` file. Blank lines are skipped.
pub fn read_triple_file(path: &Path) -> Result<Vec<NamedTriple>, KgError> {
    let text = fs::read_to_string(path).map_err(|source| KgError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split('\t').collect();
        if parts.len() != 3 || parts.iter().any(|p| p.is_empty()) {
            return Err(KgError::Malformed {
                path: path.to_path_buf(),
                line: i + 1,
                content: line.to_owned(),
            });
        }
        out.push((parts[0].to_owned(), parts[1].to_owned(), parts[2].to_owned()));
    }
    Ok(out)
}

pub fn write_triple_file(path: &Path, triples: &[NamedTriple]) -> Result<(), KgError> {
    let io_err = |source| KgError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = std::io::BufWriter::new(fs::File::create(path).map_err(io_err)?);
    for (h, r, t) in triples {
        writeln!(file, "{h}\t{r}\t{t}").map_err(io_err)?;
    }
    file.flush().map_err(io_err)
}

fn intern_all(vocab: &mut Vocabulary, named: &[NamedTriple]) -> Vec<Triple> {
    named
        .iter()
        .map(|(h, r, t)| Triple {
            head: vocab.intern_entity(h),
            relation: vocab.intern_relation(r),
            tail: vocab.intern_entity(t),
        })
        .collect()
}

/// Loads `train.txt`, `valid.txt`, `test_graph.txt` and `test.txt` from `dir`
/// into one shared vocabulary. Relations that never occur in `train.txt` are
/// flagged unseen.
pub fn load_benchmark(dir: &Path) -> Result<Benchmark, KgError> {
    let file = |name: &str| -> PathBuf { dir.join(name) };
    let train_named = read_triple_file(&file(TRAIN_FILE))?;
    if train_named.is_empty() {
        return Err(KgError::EmptyTraining(file(TRAIN_FILE)));
    }
    let valid_named = read_triple_file(&file(VALID_FILE))?;
    let graph_named = read_triple_file(&file(TEST_GRAPH_FILE))?;
    let test_named = read_triple_file(&file(TEST_FILE))?;

    Benchmark::from_named(&train_named, &valid_named, &graph_named, &test_named)
}

impl Benchmark {
    /// Builds a benchmark from named triples, interning in file order.
    pub fn from_named(
        train: &[NamedTriple],
        valid: &[NamedTriple],
        test_graph: &[NamedTriple],
        test: &[NamedTriple],
    ) -> Result<Benchmark, KgError> {
        let mut vocab = Vocabulary::new();
        let train = intern_all(&mut vocab, train);
        for t in &train {
            vocab.mark_seen(t.relation);
        }
        let valid = intern_all(&mut vocab, valid);
        let test_graph = intern_all(&mut vocab, test_graph);
        let test_targets = intern_all(&mut vocab, test);

        let n = vocab.num_entities();
        Ok(Benchmark {
            train: KnowledgeGraph::new(n, train)?,
            valid,
            test_graph: KnowledgeGraph::new(n, test_graph)?,
            test_targets,
            vocab,
        })
    }
}

/// Maps id-coded triples back to names.
pub fn name_triples(vocab: &Vocabulary, triples: &[Triple]) -> Result<Vec<NamedTriple>, KgError> {
    triples
        .iter()
        .map(|t| {
            Ok((
                vocab.entity_name(t.head)?.to_owned(),
                vocab.relation_name(t.relation)?.to_owned(),
                vocab.entity_name(t.tail)?.to_owned(),
            ))
        })
        .collect()
}

/// Writes a benchmark back out in the four-file layout.
pub fn write_benchmark(dir: &Path, bench: &Benchmark) -> Result<(), KgError> {
    fs::create_dir_all(dir).map_err(|source| KgError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let v = &bench.vocab;
    write_triple_file(&dir.join(TRAIN_FILE), &name_triples(v, bench.train.triples())?)?;
    write_triple_file(&dir.join(VALID_FILE), &name_triples(v, &bench.valid)?)?;
    write_triple_file(
        &dir.join(TEST_GRAPH_FILE),
        &name_triples(v, bench.test_graph.triples())?,
    )?;
    write_triple_file(&dir.join(TEST_FILE), &name_triples(v, &bench.test_targets)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, body: &str) {
        fs::write(dir.join(name), body).unwrap();
    }

    fn toy_dir() -> tempfile::TempDir {
        let d = tempfile::tempdir().unwrap();
        write(d.path(), TRAIN_FILE, "a\tp\tb\nb\tq\tc\n");
        write(d.path(), VALID_FILE, "a\tq\tc\n");
        write(d.path(), TEST_GRAPH_FILE, "x\tp\ty\ny\tnew\tz\n\n");
        write(d.path(), TEST_FILE, "x\tq\tz\n");
        d
    }

    #[test]
    fn loads_layout_and_flags_unseen_relations() {
        let d = toy_dir();
        let b = load_benchmark(d.path()).unwrap();
        assert_eq!(b.train.len(), 2);
        assert_eq!(b.valid.len(), 1);
        assert_eq!(b.test_graph.len(), 2);
        assert_eq!(b.test_targets.len(), 1);
        assert_eq!(b.vocab.num_entities(), 6);
        let unseen: Vec<_> = b
            .vocab
            .unseen_relations()
            .into_iter()
            .map(|r| b.vocab.relation_name(r).unwrap().to_owned())
            .collect();
        assert_eq!(unseen, vec!["new".to_owned()]);
        assert_eq!(b.test_entities().len(), 3);
    }

    #[test]
    fn identical_test_graph_has_no_unseen_relations() {
        let d = toy_dir();
        write(d.path(), TEST_GRAPH_FILE, "a\tp\tb\nb\tq\tc\n");
        let b = load_benchmark(d.path()).unwrap();
        assert!(b.vocab.unseen_relations().is_empty());
    }

    #[test]
    fn missing_file_is_named() {
        let d = toy_dir();
        fs::remove_file(d.path().join(TEST_FILE)).unwrap();
        let err = load_benchmark(d.path()).unwrap_err();
        assert!(err.to_string().contains("test.txt"), "{err}");
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let d = toy_dir();
        write(d.path(), VALID_FILE, "a\tq\tc\nbroken line\n");
        match load_benchmark(d.path()).unwrap_err() {
            KgError::Malformed { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn empty_training_file_is_rejected() {
        let d = toy_dir();
        write(d.path(), TRAIN_FILE, "\n");
        assert!(matches!(load_benchmark(d.path()), Err(KgError::EmptyTraining(_))));
    }

    #[test]
    fn duplicates_are_kept() {
        let d = toy_dir();
        write(d.path(), TRAIN_FILE, "a\tp\tb\na\tp\tb\n");
        let b = load_benchmark(d.path()).unwrap();
        assert_eq!(b.train.len(), 2);
    }

    #[test]
    fn write_then_load_reproduces_triples() {
        let d = toy_dir();
        let b = load_benchmark(d.path()).unwrap();
        let out = tempfile::tempdir().unwrap();
        write_benchmark(out.path(), &b).unwrap();
        for f in [TRAIN_FILE, VALID_FILE, TEST_GRAPH_FILE, TEST_FILE] {
            let mut a = read_triple_file(&d.path().join(f)).unwrap();
            let mut c = read_triple_file(&out.path().join(f)).unwrap();
            a.sort();
            c.sort();
            assert_eq!(a, c, "{f}");
        }
    }
}
