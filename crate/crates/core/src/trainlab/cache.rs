use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::kgstore::{KnowledgeGraph, Triple};
use crate::rmpnet::{prepare_triple, ModelConfig, PreparedTriple};

use super::TrainError;

/// Environment variable naming a directory for persisted subgraphs.
pub const CACHE_DIR_ENV: &str = "RMPI_CACHE_DIR";

const DEFAULT_CAPACITY: usize = 500_000;

#[derive(Serialize, Deserialize)]
struct DiskEntry {
    hop: usize,
    prepared: PreparedTriple,
}

/// Prepared subgraphs of one graph under one model configuration, keyed by
/// `(triple, hop)`. Entries past `capacity` are computed but not kept.
pub struct SubgraphCache<'g> {
    graph: &'g KnowledgeGraph,
    config: ModelConfig,
    entries: RwLock<HashMap<(Triple, usize), Arc<PreparedTriple>>>,
    capacity: usize,
    disk: Option<PathBuf>,
    pending: Mutex<Vec<Arc<PreparedTriple>>>,
}

impl<'g> SubgraphCache<'g> {
    pub fn new(graph: &'g KnowledgeGraph, config: &ModelConfig) -> Self {
        Self {
            graph,
            config: config.clone(),
            entries: RwLock::new(HashMap::new()),
            capacity: DEFAULT_CAPACITY,
            disk: None,
            pending: Mutex::new(Vec::new()),
        }
    }

    /// Like [`new`](Self::new), persisting into the directory named by
    /// [`CACHE_DIR_ENV`] when it is set.
    pub fn from_env(graph: &'g KnowledgeGraph, config: &ModelConfig) -> Result<Self, TrainError> {
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(dir) if !dir.is_empty() => Self::with_dir(graph, config, Path::new(&dir)),
            _ => Ok(Self::new(graph, config)),
        }
    }

    /// Cache backed by a file under `dir`, loading whatever an earlier run
    /// with the same graph and configuration left there.
    pub fn with_dir(graph: &'g KnowledgeGraph, config: &ModelConfig, dir: &Path) -> Result<Self, TrainError> {
        fs::create_dir_all(dir).map_err(|e| TrainError::io(dir, e))?;
        let path = dir.join(format!("subgraphs-{}.jsonl", fingerprint(graph, config)));
        let mut cache = Self::new(graph, config);
        if path.exists() {
            let file = fs::File::open(&path).map_err(|e| TrainError::io(&path, e))?;
            let map = cache.entries.get_mut().expect("fresh lock");
            for line in BufReader::new(file).lines() {
                let line = line.map_err(|e| TrainError::io(&path, e))?;
                // A torn final line from an interrupted run is skipped.
                if let Ok(entry) = serde_json::from_str::<DiskEntry>(&line) {
                    map.insert((entry.prepared.triple, entry.hop), Arc::new(entry.prepared));
                }
            }
        }
        cache.disk = Some(path);
        Ok(cache)
    }

    pub fn with_capacity(mut self, capacity: usize) -> Self {
        self.capacity = capacity;
        self
    }

    pub fn graph(&self) -> &'g KnowledgeGraph {
        self.graph
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, triple: Triple) -> Result<Arc<PreparedTriple>, TrainError> {
        let key = (triple, self.config.hop);
        if let Some(p) = self.entries.read().expect("cache lock").get(&key) {
            return Ok(Arc::clone(p));
        }
        let prepared = Arc::new(prepare_triple(self.graph, triple, &self.config)?);
        let mut map = self.entries.write().expect("cache lock");
        if let Some(p) = map.get(&key) {
            return Ok(Arc::clone(p));
        }
        if map.len() < self.capacity {
            map.insert(key, Arc::clone(&prepared));
            if self.disk.is_some() {
                self.pending.lock().expect("cache lock").push(Arc::clone(&prepared));
            }
        }
        Ok(prepared)
    }

    /// Appends entries created since the last flush to the backing file.
    pub fn flush(&self) -> Result<(), TrainError> {
        let Some(path) = &self.disk else {
            return Ok(());
        };
        let mut pending = self.pending.lock().expect("cache lock");
        if pending.is_empty() {
            return Ok(());
        }
        pending.sort_by_key(|p| p.triple);
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| TrainError::io(path, e))?;
        let mut w = BufWriter::new(file);
        for p in pending.drain(..) {
            let entry = DiskEntry {
                hop: self.config.hop,
                prepared: (*p).clone(),
            };
            let line = serde_json::to_string(&entry).map_err(|e| TrainError::Format {
                path: path.clone(),
                message: e.to_string(),
            })?;
            writeln!(w, "{line}").map_err(|e| TrainError::io(path, e))?;
        }
        w.flush().map_err(|e| TrainError::io(path, e))
    }
}

/// Digest of everything preparation depends on.
fn fingerprint(graph: &KnowledgeGraph, config: &ModelConfig) -> String {
    let mut h = Sha256::new();
    for t in graph.triples() {
        for v in [t.head.0, t.relation.0, t.tail.0] {
            h.update((v as u64).to_le_bytes());
        }
    }
    let key = (
        config.hop,
        config.layers,
        config.variant.disclosing(),
        config.suppress_basic_edges,
        config.exclude_target_fact,
    );
    h.update(serde_json::to_vec(&key).expect("tuple serializes"));
    h.finalize().iter().take(12).map(|b| format!("{b:02x}")).collect()
}
