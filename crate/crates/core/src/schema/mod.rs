//! Ontological schema graphs (RDFS subPropertyOf / domain / range /
//! subClassOf) and translational pretraining of their node vectors.

mod transe;
mod vectors;

pub use transe::{pretrain, SchemaEmbedding, TransEConfig};
pub use vectors::{SchemaVectors, VECTORS_BLOB, VECTORS_MANIFEST};

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SchemaError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("vector width {actual}, expected {expected}")]
    Dimension { expected: usize, actual: usize },
    #[error("relation {0:?} is not a node of the schema graph")]
    MissingRelation(String),
    #[error("schema graph has no triples")]
    Empty,
    #[error("malformed vector files: {0}")]
    Format(String),
}

impl SchemaError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        SchemaError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// The four RDFS vocabularies a schema edge may use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SchemaPredicate {
    SubPropertyOf,
    Domain,
    Range,
    SubClassOf,
}

impl SchemaPredicate {
    pub const ALL: [SchemaPredicate; 4] = [
        SchemaPredicate::SubPropertyOf,
        SchemaPredicate::Domain,
        SchemaPredicate::Range,
        SchemaPredicate::SubClassOf,
    ];

    pub fn local_name(self) -> &'static str {
        match self {
            SchemaPredicate::SubPropertyOf => "subPropertyOf",
            SchemaPredicate::Domain => "domain",
            SchemaPredicate::Range => "range",
            SchemaPredicate::SubClassOf => "subClassOf",
        }
    }

    /// Accepts `rdfs:x`, the full RDFS namespace IRI (optionally in angle
    /// brackets), or the bare local name.
    pub fn parse(token: &str) -> Option<Self> {
        let t = token.trim().trim_start_matches('<').trim_end_matches('>');
        let local = t
            .strip_prefix("rdfs:")
            .or_else(|| t.strip_prefix("http://www.w3.org/2000/01/rdf-schema#"))
            .unwrap_or(t);
        Self::ALL.into_iter().find(|p| p.local_name() == local)
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for SchemaPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rdfs:{}", self.local_name())
    }
}

/// Nodes are KG relations and concepts; edges use the four vocabularies.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SchemaGraph {
    nodes: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, SchemaPredicate, usize)>,
}

impl SchemaGraph {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.index.insert(name.to_owned(), self.nodes.len());
        self.nodes.push(name.to_owned());
        self.nodes.len() - 1
    }

    pub fn add_edge(&mut self, subject: &str, predicate: SchemaPredicate, object: &str) {
        let s = self.intern(subject);
        let o = self.intern(object);
        self.edges.push((s, predicate, o));
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_id(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn edges(&self) -> &[(usize, SchemaPredicate, usize)] {
        &self.edges
    }

    /// Nodes used as properties: subjects of domain/range and either side of
    /// subPropertyOf, in node order.
    pub fn property_nodes(&self) -> Vec<usize> {
        let mut is_prop = vec![false; self.nodes.len()];
        for &(s, p, o) in &self.edges {
            match p {
                SchemaPredicate::SubPropertyOf => {
                    is_prop[s] = true;
                    is_prop[o] = true;
                }
                SchemaPredicate::Domain | SchemaPredicate::Range => is_prop[s] = true,
                SchemaPredicate::SubClassOf => {}
            }
        }
        (0..self.nodes.len()).filter(|&i| is_prop[i]).collect()
    }
}

/// Reads `subject<TAB>predicate<TAB>object` lines; blank lines and lines
/// starting with `#` are skipped.
pub fn load_schema(path: &Path) -> Result<SchemaGraph, SchemaError> {
    let text = std::fs::read_to_string(path).map_err(|e| SchemaError::io(path, e))?;
    let mut graph = SchemaGraph::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let parse_err = |message: String| SchemaError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message,
        };
        let parts: Vec<&str> = line.split('\t').collect();
        if parts.len() != 3 {
            return Err(parse_err(format!(
                "expected 3 tab-separated fields, got {}",
                parts.len()
            )));
        }
        let predicate = SchemaPredicate::parse(parts[1])
            .ok_or_else(|| parse_err(format!("unsupported predicate {:?}", parts[1])))?;
        graph.add_edge(parts[0], predicate, parts[2]);
    }
    Ok(graph)
}
