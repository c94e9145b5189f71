use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::SchemaError;

pub const VECTORS_MANIFEST: &str = "schema_vectors.json";
pub const VECTORS_BLOB: &str = "schema_vectors.bin";

/// Relation name → semantic vector, all of one width.
#[derive(Clone, Debug, PartialEq)]
pub struct SchemaVectors {
    dim: usize,
    names: Vec<String>,
    index: HashMap<String, usize>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    format_version: u32,
    dim: usize,
    /// `(relation name, byte offset into the blob)`.
    entries: Vec<(String, u64)>,
}

impl SchemaVectors {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            names: Vec::new(),
            index: HashMap::new(),
            values: Vec::new(),
        }
    }

    /// Inserts or overwrites `name`.
    pub fn insert(&mut self, name: &str, vector: &[f64]) -> Result<(), SchemaError> {
        if vector.len() != self.dim {
            return Err(SchemaError::Dimension {
                expected: self.dim,
                actual: vector.len(),
            });
        }
        if let Some(&row) = self.index.get(name) {
            self.values[row * self.dim..(row + 1) * self.dim].copy_from_slice(vector);
        } else {
            self.index.insert(name.to_owned(), self.names.len());
            self.names.push(name.to_owned());
            self.values.extend_from_slice(vector);
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.index
            .get(name)
            .map(|&row| &self.values[row * self.dim..(row + 1) * self.dim])
    }

    /// Writes the JSON manifest and the little-endian `f32` blob into `dir`.
    pub fn save(&self, dir: &Path) -> Result<(), SchemaError> {
        fs::create_dir_all(dir).map_err(|e| SchemaError::io(dir, e))?;
        let mut blob = Vec::with_capacity(self.values.len() * 4);
        let mut entries = Vec::with_capacity(self.names.len());
        for (row, name) in self.names.iter().enumerate() {
            entries.push((name.clone(), blob.len() as u64));
            for v in &self.values[row * self.dim..(row + 1) * self.dim] {
                blob.extend_from_slice(&(*v as f32).to_le_bytes());
            }
        }
        let manifest = Manifest {
            format_version: 1,
            dim: self.dim,
            entries,
        };
        let path = dir.join(VECTORS_MANIFEST);
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        fs::write(&path, json).map_err(|e| SchemaError::io(&path, e))?;
        let path = dir.join(VECTORS_BLOB);
        fs::write(&path, blob).map_err(|e| SchemaError::io(&path, e))
    }

    pub fn load(dir: &Path) -> Result<Self, SchemaError> {
        let path = dir.join(VECTORS_MANIFEST);
        let text = fs::read_to_string(&path).map_err(|e| SchemaError::io(&path, e))?;
        let manifest: Manifest = serde_json::from_str(&text).map_err(|e| SchemaError::Format(e.to_string()))?;
        let path = dir.join(VECTORS_BLOB);
        let blob = fs::read(&path).map_err(|e| SchemaError::io(&path, e))?;
        let mut out = Self::new(manifest.dim);
        let width = manifest.dim * 4;
        for (name, offset) in manifest.entries {
            let start = offset as usize;
            let bytes = blob
                .get(start..start + width)
                .ok_or_else(|| SchemaError::Format(format!("vector for {name:?} runs past the blob")))?;
            let v: Vec<f64> = bytes
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
                .collect();
            out.insert(&name, &v)?;
        }
        Ok(out)
    }
}
