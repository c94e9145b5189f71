use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::numkit::{Matrix, ParamStore};
use crate::rmpnet::{Model, ModelConfig};

use super::{EpochRecord, TrainConfig, TrainError};

pub const CHECKPOINT_FORMAT: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";
pub const PARAMS_FILE: &str = "params.bin";

/// A trained model plus what is needed to reuse it on another graph.
#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint {
    pub model: Model,
    pub vocab_digest: String,
    /// Seed for the vectors of relations without an embedding row.
    pub unseen_seed: u64,
    pub train_config: Option<TrainConfig>,
    pub history: Vec<EpochRecord>,
    /// Epoch whose parameters were kept; 0 means the initialization.
    pub best_epoch: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorEntry {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    /// Byte offset into the parameter blob.
    pub offset: u64,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    format_version: u32,
    model_config: ModelConfig,
    train_config: Option<TrainConfig>,
    vocab_digest: String,
    relations: Vec<String>,
    unseen_seed: u64,
    tensors: Vec<TensorEntry>,
    history: Vec<EpochRecord>,
    best_epoch: usize,
}

impl Checkpoint {
    /// Writes `manifest.json` and `params.bin` (row-major f32 LE) under `dir`.
    pub fn save(&self, dir: &Path) -> Result<(), TrainError> {
        fs::create_dir_all(dir).map_err(|e| TrainError::io(dir, e))?;
        let mut blob = Vec::new();
        let mut tensors = Vec::new();
        for (_, name, m) in self.model.params.iter() {
            tensors.push(TensorEntry {
                name: name.to_owned(),
                rows: m.rows(),
                cols: m.cols(),
                offset: blob.len() as u64,
            });
            for v in m.values() {
                blob.extend_from_slice(&(*v as f32).to_le_bytes());
            }
        }
        let manifest = Manifest {
            format_version: CHECKPOINT_FORMAT,
            model_config: self.model.config.clone(),
            train_config: self.train_config.clone(),
            vocab_digest: self.vocab_digest.clone(),
            relations: self.model.relations().to_vec(),
            unseen_seed: self.unseen_seed,
            tensors,
            history: self.history.clone(),
            best_epoch: self.best_epoch,
        };
        let path = dir.join(MANIFEST_FILE);
        let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        fs::write(&path, json).map_err(|e| TrainError::io(&path, e))?;
        let path = dir.join(PARAMS_FILE);
        fs::write(&path, blob).map_err(|e| TrainError::io(&path, e))
    }

    pub fn load(dir: &Path) -> Result<Self, TrainError> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(|e| TrainError::io(&path, e))?;
        let bad = |message: String| TrainError::Format {
            path: path.clone(),
            message,
        };
        let manifest: Manifest = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
        if manifest.format_version != CHECKPOINT_FORMAT {
            return Err(bad(format!(
                "format version {} (expected {CHECKPOINT_FORMAT})",
                manifest.format_version
            )));
        }
        let blob_path = dir.join(PARAMS_FILE);
        let blob = fs::read(&blob_path).map_err(|e| TrainError::io(&blob_path, e))?;
        let mut params = ParamStore::new();
        for t in &manifest.tensors {
            let len = t.rows * t.cols;
            let start = t.offset as usize;
            let end = start + 4 * len;
            let bytes = blob
                .get(start..end)
                .ok_or_else(|| bad(format!("tensor {} runs past the end of {PARAMS_FILE}", t.name)))?;
            let values = bytes
                .chunks_exact(4)
                .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
                .collect();
            let m = Matrix::from_vec(t.rows, t.cols, values).map_err(|e| bad(format!("tensor {}: {e}", t.name)))?;
            params.register(t.name.clone(), m);
        }
        let model = Model::from_store(manifest.model_config, params, manifest.relations)?;
        Ok(Self {
            model,
            vocab_digest: manifest.vocab_digest,
            unseen_seed: manifest.unseen_seed,
            train_config: manifest.train_config,
            history: manifest.history,
            best_epoch: manifest.best_epoch,
        })
    }

    /// Copy with every parameter rounded to stored precision.
    pub fn rounded(&self) -> Self {
        let mut out = self.clone();
        for m in out.model.params.tensors_mut() {
            for v in m.values_mut() {
                *v = *v as f32 as f64;
            }
        }
        out
    }

    pub fn best_valid_auc_pr(&self) -> Option<f64> {
        self.history.iter().filter_map(|r| r.valid_auc_pr).reduce(f64::max)
    }
}
