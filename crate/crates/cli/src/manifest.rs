use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const RUN_MANIFEST: &str = "run_manifest.json";

/// Record of one CLI invocation, written next to its outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub flags: serde_json::Value,
    pub seed: Option<u64>,
    pub started_at: u64,
    pub finished_at: u64,
    /// Input path → sha256 over its content (directories: every file,
    /// sorted by relative path).
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<String>,
}

pub fn now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

impl RunManifest {
    pub fn new(command: &str, flags: impl Serialize, seed: Option<u64>) -> Self {
        Self {
            command: command.to_owned(),
            flags: serde_json::to_value(flags).expect("flags serialize"),
            seed,
            started_at: now(),
            finished_at: 0,
            inputs: BTreeMap::new(),
            outputs: Vec::new(),
        }
    }

    pub fn input(&mut self, path: &Path) -> std::io::Result<()> {
        let digest =
            content_digest(path).map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
        self.inputs.insert(path.display().to_string(), digest);
        Ok(())
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.display().to_string());
    }

    pub fn write(mut self, dir: &Path) -> std::io::Result<PathBuf> {
        self.finished_at = now();
        fs::create_dir_all(dir)?;
        let path = dir.join(RUN_MANIFEST);
        fs::write(&path, serde_json::to_string_pretty(&self).expect("manifest serializes"))?;
        Ok(path)
    }
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect_files(root, &path, out)?;
        } else if path.file_name().is_some_and(|n| n != RUN_MANIFEST) {
            out.push(path.strip_prefix(root).unwrap_or(&path).to_path_buf());
        }
    }
    Ok(())
}

pub fn content_digest(path: &Path) -> std::io::Result<String> {
    let mut h = Sha256::new();
    if path.is_dir() {
        let mut files = Vec::new();
        collect_files(path, path, &mut files)?;
        files.sort();
        for rel in files {
            let bytes = fs::read(path.join(&rel))?;
            h.update(rel.to_string_lossy().as_bytes());
            h.update([0]);
            h.update((bytes.len() as u64).to_le_bytes());
            h.update(&bytes);
        }
    } else {
        h.update(fs::read(path)?);
    }
    Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
}
