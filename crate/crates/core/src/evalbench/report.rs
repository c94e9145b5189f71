use std::fs;
use std::path::Path;

use serde::Serialize;

use super::EvalError;

/// Ordered `metric → value` pairs plus free-form JSON details.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub metrics: Vec<(String, f64)>,
    pub details: serde_json::Map<String, serde_json::Value>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn metric(&mut self, name: impl Into<String>, value: f64) -> &mut Self {
        self.metrics.push((name.into(), value));
        self
    }

    pub fn detail(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).expect("detail serializes");
        self.details.insert(key.to_owned(), v);
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.metrics.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    /// `metric<TAB>value` lines.
    pub fn to_tsv(&self) -> String {
        self.metrics.iter().map(|(n, v)| format!("{n}\t{v:.6}\n")).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let metrics: serde_json::Map<_, _> = self
            .metrics
            .iter()
            .map(|(n, v)| (n.clone(), serde_json::json!(v)))
            .collect();
        serde_json::json!({ "metrics": metrics, "details": self.details })
    }

    /// Writes `<stem>.tsv` and `<stem>.json` into `dir`.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<(), EvalError> {
        fs::create_dir_all(dir).map_err(|e| EvalError::io(dir, e))?;
        let path = dir.join(format!("{stem}.tsv"));
        fs::write(&path, self.to_tsv()).map_err(|e| EvalError::io(&path, e))?;
        let path = dir.join(format!("{stem}.json"));
        let json = serde_json::to_string_pretty(&self.to_json()).expect("report serializes");
        fs::write(&path, json).map_err(|e| EvalError::io(&path, e))
    }
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
