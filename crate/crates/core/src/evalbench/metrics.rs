use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::EvalError;

/// Average precision over scores ranked high to low; ties keep input order.
pub fn auc_pr(scores: &[f64], labels: &[bool]) -> Result<f64, EvalError> {
    if scores.len() != labels.len() {
        return Err(EvalError::LengthMismatch {
            scores: scores.len(),
            labels: labels.len(),
        });
    }
    if let Some(i) = scores.iter().position(|s| !s.is_finite()) {
        return Err(EvalError::NonFinite(i));
    }
    let positives = labels.iter().filter(|&&l| l).count();
    if positives == 0 {
        return Err(EvalError::NoPositives);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    let mut hits = 0usize;
    let mut sum = 0.0;
    for (rank, &i) in order.iter().enumerate() {
        if labels[i] {
            hits += 1;
            sum += hits as f64 / (rank + 1) as f64;
        }
    }
    Ok(sum / positives as f64)
}

/// 1 + candidates scoring above the truth + candidates tying it.
pub fn pessimistic_rank(truth: f64, candidates: &[f64]) -> usize {
    1 + candidates.iter().filter(|&&c| c >= truth).count()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub auc_pr: f64,
    pub scores: Vec<f64>,
    pub labels: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankingResult {
    /// 1-based rank per (query, side).
    pub ranks: Vec<usize>,
    /// Negatives actually drawn per (query, side).
    pub candidates: Vec<usize>,
    pub mrr: f64,
    pub hits: BTreeMap<usize, f64>,
}

impl RankingResult {
    pub fn from_ranks(ranks: Vec<usize>, candidates: Vec<usize>, hits_at: &[usize]) -> Result<Self, EvalError> {
        if ranks.is_empty() {
            return Err(EvalError::NoQueries);
        }
        if ranks.len() != candidates.len() {
            return Err(EvalError::LengthMismatch {
                scores: ranks.len(),
                labels: candidates.len(),
            });
        }
        let n = ranks.len() as f64;
        let mrr = ranks.iter().map(|&r| 1.0 / r as f64).sum::<f64>() / n;
        let hits = hits_at
            .iter()
            .map(|&k| (k, ranks.iter().filter(|&&r| r <= k).count() as f64 / n))
            .collect();
        Ok(Self {
            ranks,
            candidates,
            mrr,
            hits,
        })
    }

    pub fn hits_at(&self, n: usize) -> Option<f64> {
        self.hits.get(&n).copied()
    }

    /// Coarse bounds every ranking run must satisfy.
    pub fn is_consistent(&self) -> bool {
        let ranks_ok = self
            .ranks
            .iter()
            .zip(&self.candidates)
            .all(|(&r, &c)| r >= 1 && r <= c + 1);
        let monotone = self.hits.values().zip(self.hits.values().skip(1)).all(|(a, b)| a <= b);
        let mrr_ok = self.mrr > 0.0 && self.mrr <= 1.0;
        let bound_ok = match self.hits_at(1) {
            Some(h1) => self.mrr <= h1 + (1.0 - h1) + 1e-12,
            None => true,
        };
        ranks_ok && monotone && mrr_ok && bound_ok
    }
}
