//! Accuracy measurement and K sweeps for the edge classifier.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::SplitDataset;
use crate::error::{Error, Result};
use crate::knn::{sqrt_k_heuristic, KnnModel};
use crate::Label;

/// Upper cap on the default sweep range.
pub const DEFAULT_SWEEP_CAP: usize = 15;

/// Lower end of the default sweep range.
pub const DEFAULT_SWEEP_MIN: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KOutcome {
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationEntry {
    pub k: usize,
    pub correct: usize,
    pub total: usize,
    /// Percentage in `[0, 100]`.
    pub accuracy: f64,
    /// `100 - accuracy`.
    pub error_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub entries: Vec<EvaluationEntry>,
    pub chosen_k: usize,
    pub seed: u64,
    pub split_ratio: f64,
}

/// `count(prediction == truth) * 100 / len(truth)`.
pub fn accuracy(predictions: &[Label], truth: &[Label]) -> Result<f64> {
    if predictions.len() != truth.len() {
        return Err(Error::LengthMismatch {
            predictions: predictions.len(),
            truth: truth.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::EmptyPredictions);
    }
    let count = predictions.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(percent(count, truth.len()))
}

fn percent(count: usize, total: usize) -> f64 {
    count as f64 * 100.0 / total as f64
}

/// Trains on `split.train` with `k` neighbors and scores `split.test`.
pub fn evaluate_k(split: &SplitDataset, k: usize) -> Result<KOutcome> {
    let model = KnnModel::fit(&split.train, k)?;
    if split.test.is_empty() {
        return Err(Error::EmptyPredictions);
    }
    let predictions = split
        .test
        .par_iter()
        .map(|row| model.classify(row.features.as_slice()))
        .collect::<Result<Vec<_>>>()?;
    let correct = predictions
        .iter()
        .zip(&split.test)
        .filter(|(p, row)| **p == row.label)
        .count();
    let total = split.test.len();
    Ok(KOutcome {
        correct,
        total,
        accuracy: percent(correct, total),
    })
}

/// Evaluates every `k` in `kmin..=kmax` and picks the minimum-error one.
pub fn sweep(split: &SplitDataset, kmin: usize, kmax: usize) -> Result<EvaluationReport> {
    let max = split.train.len();
    if kmin == 0 || kmin > kmax || kmax > max {
        return Err(Error::InvalidRange { kmin, kmax, max });
    }
    let entries = (kmin..=kmax)
        .into_par_iter()
        .map(|k| {
            evaluate_k(split, k).map(|o| EvaluationEntry {
                k,
                correct: o.correct,
                total: o.total,
                accuracy: o.accuracy,
                error_rate: 100.0 - o.accuracy,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let chosen_k = select_k(&entries).expect("range is non-empty");
    Ok(EvaluationReport {
        entries,
        chosen_k,
        seed: split.seed,
        split_ratio: split.ratio,
    })
}

/// `k` of the minimum-error entry; the smallest such `k` on ties.
pub fn select_k(entries: &[EvaluationEntry]) -> Option<usize> {
    entries
        .iter()
        .min_by(|a, b| a.error_rate.total_cmp(&b.error_rate).then(a.k.cmp(&b.k)))
        .map(|e| e.k)
}

/// `2..=min(15, floor(sqrt(train_len)))`, clamped into `1..=train_len`.
pub fn default_k_range(train_len: usize) -> (usize, usize) {
    let kmax = DEFAULT_SWEEP_CAP.min(sqrt_k_heuristic(train_len)).min(train_len.max(1));
    let kmin = DEFAULT_SWEEP_MIN.min(kmax);
    (kmin, kmax)
}

impl EvaluationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Aligned two-column table, one row per `k`, accuracies to three decimals.
    pub fn to_table(&self) -> String {
        const K_HEADER: &str = "K VALUE";
        const ACC_HEADER: &str = "ACCURACY OBTAINED";
        let mut out = String::new();
        let _ = writeln!(out, "{K_HEADER:<9}{ACC_HEADER}");
        for e in &self.entries {
            let _ = writeln!(out, "{:<9}{:.3}%", e.k, e.accuracy);
        }
        out
    }
}
