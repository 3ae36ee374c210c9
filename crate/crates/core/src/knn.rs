//! Exact K-nearest-neighbor search and majority-vote classification.
//!
//! Search is a brute-force scan that keeps the `k` best candidates in a
//! bounded max-heap: `O(n·d)` time and `O(k)` extra space per query. Results
//! are ordered by `(distance, index)`, which makes them deterministic.
//!
//! Vote ties are resolved by the smaller summed distance among the tied
//! labels, then by the smaller label value.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Label;

/// Neighbor count used when none is given.
pub const DEFAULT_K: usize = 2;

/// Current version of the persisted model document.
pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    /// Fails on an empty vector or any non-finite coordinate.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() || !coords.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidFeature);
        }
        Ok(Self(coords))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

impl TryFrom<Vec<f64>> for FeatureVector {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Self::new(coords)
    }
}

impl From<FeatureVector> for Vec<f64> {
    fn from(v: FeatureVector) -> Self {
        v.0
    }
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Euclidean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
    pub label: Label,
}

/// `sqrt(Σ (aᵢ − bᵢ)²)`.
pub fn euclidean(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(euclidean_unchecked(a, b))
}

#[inline]
pub(crate) fn euclidean_unchecked(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Starting K for sweeps: `max(1, floor(sqrt(n)))`.
pub fn sqrt_k_heuristic(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    // correct float rounding near perfect squares
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r.max(1)
}

/// Retained training set plus the neighbor count used by [`KnnModel::classify`].
#[derive(Debug, Clone, PartialEq)]
pub struct KnnModel {
    dim: usize,
    points: Vec<f64>,
    labels: Vec<Label>,
    k: usize,
    metric: Metric,
}

impl KnnModel {
    pub fn new(points: Vec<FeatureVector>, labels: Vec<Label>, k: usize) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyTrainingSet);
        }
        if points.len() != labels.len() {
            return Err(Error::Model(format!(
                "{} points but {} labels",
                points.len(),
                labels.len()
            )));
        }
        let dim = points[0].dim();
        let mut flat = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                });
            }
            flat.extend_from_slice(p.as_slice());
        }
        if k == 0 || k > labels.len() {
            return Err(Error::InvalidK {
                k,
                max: labels.len(),
            });
        }
        Ok(Self {
            dim,
            points: flat,
            labels,
            k,
            metric: Metric::Euclidean,
        })
    }

    /// Builds a model from encoded rows.
    pub fn fit(rows: &[crate::LabeledRow], k: usize) -> Result<Self> {
        let points = rows.iter().map(|r| r.features.clone()).collect();
        let labels = rows.iter().map(|r| r.label).collect();
        Self::new(points, labels, k)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn point(&self, index: usize) -> &[f64] {
        &self.points[index * self.dim..(index + 1) * self.dim]
    }

    /// Copy of this model with a different neighbor count.
    pub fn with_k(&self, k: usize) -> Result<Self> {
        if k == 0 || k > self.len() {
            return Err(Error::InvalidK { k, max: self.len() });
        }
        Ok(Self { k, ..self.clone() })
    }

    pub fn nearest(&self, query: &[f64], k: usize) -> Result<Vec<Neighbor>> {
        if k == 0 || k > self.len() {
            return Err(Error::InvalidK { k, max: self.len() });
        }
        self.check_query(query)?;

        let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(k);
        for (index, point) in self.points.chunks_exact(self.dim).enumerate() {
            let candidate = Candidate {
                distance: euclidean_unchecked(point, query),
                index,
            };
            if heap.len() < k {
                heap.push(candidate);
            } else if let Some(mut worst) = heap.peek_mut() {
                if candidate < *worst {
                    *worst = candidate;
                }
            }
        }
        Ok(heap
            .into_sorted_vec()
            .into_iter()
            .map(|c| Neighbor {
                index: c.index,
                distance: c.distance,
                label: self.labels[c.index],
            })
            .collect())
    }

    pub fn classify(&self, query: &[f64]) -> Result<Label> {
        let neighbors = self.nearest(query, self.k)?;
        Ok(vote(&neighbors))
    }

    fn check_query(&self, query: &[f64]) -> Result<()> {
        if query.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: query.len(),
            });
        }
        if !query.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidFeature);
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&ModelDocument::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str::<ModelDocument>(text)?.try_into()
    }

    /// Writes the model document atomically.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        crate::persist::write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

pub fn nearest(model: &KnnModel, query: &[f64], k: usize) -> Result<Vec<Neighbor>> {
    model.nearest(query, k)
}

pub fn classify(model: &KnnModel, query: &[f64]) -> Result<Label> {
    model.classify(query)
}

/// Most votes, then smallest summed distance, then smallest label.
pub(crate) fn vote(neighbors: &[Neighbor]) -> Label {
    let mut tally: BTreeMap<Label, (usize, f64)> = BTreeMap::new();
    for n in neighbors {
        let entry = tally.entry(n.label).or_insert((0, 0.0));
        entry.0 += 1;
        entry.1 += n.distance;
    }
    // BTreeMap iterates labels ascending, so `min_by` keeps the smallest on full ties.
    tally
        .into_iter()
        .min_by(|(_, (ca, sa)), (_, (cb, sb))| cb.cmp(ca).then(sa.total_cmp(sb)))
        .map(|(label, _)| label)
        .expect("at least one neighbor")
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    distance: f64,
    index: usize,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.distance
            .total_cmp(&other.distance)
            .then(self.index.cmp(&other.index))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

/// On-disk form of a [`KnnModel`].
#[derive(Debug, Serialize, Deserialize)]
struct ModelDocument {
    version: u32,
    metric: Metric,
    k: usize,
    dim: usize,
    points: Vec<Vec<f64>>,
    labels: Vec<Label>,
}

impl From<&KnnModel> for ModelDocument {
    fn from(m: &KnnModel) -> Self {
        Self {
            version: MODEL_FORMAT_VERSION,
            metric: m.metric,
            k: m.k,
            dim: m.dim,
            points: m.points.chunks_exact(m.dim).map(<[f64]>::to_vec).collect(),
            labels: m.labels.clone(),
        }
    }
}

impl TryFrom<ModelDocument> for KnnModel {
    type Error = Error;

    fn try_from(doc: ModelDocument) -> Result<Self> {
        if doc.version != MODEL_FORMAT_VERSION {
            return Err(Error::Model(format!("unsupported version {}", doc.version)));
        }
        let points = doc
            .points
            .into_iter()
            .map(FeatureVector::new)
            .collect::<Result<Vec<_>>>()?;
        let model = KnnModel::new(points, doc.labels, doc.k)?;
        if model.dim != doc.dim {
            return Err(Error::DimensionMismatch {
                expected: doc.dim,
                found: model.dim,
            });
        }
        Ok(model)
    }
}
