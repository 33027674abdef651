//! Scores for extracted clusters against ground truth.

use crate::graph::VertexSet;
use crate::{Error, Result};

/// `|a ∩ b| / |a ∪ b|`, with two empty sets scoring 1.
pub fn jaccard(a: &VertexSet, b: &VertexSet) -> f64 {
    let inter = a.intersection_len(b);
    let union = a.len() + b.len() - inter;
    if union == 0 {
        return 1.0;
    }
    inter as f64 / union as f64
}

/// `|truth △ found|`: vertices put on the wrong side of the cluster boundary.
pub fn misclassified(truth: &VertexSet, found: &VertexSet) -> usize {
    truth.symmetric_difference_len(found)
}

/// `|truth △ found| / |truth|`
pub fn sym_diff_ratio(truth: &VertexSet, found: &VertexSet) -> Result<f64> {
    if truth.is_empty() {
        return Err(Error::Empty("ground-truth cluster"));
    }
    Ok(misclassified(truth, found) as f64 / truth.len() as f64)
}

/// Recall `|Cᵢ ∩ Cᵢ#| / |Cᵢ|` averaged over clusters, with `found[i]`
/// matched to `truth[i]`.
pub fn mean_accuracy(found: &[VertexSet], truth: &[VertexSet]) -> Result<f64> {
    if found.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            found: found.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::Empty("cluster list"));
    }
    let mut total = 0.0;
    for (f, t) in found.iter().zip(truth) {
        if t.is_empty() {
            return Err(Error::Empty("ground-truth cluster"));
        }
        total += f.intersection_len(t) as f64 / t.len() as f64;
    }
    Ok(total / truth.len() as f64)
}

/// Scores of one extracted cluster.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialScore {
    pub jaccard: f64,
    pub sym_diff_ratio: f64,
    pub misclassified: usize,
    /// Seconds; left at zero by [`TrialScore::score`], filled in by callers
    /// that keep time.
    pub wall_time: f64,
}

impl TrialScore {
    pub fn score(truth: &VertexSet, found: &VertexSet) -> Result<Self> {
        Ok(Self {
            jaccard: jaccard(truth, found),
            sym_diff_ratio: sym_diff_ratio(truth, found)?,
            misclassified: misclassified(truth, found),
            wall_time: 0.0,
        })
    }
}
