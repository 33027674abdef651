//! Re-scoring a saved assignment against ground-truth labels.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use cslce_core::metrics::{jaccard, mean_accuracy, misclassified, sym_diff_ratio};
use cslce_core::VertexSet;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterScore {
    pub label: usize,
    pub size: usize,
    pub found: usize,
    pub jaccard: f64,
    pub accuracy: f64,
    pub sym_diff_ratio: f64,
    pub misclassified: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    pub clusters: Vec<ClusterScore>,
    pub mean_accuracy: f64,
}

fn group(pairs: &[(usize, usize)]) -> BTreeMap<usize, VertexSet> {
    let mut by_label: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(v, l) in pairs {
        by_label.entry(l).or_default().push(v);
    }
    by_label
        .into_iter()
        .map(|(l, vs)| (l, VertexSet::from_unsorted(vs)))
        .collect()
}

/// Found cluster `c` is every vertex the assignment labels `c`, compared to
/// the truth cluster with the same label.
pub fn score_assignment(
    truth: &[(usize, usize)],
    assignment: &[(usize, usize)],
) -> Result<ScoreReport, String> {
    let truth = group(truth);
    if truth.is_empty() {
        return Err("no ground-truth labels".into());
    }
    let found = group(assignment);
    let empty = VertexSet::new();
    let mut clusters = Vec::with_capacity(truth.len());
    let mut matched = Vec::with_capacity(truth.len());
    for (&label, t) in &truth {
        let f = found.get(&label).unwrap_or(&empty);
        clusters.push(ClusterScore {
            label,
            size: t.len(),
            found: f.len(),
            jaccard: jaccard(t, f),
            accuracy: f.intersection_len(t) as f64 / t.len() as f64,
            sym_diff_ratio: sym_diff_ratio(t, f).map_err(|e| e.to_string())?,
            misclassified: misclassified(t, f),
        });
        matched.push(f.clone());
    }
    let truth_sets: Vec<VertexSet> = truth.into_values().collect();
    let mean_accuracy = mean_accuracy(&matched, &truth_sets).map_err(|e| e.to_string())?;
    Ok(ScoreReport {
        clusters,
        mean_accuracy,
    })
}

impl ScoreReport {
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("label,size,found,jaccard,accuracy,sym_diff_ratio,misclassified\n");
        for c in &self.clusters {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                c.label, c.size, c.found, c.jaccard, c.accuracy, c.sym_diff_ratio, c.misclassified
            )
            .unwrap();
        }
        writeln!(out, "# mean_accuracy = {}", self.mean_accuracy).unwrap();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_and_swapped() {
        let truth = [(0, 0), (1, 0), (2, 1), (3, 1)];
        let r = score_assignment(&truth, &truth).unwrap();
        assert_eq!(r.mean_accuracy, 1.0);
        assert!(r.clusters.iter().all(|c| c.jaccard == 1.0));

        let swapped = [(0, 1), (1, 1), (2, 0), (3, 0)];
        let r = score_assignment(&truth, &swapped).unwrap();
        assert_eq!(r.mean_accuracy, 0.0);
        assert_eq!(r.clusters[0].misclassified, 4);
    }

    #[test]
    fn missing_vertices_count_as_misses() {
        let truth = [(0, 0), (1, 0), (2, 1), (3, 1)];
        let r = score_assignment(&truth, &[(0, 0), (2, 1), (3, 1)]).unwrap();
        assert_eq!(r.clusters[0].accuracy, 0.5);
        assert_eq!(r.mean_accuracy, 0.75);
        assert!(score_assignment(&[], &truth).is_err());
    }
}
