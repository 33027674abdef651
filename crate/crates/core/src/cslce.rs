//! Compressive-sensing local cluster extraction.
//!
//! [`extract_cluster`] runs the seven-step pipeline for a single target
//! cluster; [`extract_all_clusters`] peels clusters off one at a time.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{SparseGraph, VertexSet};
use crate::laplacian::{random_walk_laplacian, LaplacianOperator};
use crate::solver::{default_iterations, subspace_pursuit, SpConfig, SpResult};
use crate::{Error, Result};

/// Slack for float products that should land on an integer, e.g. `1.1 * 200`.
const ROUNDING_SLACK: f64 = 1e-9;

fn floor_count(x: f64) -> usize {
    libm::floor(x + ROUNDING_SLACK) as usize
}

fn ceil_count(x: f64) -> usize {
    libm::ceil(x - ROUNDING_SLACK) as usize
}

/// Tunables of the extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct CslceParams {
    /// Estimated size of the target cluster.
    pub n_hat: usize,
    /// Candidate-set inflation: `|Ω| = ⌈(1+ε) n̂⌉`. In `(0, 1)`.
    pub epsilon: f64,
    /// Number of random-walk steps from the seeds.
    pub t: usize,
    /// Fraction of `Ω` moved into the removal set, in `[0.1, 0.5]`. Also sets
    /// the sparsity budget `⌊(1−γ) n̂⌋`.
    pub gamma: f64,
    /// Rejection threshold `R` in `[0.1, 0.9]`; vertex `i` joins the cluster
    /// when `x#_i > R`.
    pub r_threshold: f64,
    /// Union the seeds into the returned cluster.
    pub include_seeds_in_output: bool,
    pub sp: SpConfig,
}

impl CslceParams {
    pub const DEFAULT_EPSILON: f64 = 0.1;
    pub const DEFAULT_T: usize = 3;
    pub const DEFAULT_GAMMA: f64 = 0.4;
    pub const DEFAULT_R: f64 = 0.5;

    pub fn new(n_hat: usize) -> Self {
        Self {
            n_hat,
            epsilon: Self::DEFAULT_EPSILON,
            t: Self::DEFAULT_T,
            gamma: Self::DEFAULT_GAMMA,
            r_threshold: Self::DEFAULT_R,
            include_seeds_in_output: true,
            sp: SpConfig::default(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::InvalidParameter(msg));
        if self.n_hat == 0 || self.n_hat > n {
            return bad(format!("n_hat must be in 1..={n}, got {}", self.n_hat));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad(format!("epsilon must be in (0, 1), got {}", self.epsilon));
        }
        if self.t == 0 {
            return bad("t must be >= 1".into());
        }
        if !(0.1..=0.5).contains(&self.gamma) {
            return bad(format!("gamma must be in [0.1, 0.5], got {}", self.gamma));
        }
        if !(0.1..=0.9).contains(&self.r_threshold) {
            return bad(format!(
                "r_threshold must be in [0.1, 0.9], got {}",
                self.r_threshold
            ));
        }
        Ok(())
    }

    /// `max(1, ⌊(1−γ) n̂⌋)`
    pub fn sparsity(&self) -> usize {
        sparsity_budget(self.n_hat, self.gamma)
    }
}

pub fn sparsity_budget(n_hat: usize, gamma: f64) -> usize {
    floor_count((1.0 - gamma) * n_hat as f64).max(1)
}

/// `v = (A D^{-1})^t D 1_Γ`, by `t` sparse matrix-vector products.
///
/// `A D^{-1}` is column-stochastic, so the total mass `Σ_{i∈Γ} d_i` is
/// preserved at every step.
pub fn diffuse_seeds(g: &SparseGraph, seeds: &VertexSet, t: usize) -> Result<Vec<f64>> {
    if seeds.is_empty() {
        return Err(Error::Empty("seed set"));
    }
    seeds.check_range(g.n())?;
    let n = g.n();
    let d = g.degrees();
    let mut v = vec![0.0; n];
    for i in seeds.iter() {
        v[i] = d[i];
    }
    let mut scaled = vec![0.0; n];
    let mut next = vec![0.0; n];
    for _ in 0..t {
        for i in 0..n {
            scaled[i] = v[i] / d[i];
        }
        g.adjacency_matvec(&scaled, &mut next);
        core::mem::swap(&mut v, &mut next);
    }
    Ok(v)
}

/// `Ω`: the `min(n, ⌈(1+ε) n̂⌉)` entries of `v` with largest magnitude.
pub fn candidate_set(v: &[f64], n_hat: usize, epsilon: f64) -> VertexSet {
    let size = ceil_count((1.0 + epsilon) * n_hat as f64).min(v.len());
    crate::solver::top_k_magnitude(v, size)
}

/// `T`: the `max(1, ⌊γ |Ω|⌋)` members of `Ω` with the smallest score
/// `(|L_Ω^T| |L 1_Ω|)_j`, ties broken towards the lower vertex index.
pub fn removal_set(l: &LaplacianOperator<'_>, omega: &VertexSet, gamma: f64) -> Result<VertexSet> {
    if omega.is_empty() {
        return Err(Error::Empty("candidate set"));
    }
    omega.check_range(l.n())?;
    let w: Vec<f64> = l
        .indicator_image(omega)
        .into_iter()
        .map(libm::fabs)
        .collect();
    let scores: Vec<f64> = omega
        .iter()
        .map(|j| {
            let mut acc = 0.0;
            l.for_each_in_column(j, |i, v| acc += libm::fabs(v) * w[i]);
            acc
        })
        .collect();
    let size = floor_count(gamma * omega.len() as f64).clamp(1, omega.len());
    let mut order: Vec<usize> = (0..omega.len()).collect();
    // omega is sorted, so local order is global order
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(a.cmp(&b)));
    Ok(VertexSet::from_unsorted(
        order[..size].iter().map(|&k| omega.as_slice()[k]),
    ))
}

/// Sparse solution `x#` of the removal-set problem, indexed over `V \ T`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseIndicator {
    /// Global vertex for each local coordinate (that is, `V \ T`).
    pub columns: VertexSet,
    pub sp: SpResult,
}

impl SparseIndicator {
    /// `x#` scattered to length `n`, zero on `T`.
    pub fn to_global(&self, n: usize) -> Vec<f64> {
        let mut out = vec![0.0; n];
        for (k, v) in self.columns.iter().enumerate() {
            out[v] = self.sp.solution[k];
        }
        out
    }

    /// Nonzero entries as `(global vertex, value)`.
    pub fn nonzeros(&self) -> Vec<(usize, f64)> {
        self.sp
            .support
            .iter()
            .map(|k| (self.columns.as_slice()[k], self.sp.solution[k]))
            .filter(|&(_, x)| x != 0.0)
            .collect()
    }
}

/// Solves `argmin ‖L_{V\T} x − L 1_{V\T}‖₂ s.t. ‖x‖₀ ≤ max(1, ⌊(1−γ) n̂⌋)`
/// with Subspace Pursuit under a `⌈log₂ n⌉` iteration budget (unless `sp`
/// sets its own).
pub fn solve_sparse_indicator(
    l: &LaplacianOperator<'_>,
    removal: &VertexSet,
    n_hat: usize,
    gamma: f64,
    sp: &SpConfig,
) -> Result<SparseIndicator> {
    let n = l.n();
    removal.check_range(n)?;
    if removal.len() >= n {
        return Err(Error::InvalidParameter(
            "removal set must be a proper subset of V".into(),
        ));
    }
    let columns = removal.complement(n);
    let sensing = l.column_submatrix(columns.clone())?;
    let y = l.complement_indicator_image(removal);
    let cfg = SpConfig {
        max_iter: Some(sp.max_iter.unwrap_or_else(|| default_iterations(n))),
        ..sp.clone()
    };
    let sp = subspace_pursuit(&sensing, &y, sparsity_budget(n_hat, gamma), &cfg)?;
    Ok(SparseIndicator { columns, sp })
}

/// `{i : v_i > r}`
pub fn threshold_support(v: &[f64], r: f64) -> VertexSet {
    VertexSet::from_sorted(
        v.iter()
            .enumerate()
            .filter_map(|(i, &x)| (x > r).then_some(i))
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterResult {
    /// The extracted cluster `C#`.
    pub cluster: VertexSet,
    /// Candidate set `Ω`.
    pub omega: VertexSet,
    /// Removal set `T ⊆ Ω`.
    pub removal: VertexSet,
    /// Vertices of `V \ T` with `x#_i > R`.
    pub accepted: VertexSet,
    pub x_sharp: SparseIndicator,
    /// `|C#|` is off from `n̂` by more than a factor of two.
    pub size_warning: bool,
}

/// Extracts the cluster containing `seeds`.
pub fn extract_cluster(
    g: &SparseGraph,
    seeds: &VertexSet,
    params: &CslceParams,
) -> Result<ClusterResult> {
    let n = g.n();
    params.validate(n)?;
    let v = diffuse_seeds(g, seeds, params.t)?;
    let omega = candidate_set(&v, params.n_hat, params.epsilon);
    let l = random_walk_laplacian(g);
    let removal = removal_set(&l, &omega, params.gamma)?;
    let x_sharp = solve_sparse_indicator(&l, &removal, params.n_hat, params.gamma, &params.sp)?;

    let local = threshold_support(&x_sharp.sp.solution, params.r_threshold);
    let accepted = VertexSet::from_sorted(
        local
            .iter()
            .map(|k| x_sharp.columns.as_slice()[k])
            .collect(),
    );
    let mut cluster = accepted.union(&removal);
    if params.include_seeds_in_output {
        cluster = cluster.union(seeds);
    }
    let size = cluster.len();
    let size_warning = size > 2 * params.n_hat || 2 * size < params.n_hat;
    Ok(ClusterResult {
        cluster,
        omega,
        removal,
        accepted,
        x_sharp,
        size_warning,
    })
}

/// Outcome of [`extract_all_clusters`].
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    /// One cluster per seed set, in the order the seed sets were given.
    pub clusters: Vec<VertexSet>,
    /// Vertices that became isolated in a residual graph and were assigned
    /// to the cluster of their heaviest original neighbor.
    pub reassigned: Vec<usize>,
}

/// Extracts one cluster per seed set, in order, each from the graph left
/// after deleting the clusters already found. The last cluster receives
/// every remaining vertex.
///
/// `params[i]` drives extraction `i`; `params.len()` must equal
/// `seed_sets.len()` (the entry for the last cluster is unused). `n̂` is
/// clamped to the size of the residual graph. Seeds already claimed by an
/// earlier cluster are dropped; a cluster left without seeds comes back
/// empty.
pub fn extract_all_clusters(
    g: &SparseGraph,
    seed_sets: &[VertexSet],
    params: &[CslceParams],
) -> Result<Partition> {
    let n = g.n();
    let k = seed_sets.len();
    if k == 0 {
        return Err(Error::Empty("seed set list"));
    }
    if params.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            found: params.len(),
        });
    }
    let mut owner = vec![usize::MAX; n];
    for (c, seeds) in seed_sets.iter().enumerate() {
        seeds.check_range(n)?;
        for s in seeds.iter() {
            if owner[s] != usize::MAX {
                return Err(Error::InvalidParameter(format!(
                    "vertex {s} appears in seed sets {} and {c}",
                    owner[s]
                )));
            }
            owner[s] = c;
        }
    }

    let mut assigned = vec![usize::MAX; n];
    let mut reassigned = Vec::new();
    let mut remaining = VertexSet::full(n);

    for c in 0..k - 1 {
        if remaining.is_empty() {
            break;
        }
        let seeds_local = VertexSet::from_sorted(
            seed_sets[c]
                .iter()
                .filter_map(|s| remaining.position(s))
                .collect(),
        );
        if seeds_local.is_empty() {
            continue;
        }
        let sub = g.induced_subgraph(&remaining)?;
        let mut p = params[c].clone();
        p.n_hat = p.n_hat.clamp(1, sub.n());
        let res = extract_cluster(&sub, &seeds_local, &p)?;
        for v in res.cluster.iter() {
            assigned[remaining.as_slice()[v]] = c;
        }
        remaining = VertexSet::from_sorted(
            remaining
                .iter()
                .filter(|&v| assigned[v] == usize::MAX)
                .collect(),
        );

        // vertices stranded without residual edges go to their heaviest
        // original neighbor's cluster
        let stranded: Vec<usize> = remaining
            .iter()
            .filter(|&v| {
                g.neighbors(v)
                    .all(|(u, _)| u == v || assigned[u] != usize::MAX)
            })
            .collect();
        if !stranded.is_empty() {
            for &v in &stranded {
                let mut best: Option<(usize, f64)> = None;
                for (u, w) in g.neighbors(v) {
                    if u != v && assigned[u] != usize::MAX && best.is_none_or(|(_, bw)| w > bw) {
                        best = Some((u, w));
                    }
                }
                if let Some((u, _)) = best {
                    assigned[v] = assigned[u];
                    reassigned.push(v);
                }
            }
            remaining = VertexSet::from_sorted(
                remaining
                    .iter()
                    .filter(|&v| assigned[v] == usize::MAX)
                    .collect(),
            );
        }
    }
    for v in remaining.iter() {
        assigned[v] = k - 1;
    }

    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (v, &c) in assigned.iter().enumerate() {
        members[c].push(v);
    }
    Ok(Partition {
        clusters: members.into_iter().map(VertexSet::from_sorted).collect(),
        reassigned,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::build_graph;

    fn two_triangles() -> SparseGraph {
        build_graph(
            6,
            &[
                (0, 1, 1.0),
                (1, 2, 1.0),
                (0, 2, 1.0),
                (3, 4, 1.0),
                (4, 5, 1.0),
                (3, 5, 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn diffusion_depth_zero_is_degree_weighted_indicator() {
        let g = build_graph(3, &[(0, 1, 2.0), (1, 2, 1.0)]).unwrap();
        let v = diffuse_seeds(&g, &VertexSet::from_unsorted([1]), 0).unwrap();
        assert_eq!(v, vec![0.0, 3.0, 0.0]);
        assert!(diffuse_seeds(&g, &VertexSet::new(), 2).is_err());
        assert!(diffuse_seeds(&g, &VertexSet::from_unsorted([3]), 2).is_err());
    }

    #[test]
    fn candidate_sizes() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(candidate_set(&v, 200, 0.1).len(), 220);
        assert_eq!(candidate_set(&v[..5], 5, 0.1).len(), 5);
        let omega = candidate_set(&v, 10, 0.5);
        assert!(omega.contains(999));
    }

    #[test]
    fn removal_size_arithmetic() {
        assert_eq!(floor_count(0.4 * 220.0), 88);
        assert_eq!(sparsity_budget(200, 0.4), 120);
        assert_eq!(sparsity_budget(3, 0.4), 1);
        assert_eq!(sparsity_budget(4, 0.4), 2);
        assert_eq!(sparsity_budget(1, 0.5), 1);
    }

    #[test]
    fn removal_on_exact_component_takes_lowest_index() {
        let g = two_triangles();
        let l = random_walk_laplacian(&g);
        let t = removal_set(&l, &VertexSet::from_unsorted([0, 1, 2]), 0.4).unwrap();
        assert_eq!(t.as_slice(), &[0]);
        assert!(removal_set(&l, &VertexSet::new(), 0.4).is_err());
    }

    #[test]
    fn threshold_is_strict() {
        let w = threshold_support(&[0.5, 0.51, 1.0, -3.0, 0.49], 0.5);
        assert_eq!(w.as_slice(), &[1, 2]);
    }

    #[test]
    fn params_validation() {
        let p = CslceParams::new(3);
        assert!(p.validate(6).is_ok());
        assert!(p.validate(2).is_err());
        let mut q = p.clone();
        q.gamma = 0.6;
        assert!(q.validate(6).is_err());
        q = p.clone();
        q.r_threshold = 0.95;
        assert!(q.validate(6).is_err());
        q = p.clone();
        q.epsilon = 1.0;
        assert!(q.validate(6).is_err());
        q = p;
        q.t = 0;
        assert!(q.validate(6).is_err());
    }

    #[test]
    fn all_clusters_single_seed_set_returns_everything() {
        let g = two_triangles();
        let part =
            extract_all_clusters(&g, &[VertexSet::from_unsorted([4])], &[CslceParams::new(3)])
                .unwrap();
        assert_eq!(part.clusters, vec![VertexSet::full(6)]);
    }

    #[test]
    fn all_clusters_rejects_overlapping_seeds() {
        let g = two_triangles();
        let s = VertexSet::from_unsorted([1]);
        let p = CslceParams::new(3);
        assert!(extract_all_clusters(&g, &[s.clone(), s], &[p.clone(), p]).is_err());
    }
}
