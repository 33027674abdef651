//! Synthetic benchmark inputs: stochastic block models, geometric point
//! clouds and their k-nearest-neighbor graphs.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::graph::{GraphBuilder, SparseGraph, VertexSet};
use crate::{Error, Result};

/// Whole-graph resamples allowed before a block model gives up on drawing a
/// graph without isolated vertices.
pub const MAX_RESAMPLES: usize = 100;

/// A graph together with its planted partition.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledGraph {
    pub graph: SparseGraph,
    /// Ground-truth clusters, ordered by size and then by smallest member.
    pub truth: Vec<VertexSet>,
}

impl LabeledGraph {
    /// Checks that `truth` partitions the vertex set and sorts it.
    pub fn new(graph: SparseGraph, mut truth: Vec<VertexSet>) -> Result<Self> {
        let n = graph.n();
        let mut seen = vec![false; n];
        let mut count = 0;
        for c in &truth {
            c.check_range(n)?;
            if c.is_empty() {
                return Err(Error::Empty("ground-truth cluster"));
            }
            for v in c.iter() {
                if seen[v] {
                    return Err(Error::InvalidParameter(format!(
                        "vertex {v} is in two clusters"
                    )));
                }
                seen[v] = true;
                count += 1;
            }
        }
        if count != n {
            return Err(Error::InvalidParameter(format!(
                "clusters cover {count} of {n} vertices"
            )));
        }
        truth.sort_by_key(|c| (c.len(), c.as_slice()[0]));
        Ok(Self { graph, truth })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn k(&self) -> usize {
        self.truth.len()
    }

    pub fn cluster_sizes(&self) -> Vec<usize> {
        self.truth.iter().map(VertexSet::len).collect()
    }

    /// Cluster index of every vertex.
    pub fn labels(&self) -> Vec<usize> {
        labels_of(&self.truth, self.n())
    }

    /// Relabels vertex `v` as `perm[v]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        let graph = self.graph.permute(perm)?;
        let truth = self.truth.iter().map(|c| c.map(perm)).collect();
        Self::new(graph, truth)
    }
}

fn labels_of(truth: &[VertexSet], n: usize) -> Vec<usize> {
    let mut labels = vec![0; n];
    for (c, set) in truth.iter().enumerate() {
        for v in set.iter() {
            labels[v] = c;
        }
    }
    labels
}

/// Block sizes and the symmetric matrix of edge probabilities between them.
#[derive(Debug, Clone, PartialEq)]
pub struct SbmSpec {
    pub sizes: Vec<usize>,
    /// Row-major `k × k`.
    pub prob: Vec<f64>,
}

impl SbmSpec {
    pub fn new(sizes: Vec<usize>, prob: Vec<f64>) -> Result<Self> {
        let spec = Self { sizes, prob };
        spec.validate()?;
        Ok(spec)
    }

    /// `p` on the diagonal, `q` elsewhere.
    pub fn planted(sizes: Vec<usize>, p: f64, q: f64) -> Result<Self> {
        let k = sizes.len();
        let prob = (0..k * k)
            .map(|idx| if idx / k == idx % k { p } else { q })
            .collect();
        Self::new(sizes, prob)
    }

    pub fn k(&self) -> usize {
        self.sizes.len()
    }

    pub fn n(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn prob(&self, a: usize, b: usize) -> f64 {
        self.prob[a * self.k() + b]
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.k();
        if k == 0 {
            return Err(Error::Empty("block sizes"));
        }
        if self.sizes.contains(&0) {
            return Err(Error::InvalidParameter(
                "block sizes must be positive".into(),
            ));
        }
        if self.prob.len() != k * k {
            return Err(Error::DimensionMismatch {
                expected: k * k,
                found: self.prob.len(),
            });
        }
        for a in 0..k {
            for b in 0..k {
                let p = self.prob(a, b);
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidParameter(format!(
                        "probability {p} at ({a}, {b}) is outside [0, 1]"
                    )));
                }
                if p != self.prob(b, a) {
                    return Err(Error::InvalidParameter(format!(
                        "probability matrix is not symmetric at ({a}, {b})"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// `SSBM(n, k, p, q)`: `k` equal contiguous blocks.
pub fn gen_ssbm<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    p: f64,
    q: f64,
    rng: &mut R,
) -> Result<LabeledGraph> {
    if k == 0 || !n.is_multiple_of(k) {
        return Err(Error::NotDivisible { n, k });
    }
    if !(0.0 <= q && q < p && p <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= q < p <= 1, got p={p}, q={q}"
        )));
    }
    gen_sbm(&SbmSpec::planted(vec![n / k; k], p, q)?, rng)
}

/// Samples every unordered pair independently with its block probability,
/// redrawing the whole graph while any vertex is isolated.
pub fn gen_sbm<R: Rng + ?Sized>(spec: &SbmSpec, rng: &mut R) -> Result<LabeledGraph> {
    spec.validate()?;
    let n = spec.n();
    let mut block = Vec::with_capacity(n);
    let mut truth = Vec::with_capacity(spec.k());
    for (b, &size) in spec.sizes.iter().enumerate() {
        let start = block.len();
        block.resize(start + size, b);
        truth.push(VertexSet::from_sorted((start..start + size).collect()));
    }
    for _ in 0..MAX_RESAMPLES {
        let mut edges = Vec::new();
        let mut degree = vec![0usize; n];
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < spec.prob(block[u], block[v]) {
                    edges.push((u, v, 1.0));
                    degree[u] += 1;
                    degree[v] += 1;
                }
            }
        }
        if degree.contains(&0) {
            continue;
        }
        let graph = GraphBuilder::new(n).extend(edges).build()?;
        return LabeledGraph::new(graph, truth);
    }
    Err(Error::RetriesExhausted(MAX_RESAMPLES))
}

/// Points in `R^dim` stored row-major, with a cluster label per point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    labels: Vec<usize>,
}

impl PointCloud {
    pub fn new(dim: usize, coords: Vec<f64>, labels: Vec<usize>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "point dimension must be positive".into(),
            ));
        }
        if coords.len() != dim * labels.len() {
            return Err(Error::DimensionMismatch {
                expected: dim * labels.len(),
                found: coords.len(),
            });
        }
        Ok(Self {
            dim,
            coords,
            labels,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// `1 + max label`, or 0 when empty.
    pub fn num_clusters(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }

    /// Members of each label, indexed by label.
    pub fn truth(&self) -> Vec<VertexSet> {
        let mut members = vec![Vec::new(); self.num_clusters()];
        for (i, &l) in self.labels.iter().enumerate() {
            members[l].push(i);
        }
        members.into_iter().map(VertexSet::from_sorted).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Lines,
    Circles,
    Moons,
}

impl core::str::FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lines" => Ok(Shape::Lines),
            "circles" => Ok(Shape::Circles),
            "moons" => Ok(Shape::Moons),
            other => Err(Error::InvalidParameter(format!("unknown shape `{other}`"))),
        }
    }
}

impl core::fmt::Display for Shape {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Shape::Lines => "lines",
            Shape::Circles => "circles",
            Shape::Moons => "moons",
        })
    }
}

/// Shape constants. Each cluster is a curve in the plane; points are spread
/// uniformly along the curve parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricConfig {
    /// Ambient dimension; the plane occupies the first two coordinates.
    pub embed_dim: usize,
    /// Standard deviation of the Gaussian noise added to every coordinate.
    pub noise_sd: f64,
    /// Horizontal segments `[0, line_length] × {h}`.
    pub line_length: f64,
    pub line_heights: [f64; 3],
    pub circle_radii: [f64; 3],
    pub moon_radius: f64,
    /// Centers of the upper, lower and upper half-circles.
    pub moon_centers: [(f64, f64); 3],
}

impl Default for GeometricConfig {
    fn default() -> Self {
        Self {
            embed_dim: 100,
            noise_sd: 0.0,
            line_length: 5.0,
            line_heights: [0.0, 1.0, 2.0],
            circle_radii: [1.0, 2.0, 3.0],
            moon_radius: 1.0,
            moon_centers: [(0.0, 0.0), (1.0, 0.5), (2.0, 0.0)],
        }
    }
}

/// Three clusters of `per_cluster` points each, labeled 0, 1, 2 in
/// contiguous blocks.
pub fn gen_geometric<R: Rng + ?Sized>(
    shape: Shape,
    per_cluster: usize,
    cfg: &GeometricConfig,
    rng: &mut R,
) -> Result<PointCloud> {
    if per_cluster == 0 {
        return Err(Error::InvalidParameter("per_cluster must be >= 1".into()));
    }
    if cfg.embed_dim < 2 {
        return Err(Error::InvalidParameter("embed_dim must be >= 2".into()));
    }
    let noise = Normal::new(0.0, cfg.noise_sd)
        .map_err(|_| Error::InvalidParameter(format!("bad noise_sd {}", cfg.noise_sd)))?;
    let dim = cfg.embed_dim;
    let n = 3 * per_cluster;
    let mut coords = vec![0.0; n * dim];
    let mut labels = Vec::with_capacity(n);
    for c in 0..3 {
        for _ in 0..per_cluster {
            let u: f64 = rng.random();
            let (x, y) = match shape {
                Shape::Lines => (u * cfg.line_length, cfg.line_heights[c]),
                Shape::Circles => {
                    let theta = 2.0 * PI * u;
                    let r = cfg.circle_radii[c];
                    (r * libm::cos(theta), r * libm::sin(theta))
                }
                Shape::Moons => {
                    let theta = PI * u;
                    let (cx, cy) = cfg.moon_centers[c];
                    let r = cfg.moon_radius;
                    let dy = r * libm::sin(theta);
                    (
                        cx + r * libm::cos(theta),
                        if c == 1 { cy - dy } else { cy + dy },
                    )
                }
            };
            let i = labels.len();
            coords[i * dim] = x;
            coords[i * dim + 1] = y;
            labels.push(c);
        }
    }
    if cfg.noise_sd > 0.0 {
        for x in coords.iter_mut() {
            *x += noise.sample(rng);
        }
    }
    PointCloud::new(dim, coords, labels)
}

/// Bandwidth of the Gaussian kernel in [`knn_graph`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sigma {
    /// Mean distance from each point to its `k`-th nearest neighbor.
    Auto,
    Fixed(f64),
}

/// Symmetric k-nearest-neighbor graph: `i ~ j` when either point is among
/// the other's `k` nearest (self excluded, distance ties to the lower
/// index). Weights are `exp(−‖xᵢ−xⱼ‖²/σ²)`, or all 1 when `binary`.
pub fn knn_graph(pc: &PointCloud, k: usize, sigma: Sigma, binary: bool) -> Result<SparseGraph> {
    let n = pc.len();
    if k == 0 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    if n <= k {
        return Err(Error::InvalidParameter(format!(
            "need more than k={k} points, got {n}"
        )));
    }
    if let Sigma::Fixed(s) = sigma {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be positive, got {s}"
            )));
        }
    }

    // (min, max, squared distance)
    let mut pairs: Vec<(usize, usize, f64)> = Vec::with_capacity(n * k);
    let mut kth_sum = 0.0;
    let mut dist: Vec<(f64, usize)> = Vec::with_capacity(n);
    for i in 0..n {
        dist.clear();
        let xi = pc.point(i);
        for j in (0..n).filter(|&j| j != i) {
            let d2: f64 = xi
                .iter()
                .zip(pc.point(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            dist.push((d2, j));
        }
        let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        dist.select_nth_unstable_by(k - 1, cmp);
        let nearest = &mut dist[..k];
        nearest.sort_unstable_by(cmp);
        kth_sum += libm::sqrt(nearest[k - 1].0);
        for &(d2, j) in nearest.iter() {
            pairs.push((i.min(j), i.max(j), d2));
        }
    }
    pairs.sort_unstable_by_key(|a| (a.0, a.1));
    pairs.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1);

    let sigma = match sigma {
        Sigma::Auto => kth_sum / n as f64,
        Sigma::Fixed(s) => s,
    };
    let weight = |d2: f64| {
        if binary {
            1.0
        } else if sigma == 0.0 {
            // every point coincides with its k nearest neighbors
            1.0
        } else {
            libm::exp(-d2 / (sigma * sigma)).max(f64::MIN_POSITIVE)
        }
    };
    GraphBuilder::new(n)
        .extend(pairs.into_iter().map(|(i, j, d2)| (i, j, weight(d2))))
        .build()
}

/// The graph restricted to edges inside a single ground-truth cluster.
pub fn intra_subgraph(lg: &LabeledGraph) -> Result<SparseGraph> {
    let n = lg.n();
    let labels = lg.labels();
    let mut has_intra = vec![false; n];
    let mut edges = Vec::new();
    for (i, j, w) in lg.graph.edges() {
        if labels[i] == labels[j] {
            has_intra[i] = true;
            has_intra[j] = true;
            edges.push((i, j, w));
        }
    }
    if let Some(v) = has_intra.iter().position(|&h| !h) {
        return Err(Error::NoIntraEdges(v));
    }
    GraphBuilder::new(n)
        .allow_self_loops(true)
        .extend(edges)
        .build()
}
