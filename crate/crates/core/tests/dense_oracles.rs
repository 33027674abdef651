//! Checks against independent dense linear algebra (nalgebra) on small
//! instances.

use approx::assert_abs_diff_eq;
use cslce_core::cslce::{
    diffuse_seeds, extract_all_clusters, extract_cluster, removal_set, solve_sparse_indicator,
    CslceParams,
};
use cslce_core::dense::DenseMatrix;
use cslce_core::solver::{
    restricted_least_squares, rip_constant_bruteforce, subspace_pursuit, SpConfig,
};
use cslce_core::synth::{gen_ssbm, intra_subgraph};
use cslce_core::{build_graph, random_walk_laplacian, SparseGraph, VertexSet};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn adjacency(g: &SparseGraph) -> DMatrix<f64> {
    let n = g.n();
    let mut a = DMatrix::zeros(n, n);
    for (i, j, w) in g.edges() {
        a[(i, j)] = w;
        a[(j, i)] = w;
    }
    a
}

/// `I − D⁻¹A` from the edge list alone.
fn dense_laplacian(g: &SparseGraph) -> DMatrix<f64> {
    let a = adjacency(g);
    let n = a.nrows();
    let mut l = DMatrix::identity(n, n);
    for i in 0..n {
        let d: f64 = a.row(i).sum();
        for j in 0..n {
            l[(i, j)] -= a[(i, j)] / d;
        }
    }
    l
}

fn to_nalgebra(m: &DenseMatrix) -> DMatrix<f64> {
    DMatrix::from_column_slice(m.rows(), m.cols(), m.data())
}

fn gaussian(rows: usize, cols: usize, scale: f64, rng: &mut impl Rng) -> DenseMatrix {
    let data = (0..rows * cols)
        .map(|_| StandardNormal.sample(rng))
        .map(|x: f64| x * scale)
        .collect();
    DenseMatrix::from_col_major(rows, cols, data)
}

/// Least-squares residual of `y` on the columns `cols` of `a`.
fn ls_residual(a: &DMatrix<f64>, cols: &[usize], y: &DVector<f64>) -> f64 {
    let sub = a.select_columns(cols);
    let z = sub.clone().svd(true, true).solve(y, 1e-12).unwrap();
    (sub * z - y).norm()
}

fn two_triangles(bridge: bool) -> SparseGraph {
    let mut e = vec![
        (0, 1, 1.0),
        (0, 2, 1.0),
        (1, 2, 1.0),
        (3, 4, 1.0),
        (3, 5, 1.0),
        (4, 5, 1.0),
    ];
    if bridge {
        e.push((2, 3, 1.0));
    }
    build_graph(6, &e).unwrap()
}

fn random_connected_graph(n: usize, extra: usize, rng: &mut impl Rng) -> SparseGraph {
    let mut e: Vec<_> = (1..n)
        .map(|i| (rng.random_range(0..i), i, rng.random_range(0.5..2.0)))
        .collect();
    for _ in 0..extra {
        let (i, j) = (rng.random_range(0..n), rng.random_range(0..n));
        if i != j {
            e.push((i, j, rng.random_range(0.5..2.0)));
        }
    }
    build_graph(n, &e).unwrap()
}

#[test]
fn laplacian_matches_dense_construction() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10 {
        let g = random_connected_graph(25, 40, &mut rng);
        let l = random_walk_laplacian(&g);
        let oracle = dense_laplacian(&g);
        let ours = to_nalgebra(&l.to_dense().unwrap());
        assert!((ours - &oracle).abs().max() < 1e-14);

        let x: Vec<f64> = (0..25).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut lx = vec![0.0; 25];
        let mut ltx = vec![0.0; 25];
        l.apply(&x, &mut lx);
        l.apply_transpose(&x, &mut ltx);
        let xv = DVector::from_vec(x);
        assert!((DVector::from_vec(lx) - &oracle * &xv).amax() < 1e-12);
        assert!((DVector::from_vec(ltx) - oracle.transpose() * &xv).amax() < 1e-12);
    }
}

#[test]
fn indicator_image_equals_negated_complement_image() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let g = random_connected_graph(30, 50, &mut rng);
    let l = random_walk_laplacian(&g);
    let oracle = dense_laplacian(&g);
    let t = VertexSet::from_unsorted([3, 7, 8, 21]);
    let direct = &oracle * DVector::from_vec(t.complement(30).indicator(30));
    let fast = l.complement_indicator_image(&t);
    for i in 0..30 {
        assert_abs_diff_eq!(fast[i], direct[i], epsilon = 1e-12);
    }
}

#[test]
fn diffusion_matches_dense_walk() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = random_connected_graph(20, 30, &mut rng);
    let a = adjacency(&g);
    let d: Vec<f64> = (0..20).map(|i| a.row(i).sum()).collect();
    let p = &a * DMatrix::from_diagonal(&DVector::from_iterator(20, d.iter().map(|x| 1.0 / x)));
    let seeds = VertexSet::from_unsorted([2, 11]);
    let mut v = DVector::zeros(20);
    for s in seeds.iter() {
        v[s] = d[s];
    }
    for t in 0..6 {
        let ours = diffuse_seeds(&g, &seeds, t).unwrap();
        for i in 0..20 {
            assert_abs_diff_eq!(ours[i], v[i], epsilon = 1e-12);
        }
        v = &p * v;
    }
}

#[test]
fn diffusion_stays_inside_the_seed_component() {
    let g = two_triangles(false);
    for t in 0..8 {
        let v = diffuse_seeds(&g, &VertexSet::from_unsorted([0]), t).unwrap();
        assert!(v[3..].iter().all(|&x| x == 0.0));
        assert_abs_diff_eq!(v.iter().sum::<f64>(), 2.0, epsilon = 1e-12);
    }
}

#[test]
fn removal_scores_near_a_bridge() {
    let g = two_triangles(true);
    let l = random_walk_laplacian(&g);
    let oracle = dense_laplacian(&g);
    let omega = VertexSet::from_unsorted([0, 1, 2, 3]);
    let w = (&oracle * DVector::from_vec(omega.indicator(6))).abs();
    let scores: Vec<f64> = omega
        .iter()
        .map(|j| oracle.column(j).abs().dot(&w))
        .collect();
    // vertices 2 and 3 touch the bridge
    assert_abs_diff_eq!(scores[0], 0.0);
    assert_abs_diff_eq!(scores[1], 0.0);
    assert_abs_diff_eq!(scores[2], 2.0 / 9.0, epsilon = 1e-12);
    assert_abs_diff_eq!(scores[3], 7.0 / 6.0, epsilon = 1e-12);

    let t = removal_set(&l, &omega, 0.25).unwrap();
    assert_eq!(t.as_slice(), &[0]);
    let t = removal_set(&l, &omega, 0.5).unwrap();
    assert_eq!(t.as_slice(), &[0, 1]);
    assert!(!t.contains(3));
}

#[test]
fn sparse_indicator_on_disjoint_triangles() {
    let g = two_triangles(false);
    let l = random_walk_laplacian(&g);
    let t = VertexSet::from_unsorted([0]);
    let oracle = dense_laplacian(&g);
    let cols = [1, 2, 3, 4, 5];
    let sensing = oracle.select_columns(&cols);
    let y = &oracle * DVector::from_vec(t.complement(6).indicator(6));

    // n̂ = 4: s = 2 carries 1_{C1 \ T}, which has zero residual
    let x = solve_sparse_indicator(&l, &t, 4, 0.4, &SpConfig::default()).unwrap();
    assert_eq!(x.sp.support.len(), 2);
    let global = x.to_global(6);
    let expected = [0.0, 1.0, 1.0, 0.0, 0.0, 0.0];
    for i in 0..6 {
        assert_abs_diff_eq!(global[i], expected[i], epsilon = 1e-10);
    }
    assert!(ls_residual(&sensing, &[0, 1], &y) < 1e-12);

    // n̂ = 3: s = 1 is too small; the best one-column fit leaves a residual
    let x = solve_sparse_indicator(&l, &t, 3, 0.4, &SpConfig::default()).unwrap();
    assert_eq!(x.nonzeros().len(), 1);
    let best = (0..5)
        .map(|c| ls_residual(&sensing, &[c], &y))
        .fold(f64::INFINITY, f64::min);
    assert!(best > 0.1);
    assert_abs_diff_eq!(x.sp.residual(), best, epsilon = 1e-10);
}

#[test]
fn pipeline_on_disjoint_triangles() {
    let g = two_triangles(false);
    let seeds = VertexSet::from_unsorted([0]);
    let mut params = CslceParams::new(3);
    params.epsilon = 0.3;
    params.t = 3;
    params.gamma = 0.1;
    let r = extract_cluster(&g, &seeds, &params).unwrap();
    assert_eq!(r.cluster.as_slice(), &[0, 1, 2]);
    assert_eq!(r.omega.as_slice(), &[0, 1, 2, 3]);
    assert_eq!(r.removal.as_slice(), &[0]);

    // γ = 0.34 leaves s = 1 < |C1 \ T| and the extraction comes up short
    params.gamma = 0.34;
    let r = extract_cluster(&g, &seeds, &params).unwrap();
    assert_eq!(r.x_sharp.sp.support.len(), 1);
    assert_ne!(r.cluster.as_slice(), &[0, 1, 2]);
}

#[test]
fn three_triangles_partitioned_exactly() {
    let mut e = Vec::new();
    for b in 0..3 {
        let o = 3 * b;
        e.extend([(o, o + 1, 1.0), (o, o + 2, 1.0), (o + 1, o + 2, 1.0)]);
    }
    let g = build_graph(9, &e).unwrap();
    let seeds: Vec<_> = [0, 4, 8].map(|s| VertexSet::from_unsorted([s])).to_vec();
    let mut params = CslceParams::new(3);
    params.gamma = 0.1;
    let p = extract_all_clusters(&g, &seeds, &vec![params; 3]).unwrap();
    let truth: Vec<_> = (0..3)
        .map(|b| VertexSet::from_unsorted(3 * b..3 * b + 3))
        .collect();
    assert_eq!(p.clusters, truth);
    assert!(p.reassigned.is_empty());
}

#[test]
fn intra_laplacian_kernel_has_dimension_k() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    for (n, k) in [(30, 2), (45, 3), (60, 4), (60, 3)] {
        for _ in 0..5 {
            let lg = gen_ssbm(n, k, 0.5, 0.1, &mut rng).unwrap();
            let gin = intra_subgraph(&lg).unwrap();
            // the block count equals the kernel dimension only for connected blocks
            if gin.connected_components().len() != k {
                continue;
            }
            let sv = dense_laplacian(&gin).singular_values();
            let zeros = sv.iter().filter(|&&s| s < 1e-9).count();
            assert_eq!(zeros, k);
            checked += 1;
        }
    }
    assert!(checked >= 15);
}

#[test]
fn rip_matches_singular_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let a = gaussian(10, 15, 1.0 / 10f64.sqrt(), &mut rng);
        let na = to_nalgebra(&a);
        for s in 1..=3 {
            let mut oracle: f64 = 0.0;
            for combo in combinations(15, s) {
                let sv = na.select_columns(&combo).singular_values();
                let hi = sv.max();
                let lo = sv.min();
                oracle = oracle.max(1.0 - lo * lo).max(hi * hi - 1.0);
            }
            assert_abs_diff_eq!(
                rip_constant_bruteforce(&a, s).unwrap(),
                oracle,
                epsilon = 1e-10
            );
        }
    }
}

fn combinations(n: usize, s: usize) -> Vec<Vec<usize>> {
    if s == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for last in s - 1..n {
        for mut c in combinations(last, s - 1) {
            c.push(last);
            out.push(c);
        }
    }
    out
}

#[test]
fn restricted_least_squares_matches_pseudoinverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..20 {
        let mut a = gaussian(12, 6, 1.0, &mut rng);
        // duplicate a column to force rank deficiency
        let c0 = a.col(0).to_vec();
        a.col_mut(4).copy_from_slice(&c0);
        let y: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
        let support = VertexSet::from_unsorted([0, 2, 4, 5]);
        let z = restricted_least_squares(&a, &support, &y).unwrap();
        let sub = to_nalgebra(&a).select_columns(support.as_slice());
        let oracle = sub.pseudo_inverse(1e-10).unwrap() * DVector::from_vec(y);
        for (i, zi) in z.iter().enumerate() {
            assert_abs_diff_eq!(*zi, oracle[i], epsilon = 1e-9);
        }
    }
}

#[test]
fn full_support_pursuit_is_least_squares() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let a = gaussian(10, 6, 1.0, &mut rng);
        let y: Vec<f64> = (0..10).map(|_| rng.random_range(-1.0..1.0)).collect();
        let r = subspace_pursuit(&a, &y, 6, &SpConfig::default()).unwrap();
        let oracle = to_nalgebra(&a)
            .svd(true, true)
            .solve(&DVector::from_vec(y), 1e-14)
            .unwrap();
        for i in 0..6 {
            assert_abs_diff_eq!(r.solution[i], oracle[i], epsilon = 1e-10);
        }
    }
}

#[test]
fn pursuit_close_to_exhaustive_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let supports = combinations(12, 2);
    let mut good = 0;
    for _ in 0..100 {
        let a = gaussian(8, 12, 1.0, &mut rng);
        let y: Vec<f64> = (0..8).map(|_| StandardNormal.sample(&mut rng)).collect();
        let na = to_nalgebra(&a);
        let yv = DVector::from_vec(y.clone());
        let best = supports
            .iter()
            .map(|c| ls_residual(&na, c, &yv))
            .fold(f64::INFINITY, f64::min);
        let r = subspace_pursuit(&a, &y, 2, &SpConfig::default()).unwrap();
        if r.residual() <= 1.5 * best {
            good += 1;
        }
    }
    assert!(good >= 90, "{good}/100 within 1.5x of optimum");
}
