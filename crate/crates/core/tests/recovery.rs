//! Exact recovery when the clusters are disconnected from each other.

use cslce_core::cslce::{extract_cluster, solve_sparse_indicator, CslceParams};
use cslce_core::metrics::{jaccard, sym_diff_ratio};
use cslce_core::solver::SpConfig;
use cslce_core::synth::{gen_sbm, LabeledGraph, SbmSpec};
use cslce_core::{random_walk_laplacian, VertexSet};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Disconnected blocks (q = 0) with 2 or 3 clusters of 20..=100 vertices,
/// complete or with p = 0.9, redrawn until every block is connected.
fn disconnected_instance(rng: &mut ChaCha8Rng) -> LabeledGraph {
    let k = rng.random_range(2..=3);
    let sizes: Vec<usize> = (0..k).map(|_| rng.random_range(20..=100)).collect();
    let p = *[1.0, 0.9].choose(rng).unwrap();
    let spec = SbmSpec::planted(sizes, p, 0.0).unwrap();
    loop {
        let lg = gen_sbm(&spec, rng).unwrap();
        if lg.graph.connected_components().len() == k {
            return lg;
        }
    }
}

#[test]
fn indicator_of_target_minus_removal_is_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let lg = disconnected_instance(&mut rng);
        let target = &lg.truth[rng.random_range(0..lg.k())];
        let n1 = target.len();
        // |T| = n1 - ⌊0.6 n1⌋ leaves exactly the sparsity budget s = ⌊0.6 n1⌋
        let s = (0.6 * n1 as f64).floor() as usize;
        let t =
            VertexSet::from_unsorted(target.as_slice().choose_multiple(&mut rng, n1 - s).copied());
        let l = random_walk_laplacian(&lg.graph);
        let x = solve_sparse_indicator(&l, &t, n1, 0.4, &SpConfig::default()).unwrap();
        assert!(x.sp.residual() < 1e-8);
        let global = x.to_global(lg.n());
        let expected = target.difference(&t).indicator(lg.n());
        for (a, b) in global.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-8);
        }
    }
}

#[test]
fn extraction_is_exact_on_disconnected_blocks() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..50 {
        let lg = disconnected_instance(&mut rng);
        let target = &lg.truth[0];
        let seeds =
            VertexSet::from_unsorted(target.as_slice().choose_multiple(&mut rng, 3).copied());
        let params = CslceParams::new(target.len());
        let r = extract_cluster(&lg.graph, &seeds, &params).unwrap();
        assert_eq!(jaccard(&r.cluster, target), 1.0);
        assert_eq!(sym_diff_ratio(target, &r.cluster).unwrap(), 0.0);
    }
}
