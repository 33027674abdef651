//! Local cluster extraction on graphs via compressive sensing.
//!
//! Given a sparse undirected graph and a handful of seed vertices known to
//! belong to a target cluster, [`cslce::extract_cluster`] recovers the rest of
//! the cluster by solving a sparsity-constrained least-squares problem on the
//! random-walk Laplacian `L = I - D^{-1} A` with Subspace Pursuit.
//!
//! The pipeline, for seeds `Γ` and an estimated cluster size `n̂`:
//!
//! ```text
//! v  = (A D^{-1})^t D 1_Γ              diffuse seed mass for t steps
//! Ω  = top_{⌈(1+ε) n̂⌉} |v|              candidate set
//! T  = γ|Ω| smallest of |L_Ω^T| |L 1_Ω|   removal set (likely inside the cluster)
//! x# = argmin ‖L_{V\T} x − L 1_{V\T}‖   s.t. ‖x‖₀ ≤ (1−γ) n̂
//! C# = {i : x#_i > R} ∪ T
//! ```
//!
//! The crate is `no_std` and needs only `alloc`. Everything that touches
//! files, clocks or threads lives in the `cslce-bench` companion crate.
//!
//! ```
//! use cslce_core::{build_graph, cslce::{extract_cluster, CslceParams}, VertexSet};
//!
//! // two disjoint triangles
//! let g = build_graph(6, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0),
//!                          (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)]).unwrap();
//! let mut params = CslceParams::new(3);
//! params.epsilon = 0.3;
//! params.gamma = 0.1;
//! let res = extract_cluster(&g, &VertexSet::from_unsorted([0]), &params).unwrap();
//! assert_eq!(res.cluster.as_slice(), &[0, 1, 2]);
//! ```

#![no_std]

extern crate alloc;

pub mod cslce;
pub mod dense;
mod error;
pub mod graph;
pub mod laplacian;
pub mod metrics;
pub mod solver;
pub mod synth;

pub use error::{Error, Result};
pub use graph::{build_graph, GraphBuilder, SparseGraph, VertexSet};
pub use laplacian::{random_walk_laplacian, ColumnSubmatrix, LaplacianOperator};
