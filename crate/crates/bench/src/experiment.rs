//! Monte-Carlo trial loop and result rows.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use cslce_core::cslce::{extract_all_clusters, extract_cluster, CslceParams};
use cslce_core::metrics::{jaccard, misclassified, sym_diff_ratio};
use cslce_core::synth::{
    gen_geometric, gen_sbm, gen_ssbm, knn_graph, LabeledGraph, PointCloud, SbmSpec,
};
use cslce_core::VertexSet;

use crate::config::{Dataset, ExperimentConfig, KnnSpec, SeedRule, Target};
use crate::error::{BenchError, Result};
use crate::io::{load_edge_list, load_labels, load_point_csv, partition_from_labels};

/// Uniform sample without replacement from `cluster`.
pub fn sample_seeds<R: Rng + ?Sized>(
    cluster: &VertexSet,
    rule: SeedRule,
    rng: &mut R,
) -> std::result::Result<VertexSet, String> {
    let size = cluster.len();
    let count = match rule {
        SeedRule::Count(c) => c,
        SeedRule::Ratio(r) => ((r * size as f64 - 1e-9).ceil() as usize).max(1),
    };
    if count == 0 || count > size {
        return Err(format!(
            "cannot draw {count} seeds from a cluster of {size}"
        ));
    }
    Ok(VertexSet::from_unsorted(
        index::sample(rng, size, count)
            .iter()
            .map(|i| cluster.as_slice()[i]),
    ))
}

/// The random stream for one trial: fixed by `rng_seed` and the trial index
/// alone, so trials can run in any order.
pub fn trial_rng(rng_seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(trial as u64);
    rng
}

fn labeled_from_points(pc: &PointCloud, knn: &KnnSpec) -> cslce_core::Result<LabeledGraph> {
    let g = knn_graph(pc, knn.k, knn.sigma, knn.binary)?;
    LabeledGraph::new(
        g,
        pc.truth().into_iter().filter(|c| !c.is_empty()).collect(),
    )
}

/// Input data, loaded once for file datasets.
enum Source<'a> {
    Fixed(Arc<LabeledGraph>),
    Generated(&'a Dataset),
}

impl Source<'_> {
    fn draw(&self, rng: &mut ChaCha8Rng) -> cslce_core::Result<LabeledGraph> {
        match self {
            Source::Fixed(lg) => Ok((**lg).clone()),
            Source::Generated(d) => Ok(generate_dataset(d, rng)?
                .expect("file datasets are loaded up front")
                .0),
        }
    }
}

/// Draws a generator dataset, with the point cloud behind it for the
/// geometric shapes. `None` for file datasets.
pub fn generate_dataset<R: Rng + ?Sized>(
    dataset: &Dataset,
    rng: &mut R,
) -> cslce_core::Result<Option<(LabeledGraph, Option<PointCloud>)>> {
    Ok(Some(match dataset {
        Dataset::Ssbm { n, k, p, q } => (gen_ssbm(*n, *k, *p, *q, rng)?, None),
        Dataset::Sbm { sizes, p, q } => (
            gen_sbm(&SbmSpec::planted(sizes.clone(), *p, *q)?, rng)?,
            None,
        ),
        Dataset::Geometric {
            shape,
            per_cluster,
            geometry,
            knn,
        } => {
            let pc = gen_geometric(*shape, *per_cluster, geometry, rng)?;
            (labeled_from_points(&pc, knn)?, Some(pc))
        }
        Dataset::EdgeList { .. } | Dataset::Points { .. } => return Ok(None),
    }))
}

/// Loads file-backed datasets; generator datasets are drawn per trial.
pub fn load_dataset(dataset: &Dataset) -> Result<Option<LabeledGraph>> {
    match dataset {
        Dataset::EdgeList {
            edges,
            labels,
            options,
        } => {
            let lg = load_edge_list(edges, options)?;
            let pairs = load_labels(labels)?;
            let truth = partition_from_labels(&lg, &pairs).map_err(|msg| BenchError::Parse {
                path: labels.clone(),
                line: 0,
                msg,
            })?;
            Ok(Some(LabeledGraph::new(lg.graph, truth)?))
        }
        Dataset::Points {
            points,
            header,
            knn,
        } => {
            let pc = load_point_csv(points, *header)?;
            Ok(Some(labeled_from_points(&pc, knn)?))
        }
        _ => Ok(None),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Cluster(usize),
    /// Aggregate over the clusters of one trial.
    Trial,
    Failed,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub trial: usize,
    pub kind: RowKind,
    pub n: usize,
    pub k: usize,
    pub n_hat: Option<usize>,
    pub seeds: usize,
    pub jaccard: f64,
    /// Recall of this cluster on cluster rows, mean recall on trial rows.
    pub mean_accuracy: f64,
    pub sym_diff_ratio: f64,
    pub misclassified: usize,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: usize,
    pub rows: Vec<ResultRow>,
    pub error: Option<String>,
}

impl TrialOutcome {
    pub fn summary(&self) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.kind == RowKind::Trial)
    }
}

fn n_hat(scale: f64, size: usize, n: usize) -> usize {
    ((scale * size as f64).round() as usize).clamp(1, n)
}

fn run_trial(cfg: &ExperimentConfig, source: &Source<'_>, trial: usize) -> TrialOutcome {
    let mut rng = trial_rng(cfg.rng_seed, trial);
    match try_trial(cfg, source, trial, &mut rng) {
        Ok(rows) => TrialOutcome {
            trial,
            rows,
            error: None,
        },
        Err(msg) => TrialOutcome {
            trial,
            rows: vec![ResultRow {
                trial,
                kind: RowKind::Failed,
                n: 0,
                k: 0,
                n_hat: None,
                seeds: 0,
                jaccard: f64::NAN,
                mean_accuracy: f64::NAN,
                sym_diff_ratio: f64::NAN,
                misclassified: 0,
                wall_time_s: 0.0,
            }],
            error: Some(msg),
        },
    }
}

fn try_trial(
    cfg: &ExperimentConfig,
    source: &Source<'_>,
    trial: usize,
    rng: &mut ChaCha8Rng,
) -> std::result::Result<Vec<ResultRow>, String> {
    let lg = source.draw(rng).map_err(|e| e.to_string())?;
    let n = lg.n();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let lg = lg.permute(&perm).map_err(|e| e.to_string())?;
    let k = lg.k();

    let targets: Vec<usize> = match cfg.target {
        Target::Smallest => vec![0],
        Target::Largest => vec![k - 1],
        Target::All => (0..k).collect(),
    };
    let seed_sets = targets
        .iter()
        .map(|&c| sample_seeds(&lg.truth[c], cfg.seeds, rng))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let params: Vec<CslceParams> = targets
        .iter()
        .map(|&c| CslceParams {
            n_hat: n_hat(cfg.n_hat_scale, lg.truth[c].len(), n),
            ..cfg.params.clone()
        })
        .collect();

    let start = Instant::now();
    let found: Vec<VertexSet> = match cfg.target {
        Target::All => {
            extract_all_clusters(&lg.graph, &seed_sets, &params)
                .map_err(|e| e.to_string())?
                .clusters
        }
        _ => vec![
            extract_cluster(&lg.graph, &seed_sets[0], &params[0])
                .map_err(|e| e.to_string())?
                .cluster,
        ],
    };
    let elapsed = if cfg.timing {
        start.elapsed().as_secs_f64()
    } else {
        0.0
    };

    let mut rows = Vec::with_capacity(targets.len() + 1);
    for (i, &c) in targets.iter().enumerate() {
        let truth = &lg.truth[c];
        let f = &found[i];
        rows.push(ResultRow {
            trial,
            kind: RowKind::Cluster(c),
            n,
            k,
            n_hat: Some(params[i].n_hat),
            seeds: seed_sets[i].len(),
            jaccard: jaccard(truth, f),
            mean_accuracy: f.intersection_len(truth) as f64 / truth.len() as f64,
            sym_diff_ratio: sym_diff_ratio(truth, f).map_err(|e| e.to_string())?,
            misclassified: misclassified(truth, f),
            wall_time_s: elapsed,
        });
    }
    let m = rows.len() as f64;
    let mean = |f: fn(&ResultRow) -> f64| rows.iter().map(f).sum::<f64>() / m;
    let summary = ResultRow {
        trial,
        kind: RowKind::Trial,
        n,
        k,
        n_hat: None,
        seeds: rows.iter().map(|r| r.seeds).sum(),
        jaccard: mean(|r| r.jaccard),
        mean_accuracy: mean(|r| r.mean_accuracy),
        sym_diff_ratio: mean(|r| r.sym_diff_ratio),
        misclassified: rows.iter().map(|r| r.misclassified).sum(),
        wall_time_s: elapsed,
    };
    rows.push(summary);
    Ok(rows)
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stat {
    pub mean: f64,
    pub sd: f64,
}

impl Stat {
    pub fn of(xs: &[f64]) -> Stat {
        let n = xs.len() as f64;
        if xs.is_empty() {
            return Stat {
                mean: f64::NAN,
                sd: f64::NAN,
            };
        }
        let mean = xs.iter().sum::<f64>() / n;
        let sd = if xs.len() < 2 {
            0.0
        } else {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Stat { mean, sd }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub completed: usize,
    pub failed: usize,
    pub jaccard: Stat,
    pub mean_accuracy: Stat,
    pub sym_diff_ratio: Stat,
    pub misclassified: Stat,
    pub wall_time_s: Stat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub config: ExperimentConfig,
    pub trials: Vec<TrialOutcome>,
}

impl Report {
    /// Statistics over the per-trial summary rows of completed trials.
    pub fn summary(&self) -> Summary {
        let rows: Vec<&ResultRow> = self
            .trials
            .iter()
            .filter_map(TrialOutcome::summary)
            .collect();
        let stat =
            |f: fn(&ResultRow) -> f64| Stat::of(&rows.iter().map(|r| f(r)).collect::<Vec<_>>());
        Summary {
            completed: rows.len(),
            failed: self.trials.len() - rows.len(),
            jaccard: stat(|r| r.jaccard),
            mean_accuracy: stat(|r| r.mean_accuracy),
            sym_diff_ratio: stat(|r| r.sym_diff_ratio),
            misclassified: stat(|r| r.misclassified as f64),
            wall_time_s: stat(|r| r.wall_time_s),
        }
    }

    /// Config echo, header, one row per cluster and per trial, then `mean`
    /// and `sd` rows and a comment per failed trial.
    pub fn to_csv(&self) -> String {
        let p = &self.config.params;
        let mut out = self.config.settings.echo();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "trial",
            "cluster_index",
            "n",
            "k",
            "n_hat",
            "epsilon",
            "t",
            "gamma",
            "r_threshold",
            "seeds",
            "jaccard",
            "mean_accuracy",
            "sym_diff_ratio",
            "misclassified",
            "wall_time_s",
        ])
        .expect("in-memory write");
        let fixed = [
            p.epsilon.to_string(),
            p.t.to_string(),
            p.gamma.to_string(),
            p.r_threshold.to_string(),
        ];
        for outcome in &self.trials {
            for r in &outcome.rows {
                let cluster = match r.kind {
                    RowKind::Cluster(c) => c.to_string(),
                    RowKind::Trial => "trial".into(),
                    RowKind::Failed => "failed".into(),
                };
                let mut rec = vec![
                    r.trial.to_string(),
                    cluster,
                    r.n.to_string(),
                    r.k.to_string(),
                    r.n_hat.map_or(String::new(), |v| v.to_string()),
                ];
                rec.extend(fixed.iter().cloned());
                rec.extend([
                    r.seeds.to_string(),
                    r.jaccard.to_string(),
                    r.mean_accuracy.to_string(),
                    r.sym_diff_ratio.to_string(),
                    r.misclassified.to_string(),
                    r.wall_time_s.to_string(),
                ]);
                w.write_record(&rec).expect("in-memory write");
            }
        }
        let s = self.summary();
        for (label, pick) in [("mean", 0), ("sd", 1)] {
            let v = |st: Stat| if pick == 0 { st.mean } else { st.sd }.to_string();
            let mut rec = vec![label.to_string(), "summary".into()];
            rec.extend(std::iter::repeat_n(String::new(), 8));
            rec.extend([
                v(s.jaccard),
                v(s.mean_accuracy),
                v(s.sym_diff_ratio),
                v(s.misclassified),
                v(s.wall_time_s),
            ]);
            w.write_record(&rec).expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8"));
        for t in &self.trials {
            if let Some(e) = &t.error {
                writeln!(out, "# trial {} failed: {e}", t.trial).unwrap();
            }
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| BenchError::io(path, e))
    }
}

/// Runs every trial, `jobs` at a time, keeping results in trial order.
pub fn run_experiment(cfg: &ExperimentConfig, jobs: usize) -> Result<Report> {
    let fixed = load_dataset(&cfg.dataset)?.map(Arc::new);
    let source = match fixed {
        Some(lg) => Source::Fixed(lg),
        None => Source::Generated(&cfg.dataset),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| BenchError::Config(format!("thread pool: {e}")))?;
    let trials = pool.install(|| {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_trial(cfg, &source, t))
            .collect()
    });
    Ok(Report {
        config: cfg.clone(),
        trials,
    })
}
