use cslce_bench::config::{Dataset, SeedRule, Target};
use cslce_bench::experiment::{RowKind, Stat};
use cslce_bench::{run_experiment, sample_seeds, BenchError, ExperimentConfig, Settings};
use cslce_core::VertexSet;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Defaults plus whitespace-separated `--key value` overrides.
fn config(overrides: &str) -> ExperimentConfig {
    let args: Vec<&str> = overrides.split_whitespace().collect();
    ExperimentConfig::load(None, &args).unwrap()
}

#[test]
fn seed_counts() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cluster = VertexSet::from_unsorted(1000..1200);
    let s = sample_seeds(&cluster, SeedRule::Count(5), &mut rng).unwrap();
    assert_eq!(s.len(), 5);
    assert!(s.is_subset(&cluster));

    let s = sample_seeds(&VertexSet::full(100), SeedRule::Ratio(0.10), &mut rng).unwrap();
    assert_eq!(s.len(), 10);
    let s = sample_seeds(&VertexSet::full(7000), SeedRule::Ratio(0.0005), &mut rng).unwrap();
    assert_eq!(s.len(), 4);
    let s = sample_seeds(&VertexSet::full(3), SeedRule::Ratio(0.01), &mut rng).unwrap();
    assert_eq!(s.len(), 1);

    assert!(sample_seeds(&VertexSet::full(4), SeedRule::Count(5), &mut rng).is_err());
}

#[test]
fn config_defaults_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.cfg");
    std::fs::write(
        &path,
        "# comment\ndataset = sbm\nn1 = 30\ntrials = 7\n\nt=5\n",
    )
    .unwrap();
    let cfg = ExperimentConfig::load(Some(&path), &["--trials", "3", "--gamma", "0.3"]).unwrap();
    assert_eq!(cfg.trials, 3);
    assert_eq!(cfg.params.t, 5);
    assert_eq!(cfg.params.gamma, 0.3);
    assert_eq!(cfg.target, Target::Smallest);
    match &cfg.dataset {
        Dataset::Sbm { sizes, p, q } => {
            assert_eq!(sizes, &vec![30, 60, 150]);
            let n = 240f64;
            assert!((p - 5.0 * n.ln() / n).abs() < 1e-15);
            assert!((q - n.ln() / n).abs() < 1e-15);
        }
        other => panic!("{other:?}"),
    }
    let echo = cfg.settings.echo();
    assert!(echo.contains("# trials = 3\n"));
    assert!(echo.contains("# r_threshold = 0.5\n"));
}

#[test]
fn explicit_probabilities_override_the_formula() {
    let cfg = config("--n 90 --p 0.5 --q 0.01");
    assert!(matches!(cfg.dataset, Dataset::Ssbm { n: 90, p, q, .. } if p == 0.5 && q == 0.01));
}

#[test]
fn config_errors() {
    let bad: &[&[&str]] = &[
        &["--no_such_key", "1"],
        &["--trials", "0"],
        &["--trials"],
        &["trials", "3"],
        &["--gamma", "0.9"],
        &["--dataset", "nope"],
        &["--target", "middle"],
        &["--label_ratio", "0.1", "--seeds_per_cluster", "5"],
        &["--label_ratio", "1.5"],
        &["--shape", "squares", "--dataset", "geometric"],
    ];
    for args in bad {
        let err = ExperimentConfig::load(None, args).unwrap_err();
        assert!(matches!(err, BenchError::Config(_)), "{args:?}: {err:?}");
        assert_eq!(err.exit_code(), 1);
    }
    let cfg = config("--label_ratio 0.1");
    assert_eq!(cfg.seeds, SeedRule::Ratio(0.1));

    let mut s = Settings::default();
    assert!(s.apply_text("trials 3\n", "x.cfg".as_ref()).is_err());
    let err =
        ExperimentConfig::load(Some("/no/such/file.cfg".as_ref()), &[] as &[&str]).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn disconnected_single_trial_is_exact() {
    let cfg = config("--n 90 --p 0.8 --q 0 --trials 1 --rng_seed 4");
    let report = run_experiment(&cfg, 1).unwrap();
    let row = report.trials[0].summary().unwrap();
    assert_eq!(row.jaccard, 1.0);
    assert_eq!(row.misclassified, 0);
}

#[test]
fn csv_is_deterministic_across_runs_and_job_counts() {
    let cfg = config("--n 150 --trials 6 --rng_seed 9 --timing false");
    let a = run_experiment(&cfg, 1).unwrap().to_csv();
    let b = run_experiment(&cfg, 1).unwrap().to_csv();
    let c = run_experiment(&cfg, 3).unwrap().to_csv();
    assert_eq!(a, b);
    assert_eq!(a, c);

    let other = config("--n 150 --trials 6 --rng_seed 10 --timing false");
    assert_ne!(a, run_experiment(&other, 1).unwrap().to_csv());
}

#[test]
fn csv_layout_and_summary() {
    let cfg = config("--dataset geometric --shape lines --per_cluster 30 --target all --trials 4 --rng_seed 2 --timing false --seeds_per_cluster 3 --embed_dim 3");
    let report = run_experiment(&cfg, 2).unwrap();
    let csv = report.to_csv();
    let body: Vec<&str> = csv.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(
        body[0],
        "trial,cluster_index,n,k,n_hat,epsilon,t,gamma,r_threshold,seeds,jaccard,mean_accuracy,sym_diff_ratio,misclassified,wall_time_s"
    );
    // three cluster rows and one trial row per trial, then mean and sd
    assert_eq!(body.len(), 1 + 4 * 4 + 2);
    assert!(body[body.len() - 2].starts_with("mean,summary,"));
    assert!(body[body.len() - 1].starts_with("sd,summary,"));

    // summary recomputed from the per-trial rows of the CSV text
    let trial_rows: Vec<Vec<f64>> = body[1..body.len() - 2]
        .iter()
        .map(|l| l.split(',').collect::<Vec<_>>())
        .filter(|f| f[1] == "trial")
        .map(|f| f[10..].iter().map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(trial_rows.len(), 4);
    let parse_row =
        |l: &str| -> Vec<f64> { l.split(',').skip(10).map(|x| x.parse().unwrap()).collect() };
    let means = parse_row(body[body.len() - 2]);
    let sds = parse_row(body[body.len() - 1]);
    for col in 0..5 {
        let xs: Vec<f64> = trial_rows.iter().map(|r| r[col]).collect();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        assert!((means[col] - mean).abs() < 1e-9);
        assert!((sds[col] - sd).abs() < 1e-9);
    }

    for outcome in &report.trials {
        let clusters: Vec<_> = outcome
            .rows
            .iter()
            .filter(|r| matches!(r.kind, RowKind::Cluster(_)))
            .collect();
        assert_eq!(clusters.len(), 3);
        let sum: usize = clusters.iter().map(|r| r.misclassified).sum();
        assert_eq!(outcome.summary().unwrap().misclassified, sum);
    }
}

#[test]
fn failed_trials_are_recorded_and_the_run_completes() {
    // 40 seeds cannot be drawn from clusters of 30
    let cfg = config("--n 90 --trials 3 --seeds_per_cluster 40 --timing false");
    let report = run_experiment(&cfg, 1).unwrap();
    let s = report.summary();
    assert_eq!((s.completed, s.failed), (0, 3));
    assert!(s.jaccard.mean.is_nan());
    let csv = report.to_csv();
    assert_eq!(csv.matches("failed: ").count(), 3);
    assert!(report
        .trials
        .iter()
        .all(|t| t.rows.iter().all(|r| r.kind == RowKind::Failed)));
}

#[test]
fn stat_sample_sd() {
    let s = Stat::of(&[1.0, 2.0, 3.0, 4.0]);
    assert_eq!(s.mean, 2.5);
    assert!((s.sd - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    assert_eq!(Stat::of(&[7.0]).sd, 0.0);
}
