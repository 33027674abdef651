//! Flat `key = value` experiment configuration.
//!
//! Every key has a default; a file and then command-line overrides replace
//! them. The fully resolved table is echoed into result files.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use cslce_core::cslce::CslceParams;
use cslce_core::solver::SpConfig;
use cslce_core::synth::{GeometricConfig, Shape, Sigma};

use crate::error::{BenchError, Result};
use crate::io::{EdgeListOptions, SelfLoops};

/// Keys in echo order, with defaults.
pub const DEFAULTS: &[(&str, &str)] = &[
    ("dataset", "ssbm"),
    ("n", "600"),
    ("k", "3"),
    ("n1", "200"),
    ("size_ratios", "1,2,5"),
    ("p_coef", "5"),
    ("p_pow", "1"),
    ("q_coef", "1"),
    ("q_pow", "1"),
    ("p", "auto"),
    ("q", "auto"),
    ("shape", "lines"),
    ("per_cluster", "200"),
    ("embed_dim", "100"),
    ("noise_sd", "0.02"),
    ("knn_k", "8"),
    ("sigma", "auto"),
    ("binary_weights", "false"),
    ("edges", ""),
    ("labels", ""),
    ("points", ""),
    ("header", "false"),
    ("largest_component", "true"),
    ("self_loops", "drop"),
    ("unweighted", "false"),
    ("target", "smallest"),
    ("trials", "100"),
    ("seeds_per_cluster", "5"),
    ("label_ratio", "none"),
    ("rng_seed", "0"),
    ("n_hat_scale", "1.0"),
    ("timing", "true"),
    ("epsilon", "0.1"),
    ("t", "3"),
    ("gamma", "0.4"),
    ("r_threshold", "0.5"),
    ("include_seeds", "true"),
    ("normalize_columns", "false"),
    ("max_iter", "auto"),
    ("sp_tol", "1e-8"),
];

/// Raw key/value table.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    values: Vec<(String, String)>,
    explicit: BTreeSet<String>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            values: DEFAULTS
                .iter()
                .map(|&(k, v)| (k.to_string(), v.to_string()))
                .collect(),
            explicit: BTreeSet::new(),
        }
    }
}

impl Settings {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let slot = self
            .values
            .iter_mut()
            .find(|(k, _)| k == key)
            .ok_or_else(|| BenchError::Config(format!("unknown key `{key}`")))?;
        slot.1 = value.trim().to_string();
        self.explicit.insert(key.to_string());
        Ok(())
    }

    pub fn get(&self, key: &str) -> &str {
        self.values
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .unwrap_or_else(|| panic!("`{key}` missing from DEFAULTS"))
    }

    pub fn is_explicit(&self, key: &str) -> bool {
        self.explicit.contains(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    /// Applies `key = value` lines; `#` starts a comment line.
    pub fn apply_text(&mut self, text: &str, path: &Path) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| BenchError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                msg: format!("expected `key = value`, got `{line}`"),
            })?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        self.apply_text(&text, path)
    }

    /// Applies `--key value` pairs.
    pub fn apply_overrides<S: AsRef<str>>(&mut self, args: &[S]) -> Result<()> {
        let mut it = args.iter().map(AsRef::as_ref);
        while let Some(flag) = it.next() {
            let key = flag
                .strip_prefix("--")
                .ok_or_else(|| BenchError::Config(format!("expected `--key`, got `{flag}`")))?;
            let value = it
                .next()
                .ok_or_else(|| BenchError::Config(format!("`--{key}` needs a value")))?;
            self.set(key, value)?;
        }
        Ok(())
    }

    /// `# key = value` lines for every key.
    pub fn echo(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.iter() {
            writeln!(out, "# {k} = {v}").unwrap();
        }
        out
    }

    fn parse<T: FromStr>(&self, key: &str) -> Result<T> {
        let v = self.get(key);
        v.parse()
            .map_err(|_| BenchError::Config(format!("bad value `{v}` for `{key}`")))
    }

    fn flag(&self, key: &str) -> Result<bool> {
        match self.get(key) {
            "true" | "yes" | "1" => Ok(true),
            "false" | "no" | "0" => Ok(false),
            v => Err(BenchError::Config(format!("bad boolean `{v}` for `{key}`"))),
        }
    }

    fn path(&self, key: &str) -> Result<PathBuf> {
        match self.get(key) {
            "" => Err(BenchError::Config(format!("`{key}` is required"))),
            v => Ok(PathBuf::from(v)),
        }
    }

    fn sigma(&self) -> Result<Sigma> {
        match self.get("sigma") {
            "auto" => Ok(Sigma::Auto),
            _ => Ok(Sigma::Fixed(self.parse("sigma")?)),
        }
    }

    /// `value` if given, else `coef · ln(N)^pow / N`.
    fn probability(&self, which: &str, big_n: usize) -> Result<f64> {
        if self.get(which) != "auto" {
            return self.parse(which);
        }
        let coef: f64 = self.parse(&format!("{which}_coef"))?;
        let pow: i32 = self.parse(&format!("{which}_pow"))?;
        let nf = big_n as f64;
        Ok(coef * nf.ln().powi(pow) / nf)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Dataset {
    Ssbm {
        n: usize,
        k: usize,
        p: f64,
        q: f64,
    },
    Sbm {
        sizes: Vec<usize>,
        p: f64,
        q: f64,
    },
    Geometric {
        shape: Shape,
        per_cluster: usize,
        geometry: GeometricConfig,
        knn: KnnSpec,
    },
    EdgeList {
        edges: PathBuf,
        labels: PathBuf,
        options: EdgeListOptions,
    },
    Points {
        points: PathBuf,
        header: bool,
        knn: KnnSpec,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnnSpec {
    pub k: usize,
    pub sigma: Sigma,
    pub binary: bool,
}

/// Which ground-truth clusters a trial extracts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Smallest,
    Largest,
    /// Every cluster, one after the other on the shrinking residual graph.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeedRule {
    Count(usize),
    /// Fraction of the cluster, rounded up, at least one.
    Ratio(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset: Dataset,
    pub target: Target,
    pub trials: usize,
    pub seeds: SeedRule,
    pub rng_seed: u64,
    /// `n̂` is `round(n_hat_scale · |C|)`.
    pub n_hat_scale: f64,
    /// Record wall-clock times; off writes zeros so output is byte-stable.
    pub timing: bool,
    /// Algorithm settings; `n_hat` is filled in per cluster.
    pub params: CslceParams,
    pub settings: Settings,
}

impl ExperimentConfig {
    pub fn from_settings(s: Settings) -> Result<Self> {
        let dataset = match s.get("dataset") {
            "ssbm" => {
                let n = s.parse("n")?;
                Dataset::Ssbm {
                    n,
                    k: s.parse("k")?,
                    p: s.probability("p", n)?,
                    q: s.probability("q", n)?,
                }
            }
            "sbm" => {
                let n1: usize = s.parse("n1")?;
                let sizes = s
                    .get("size_ratios")
                    .split(',')
                    .map(|r| {
                        r.trim()
                            .parse::<usize>()
                            .map(|r| r * n1)
                            .map_err(|_| BenchError::Config(format!("bad size ratio `{r}`")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let big_n = sizes.iter().sum();
                Dataset::Sbm {
                    sizes,
                    p: s.probability("p", big_n)?,
                    q: s.probability("q", big_n)?,
                }
            }
            "geometric" => Dataset::Geometric {
                shape: s.get("shape").parse().map_err(|_| {
                    BenchError::Config(format!("unknown shape `{}`", s.get("shape")))
                })?,
                per_cluster: s.parse("per_cluster")?,
                geometry: GeometricConfig {
                    embed_dim: s.parse("embed_dim")?,
                    noise_sd: s.parse("noise_sd")?,
                    ..GeometricConfig::default()
                },
                knn: knn_spec(&s)?,
            },
            "edgelist" => Dataset::EdgeList {
                edges: s.path("edges")?,
                labels: s.path("labels")?,
                options: EdgeListOptions {
                    largest_component: s.flag("largest_component")?,
                    self_loops: match s.get("self_loops") {
                        "reject" => SelfLoops::Reject,
                        "drop" => SelfLoops::Drop,
                        "keep" => SelfLoops::Keep,
                        v => return Err(BenchError::Config(format!("bad self_loops `{v}`"))),
                    },
                    unweighted: s.flag("unweighted")?,
                },
            },
            "points" => Dataset::Points {
                points: s.path("points")?,
                header: s.flag("header")?,
                knn: knn_spec(&s)?,
            },
            other => return Err(BenchError::Config(format!("unknown dataset `{other}`"))),
        };

        let target = match s.get("target") {
            "smallest" => Target::Smallest,
            "largest" => Target::Largest,
            "all" => Target::All,
            v => return Err(BenchError::Config(format!("bad target `{v}`"))),
        };
        let trials: usize = s.parse("trials")?;
        if trials == 0 {
            return Err(BenchError::Config("trials must be >= 1".into()));
        }
        let seeds = if s.get("label_ratio") != "none" {
            if s.is_explicit("seeds_per_cluster") {
                return Err(BenchError::Config(
                    "set either seeds_per_cluster or label_ratio, not both".into(),
                ));
            }
            let r: f64 = s.parse("label_ratio")?;
            if !(r > 0.0 && r < 1.0) {
                return Err(BenchError::Config(format!(
                    "label_ratio must be in (0, 1), got {r}"
                )));
            }
            SeedRule::Ratio(r)
        } else {
            let c: usize = s.parse("seeds_per_cluster")?;
            if c == 0 {
                return Err(BenchError::Config("seeds_per_cluster must be >= 1".into()));
            }
            SeedRule::Count(c)
        };
        let n_hat_scale: f64 = s.parse("n_hat_scale")?;
        if !(n_hat_scale > 0.0 && n_hat_scale.is_finite()) {
            return Err(BenchError::Config("n_hat_scale must be positive".into()));
        }

        let mut params = CslceParams::new(1);
        params.epsilon = s.parse("epsilon")?;
        params.t = s.parse("t")?;
        params.gamma = s.parse("gamma")?;
        params.r_threshold = s.parse("r_threshold")?;
        params.include_seeds_in_output = s.flag("include_seeds")?;
        params.sp = SpConfig {
            max_iter: match s.get("max_iter") {
                "auto" => None,
                _ => Some(s.parse("max_iter")?),
            },
            tol: s.parse("sp_tol")?,
            normalize_columns: s.flag("normalize_columns")?,
        };
        // range checks that do not depend on n̂
        params
            .validate(usize::MAX)
            .map_err(|e| BenchError::Config(e.to_string()))?;

        Ok(Self {
            dataset,
            target,
            trials,
            seeds,
            rng_seed: s.parse("rng_seed")?,
            n_hat_scale,
            timing: s.flag("timing")?,
            params,
            settings: s,
        })
    }

    /// Defaults, then `file`, then `overrides`.
    pub fn load<S: AsRef<str>>(file: Option<&Path>, overrides: &[S]) -> Result<Self> {
        let mut s = Settings::default();
        if let Some(f) = file {
            s.apply_file(f)?;
        }
        s.apply_overrides(overrides)?;
        Self::from_settings(s)
    }
}

fn knn_spec(s: &Settings) -> Result<KnnSpec> {
    Ok(KnnSpec {
        k: s.parse("knn_k")?,
        sigma: s.sigma()?,
        binary: s.flag("binary_weights")?,
    })
}
