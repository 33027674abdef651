//! Text formats: edge lists, vertex label files and point-cloud CSV.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use cslce_core::synth::PointCloud;
use cslce_core::{GraphBuilder, SparseGraph, VertexSet};

use crate::error::{BenchError, Result};

/// What to do with `i i` lines in an edge list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelfLoops {
    #[default]
    Reject,
    Drop,
    Keep,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeListOptions {
    /// Keep only the largest connected component, relabeled compactly.
    pub largest_component: bool,
    pub self_loops: SelfLoops,
    /// Ignore weights and collapse repeated pairs into one unit edge.
    pub unweighted: bool,
}

/// A graph read from disk with the file's id for each vertex.
#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: SparseGraph,
    /// `ids[v]` is the vertex index used in the file.
    pub ids: Vec<usize>,
}

impl LoadedGraph {
    /// Local index of every file id, `None` for ids that were dropped.
    pub fn local_of(&self) -> impl Fn(usize) -> Option<usize> + '_ {
        move |id| self.ids.binary_search(&id).ok()
    }
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parses `i j [weight]` lines. `path` is only used in error messages.
pub fn parse_edge_list(text: &str, path: &Path, opts: &EdgeListOptions) -> Result<LoadedGraph> {
    let err = |line, msg: String| BenchError::Parse {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let mut edges = Vec::new();
    for (line, l) in data_lines(text) {
        let fields: Vec<&str> = l.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(err(line, format!("expected `i j [weight]`, got `{l}`")));
        }
        let idx = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| err(line, format!("bad vertex index `{s}`")))
        };
        let (i, j) = (idx(fields[0])?, idx(fields[1])?);
        let w = match fields.get(2) {
            Some(s) if !opts.unweighted => s
                .parse::<f64>()
                .map_err(|_| err(line, format!("bad weight `{s}`")))?,
            _ => 1.0,
        };
        if i == j {
            match opts.self_loops {
                SelfLoops::Reject => return Err(err(line, format!("self-loop at vertex {i}"))),
                SelfLoops::Drop => continue,
                SelfLoops::Keep => {}
            }
        }
        edges.push((i.min(j), i.max(j), w));
    }
    if opts.unweighted {
        edges.sort_unstable_by_key(|&(i, j, _)| (i, j));
        edges.dedup_by_key(|e| (e.0, e.1));
    }
    if edges.is_empty() {
        return Err(err(0, "no edges".into()));
    }

    let keep_loops = opts.self_loops == SelfLoops::Keep;
    if !opts.largest_component {
        let n = edges.iter().map(|e| e.1).max().unwrap_or(0) + 1;
        let graph = GraphBuilder::new(n)
            .allow_self_loops(keep_loops)
            .extend(edges)
            .build()?;
        return Ok(LoadedGraph {
            graph,
            ids: (0..n).collect(),
        });
    }

    // relabel the ids that carry an edge, then cut down to the biggest component
    let mut ids: Vec<usize> = edges.iter().flat_map(|e| [e.0, e.1]).collect();
    ids.sort_unstable();
    ids.dedup();
    let local = |v: usize| ids.binary_search(&v).expect("id collected above");
    let graph = GraphBuilder::new(ids.len())
        .allow_self_loops(keep_loops)
        .extend(edges.iter().map(|&(i, j, w)| (local(i), local(j), w)))
        .build()?;
    let main = graph
        .connected_components()
        .into_iter()
        .max_by(|a, b| {
            a.len()
                .cmp(&b.len())
                .then(b.as_slice()[0].cmp(&a.as_slice()[0]))
        })
        .expect("graph has at least one vertex");
    let sub = graph.induced_subgraph(&main)?;
    Ok(LoadedGraph {
        graph: sub,
        ids: main.iter().map(|v| ids[v]).collect(),
    })
}

pub fn load_edge_list(path: impl AsRef<Path>, opts: &EdgeListOptions) -> Result<LoadedGraph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    parse_edge_list(&text, path, opts)
}

/// One `i j weight` line per undirected edge, `i <= j`.
pub fn format_edge_list(g: &SparseGraph) -> String {
    let mut out = String::new();
    for (i, j, w) in g.edges() {
        writeln!(out, "{i} {j} {w}").unwrap();
    }
    out
}

pub fn write_edge_list(path: impl AsRef<Path>, g: &SparseGraph) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_edge_list(g)).map_err(|e| BenchError::io(path, e))
}

/// Parses `vertex label` lines into `(vertex, label)` pairs.
pub fn parse_labels(text: &str, path: &Path) -> Result<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    for (line, l) in data_lines(text) {
        let mut fields = l.split_whitespace();
        let mut next = |what: &str| -> Result<usize> {
            let s = fields.next().ok_or_else(|| BenchError::Parse {
                path: path.to_path_buf(),
                line,
                msg: format!("missing {what}"),
            })?;
            s.parse().map_err(|_| BenchError::Parse {
                path: path.to_path_buf(),
                line,
                msg: format!("bad {what} `{s}`"),
            })
        };
        out.push((next("vertex")?, next("label")?));
    }
    Ok(out)
}

pub fn load_labels(path: impl AsRef<Path>) -> Result<Vec<(usize, usize)>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    parse_labels(&text, path)
}

pub fn write_labels(path: impl AsRef<Path>, labels: &[usize]) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    for (v, l) in labels.iter().enumerate() {
        writeln!(out, "{v} {l}").unwrap();
    }
    fs::write(path, out).map_err(|e| BenchError::io(path, e))
}

/// Groups the vertices of `lg` by label. Pairs naming dropped ids are
/// skipped; every kept vertex must be labeled. Clusters come back in label
/// order with empty labels removed.
pub fn partition_from_labels(
    lg: &LoadedGraph,
    labels: &[(usize, usize)],
) -> std::result::Result<Vec<VertexSet>, String> {
    let n = lg.graph.n();
    let local_of = lg.local_of();
    let mut label = vec![usize::MAX; n];
    for &(id, l) in labels {
        if let Some(v) = local_of(id) {
            label[v] = l;
        }
    }
    if let Some(v) = label.iter().position(|&l| l == usize::MAX) {
        return Err(format!("vertex {} has no label", lg.ids[v]));
    }
    let k = label.iter().max().map_or(0, |m| m + 1);
    let mut members = vec![Vec::new(); k];
    for (v, &l) in label.iter().enumerate() {
        members[l].push(v);
    }
    Ok(members
        .into_iter()
        .filter(|m| !m.is_empty())
        .map(VertexSet::from_sorted)
        .collect())
}

/// Reads `d` coordinate columns followed by an integer label column.
pub fn load_point_csv(path: impl AsRef<Path>, header: bool) -> Result<PointCloud> {
    let path = path.as_ref();
    let csv_err = |source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(csv_err)?;
    let mut dim = None;
    let mut coords = Vec::new();
    let mut labels = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let err = |msg: String| BenchError::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        if record.len() < 2 {
            return Err(err("need at least one coordinate and a label".into()));
        }
        let d = record.len() - 1;
        if *dim.get_or_insert(d) != d {
            return Err(err(format!(
                "expected {} coordinates, got {d}",
                dim.unwrap()
            )));
        }
        for s in record.iter().take(d) {
            coords.push(
                s.parse::<f64>()
                    .map_err(|_| err(format!("bad coordinate `{s}`")))?,
            );
        }
        let s = &record[d];
        labels.push(
            s.parse::<usize>()
                .map_err(|_| err(format!("bad label `{s}`")))?,
        );
    }
    let dim = dim.ok_or_else(|| BenchError::Parse {
        path: path.to_path_buf(),
        line: 0,
        msg: "no points".into(),
    })?;
    Ok(PointCloud::new(dim, coords, labels)?)
}

pub fn write_point_csv(path: impl AsRef<Path>, pc: &PointCloud, header: bool) -> Result<()> {
    let path = path.as_ref();
    let csv_err = |source| BenchError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    if header {
        let mut names: Vec<String> = (0..pc.dim()).map(|i| format!("x{i}")).collect();
        names.push("label".into());
        w.write_record(&names).map_err(csv_err)?;
    }
    for i in 0..pc.len() {
        let mut row: Vec<String> = pc.point(i).iter().map(f64::to_string).collect();
        row.push(pc.labels()[i].to_string());
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| BenchError::io(path, e))
}
