//! Text formats for attributed graphs.
//!
//! * edges: `u v` per line, 0-based ids, `#` starts a comment line
//! * labels: one 1-based class index per line, line number = node id
//! * features: dense comma-separated rows, or a sparse `n d nnz` header
//!   followed by `row col value` triplets (0-based)

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::AttributedGraph;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetPaths {
    pub edges: PathBuf,
    pub features: PathBuf,
    pub labels: PathBuf,
    /// Declared number of classes; inferred from the largest label if absent.
    #[serde(default)]
    pub class_count: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct LoadedDataset {
    pub graph: AttributedGraph,
    pub duplicate_edges: usize,
    pub self_loops: usize,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn parse_labels(path: &Path, text: &str, declared: Option<usize>) -> Result<(Vec<usize>, usize)> {
    let lines: Vec<&str> = text.lines().collect();
    let end = lines
        .iter()
        .rposition(|l| !l.trim().is_empty())
        .map_or(0, |i| i + 1);
    let mut labels = Vec::with_capacity(end);
    for (i, raw) in lines[..end].iter().enumerate() {
        let value: i64 = raw.trim().parse().map_err(|_| {
            parse_err(
                path,
                i + 1,
                format!("expected an integer label, got `{}`", raw.trim()),
            )
        })?;
        if value < 1 || declared.is_some_and(|l| value as usize > l) {
            return Err(parse_err(
                path,
                i + 1,
                format!("label {value} out of range"),
            ));
        }
        labels.push(value as usize - 1);
    }
    let inferred = labels.iter().max().map_or(0, |&m| m + 1);
    let class_count = declared.unwrap_or(inferred);
    if class_count < 2 {
        return Err(parse_err(path, 1, "need at least two classes"));
    }
    Ok((labels, class_count))
}

/// Parsed edges plus counts of dropped duplicates and self-loops.
fn parse_edges(
    path: &Path,
    text: &str,
    node_count: usize,
) -> Result<(Vec<(usize, usize)>, usize, usize)> {
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let (mut duplicates, mut loops) = (0, 0);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let mut next = || -> Result<usize> {
            let tok = it
                .next()
                .ok_or_else(|| parse_err(path, i + 1, "expected two node ids"))?;
            let id: usize = tok
                .parse()
                .map_err(|_| parse_err(path, i + 1, format!("bad node id `{tok}`")))?;
            if id >= node_count {
                return Err(parse_err(
                    path,
                    i + 1,
                    format!("node id {id} out of range (n = {node_count})"),
                ));
            }
            Ok(id)
        };
        let (u, v) = (next()?, next()?);
        if it.next().is_some() {
            return Err(parse_err(path, i + 1, "trailing tokens after edge"));
        }
        if u == v {
            loops += 1;
            continue;
        }
        if seen.insert((u.min(v), u.max(v))) {
            edges.push((u, v));
        } else {
            duplicates += 1;
        }
    }
    Ok((edges, duplicates, loops))
}

fn parse_features(path: &Path, text: &str, node_count: usize) -> Result<Vec<Vec<f64>>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let Some((first_no, first)) = lines.next() else {
        return if node_count == 0 {
            Ok(Vec::new())
        } else {
            Err(parse_err(path, 1, "empty feature file"))
        };
    };
    let header: Vec<&str> = first.split_whitespace().collect();
    let sparse = !first.contains(',') && header.len() == 3;

    let number = |line: usize, tok: &str| -> Result<f64> {
        tok.trim()
            .parse::<f64>()
            .map_err(|_| parse_err(path, line, format!("bad number `{}`", tok.trim())))
    };

    if sparse {
        let dims: Vec<usize> = header
            .iter()
            .map(|t| {
                t.parse()
                    .map_err(|_| parse_err(path, first_no + 1, "bad sparse header"))
            })
            .collect::<Result<_>>()?;
        let (n, d, nnz) = (dims[0], dims[1], dims[2]);
        if n != node_count {
            return Err(parse_err(
                path,
                first_no + 1,
                format!("header declares {n} rows, labels give {node_count}"),
            ));
        }
        let mut rows = vec![vec![0.0; d]; n];
        let mut seen = 0;
        for (i, raw) in lines {
            let toks: Vec<&str> = raw.split_whitespace().collect();
            if toks.len() != 3 {
                return Err(parse_err(path, i + 1, "expected `row col value`"));
            }
            let r: usize = toks[0]
                .parse()
                .map_err(|_| parse_err(path, i + 1, "bad row index"))?;
            let c: usize = toks[1]
                .parse()
                .map_err(|_| parse_err(path, i + 1, "bad column index"))?;
            if r >= n || c >= d {
                return Err(parse_err(
                    path,
                    i + 1,
                    format!("entry ({r}, {c}) outside {n}x{d}"),
                ));
            }
            rows[r][c] = number(i + 1, toks[2])?;
            seen += 1;
        }
        if seen != nnz {
            return Err(parse_err(
                path,
                first_no + 1,
                format!("header declares {nnz} entries, found {seen}"),
            ));
        }
        return Ok(rows);
    }

    let mut rows = Vec::with_capacity(node_count);
    for (i, raw) in std::iter::once((first_no, first)).chain(lines) {
        let row = raw
            .split(',')
            .map(|t| number(i + 1, t))
            .collect::<Result<Vec<f64>>>()?;
        if let Some(prev) = rows.first().map(Vec::len) {
            if row.len() != prev {
                return Err(parse_err(
                    path,
                    i + 1,
                    format!("row has {} values, expected {prev}", row.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.len() != node_count {
        return Err(parse_err(
            path,
            text.lines().count(),
            format!(
                "{} feature rows for {node_count} labelled nodes",
                rows.len()
            ),
        ));
    }
    Ok(rows)
}

pub fn load_dataset(paths: &DatasetPaths) -> Result<LoadedDataset> {
    let (labels, class_count) =
        parse_labels(&paths.labels, &read(&paths.labels)?, paths.class_count)?;
    let n = labels.len();
    let features = parse_features(&paths.features, &read(&paths.features)?, n)?;
    let (edges, duplicate_edges, self_loops) = parse_edges(&paths.edges, &read(&paths.edges)?, n)?;
    if duplicate_edges + self_loops > 0 {
        log::warn!(
            "{}: dropped {duplicate_edges} duplicate edges and {self_loops} self-loops",
            paths.edges.display()
        );
    }
    let graph = AttributedGraph::new(edges, features, labels, class_count)?;
    Ok(LoadedDataset {
        graph,
        duplicate_edges,
        self_loops,
    })
}

/// Writes `graph` with dense features. Floats use Rust's shortest
/// round-trip formatting, so loading the files back reproduces the graph.
pub fn write_dataset(graph: &AttributedGraph, paths: &DatasetPaths) -> Result<()> {
    let mut edges = String::new();
    for &(u, v) in graph.edges() {
        edges.push_str(&format!("{u} {v}\n"));
    }
    let mut labels = String::new();
    for &z in graph.labels() {
        labels.push_str(&format!("{}\n", z + 1));
    }
    let mut features = String::new();
    for i in 0..graph.node_count() {
        let row: Vec<String> = graph.features(i).iter().map(|x| format!("{x:?}")).collect();
        features.push_str(&row.join(","));
        features.push('\n');
    }
    for (path, body) in [
        (&paths.edges, edges),
        (&paths.labels, labels),
        (&paths.features, features),
    ] {
        fs::write(path, body).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}
