//! Edge removal and label swapping to move a graph's edge homophily toward
//! a target.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::AttributedGraph;

/// Consecutive rejected swap proposals tolerated before giving up.
pub const DEFAULT_SWAP_BUDGET: usize = 10_000;

#[derive(Debug, Clone)]
pub struct HomophilyAdjustment {
    pub graph: AttributedGraph,
    pub achieved: f64,
    pub reached: bool,
    /// Homophily after each accepted step.
    pub trace: Vec<f64>,
}

fn check_target(target: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&target) {
        return Err(Error::InvalidArgument(format!(
            "target homophily {target} outside [0, 1]"
        )));
    }
    Ok(())
}

/// Removes cross-label edges, chosen uniformly among those whose endpoints
/// both keep degree at least one, until homophily reaches `target`.
pub fn increase_homophily<R: Rng + ?Sized>(
    graph: &AttributedGraph,
    target: f64,
    rng: &mut R,
) -> Result<HomophilyAdjustment> {
    check_target(target)?;
    let start = graph.homophily()?;
    let labels = graph.labels();
    let edges = graph.edges();
    let mut degree = graph.degrees();
    let mut keep = vec![true; edges.len()];
    let same = graph.same_label_edges();
    let mut total = edges.len();
    let mut candidates: Vec<usize> = (0..edges.len())
        .filter(|&e| labels[edges[e].0] != labels[edges[e].1])
        .collect();
    let mut trace = Vec::new();
    let mut h = start;

    // With no same-label edge, removing cross edges leaves homophily at zero.
    while h < target && same > 0 && !candidates.is_empty() {
        let pick = rng.random_range(0..candidates.len());
        let e = candidates.swap_remove(pick);
        let (u, v) = edges[e];
        // Degrees only shrink, so an ineligible edge never becomes eligible.
        if degree[u] < 2 || degree[v] < 2 {
            continue;
        }
        keep[e] = false;
        degree[u] -= 1;
        degree[v] -= 1;
        total -= 1;
        h = same as f64 / total as f64;
        trace.push(h);
    }

    let kept = edges.iter().zip(&keep).filter(|(_, &k)| k).map(|(&e, _)| e);
    let adjusted = AttributedGraph::new(
        kept,
        graph.feature_rows(),
        labels.to_vec(),
        graph.class_count(),
    )?;
    Ok(HomophilyAdjustment {
        graph: adjusted,
        achieved: h,
        reached: h >= target,
        trace,
    })
}

/// Swaps labels (with their feature rows) between random node pairs when
/// the swap strictly increases the number of cross-label edges, until
/// homophily drops to `target` or `max_rejections` consecutive proposals fail.
pub fn decrease_homophily<R: Rng + ?Sized>(
    graph: &AttributedGraph,
    target: f64,
    rng: &mut R,
    max_rejections: usize,
) -> Result<HomophilyAdjustment> {
    check_target(target)?;
    let start = graph.homophily()?;
    let n = graph.node_count();
    let total = graph.edge_count();
    let mut labels = graph.labels().to_vec();
    let d = graph.feature_dim();
    let mut flat = graph.raw_features().to_vec();
    let mut same = graph.same_label_edges();
    let mut h = start;
    let mut trace = Vec::new();
    let mut rejections = 0;

    while h > target && rejections < max_rejections && n >= 2 {
        let u = rng.random_range(0..n);
        let v = rng.random_range(0..n);
        if labels[u] == labels[v] {
            rejections += 1;
            continue;
        }
        let delta = swap_gain(graph, &labels, u, v);
        if delta <= 0 {
            rejections += 1;
            continue;
        }
        labels.swap(u, v);
        for k in 0..d {
            flat.swap(u * d + k, v * d + k);
        }
        same -= delta as usize;
        h = same as f64 / total as f64;
        trace.push(h);
        rejections = 0;
    }

    Ok(HomophilyAdjustment {
        graph: graph.with_node_data(labels, flat),
        achieved: h,
        reached: h <= target,
        trace,
    })
}

/// Change in the number of cross-label edges if `u` and `v` swap labels.
fn swap_gain(graph: &AttributedGraph, labels: &[usize], u: usize, v: usize) -> i64 {
    let (zu, zv) = (labels[u], labels[v]);
    let mut delta = 0i64;
    for &w in graph.adj(u) {
        if w != v {
            delta += (labels[w] != zv) as i64 - (labels[w] != zu) as i64;
        }
    }
    for &w in graph.adj(v) {
        if w != u {
            delta += (labels[w] != zu) as i64 - (labels[w] != zv) as i64;
        }
    }
    delta
}
