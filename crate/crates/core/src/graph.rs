//! Immutable attributed network.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Undirected attributed graph with per-node static features and latent
/// preference labels.
///
/// Labels are 0-based class indices in `0..class_count`. Adjacency lists are
/// sorted ascending, which fixes the iteration (and therefore RNG
/// consumption) order everywhere else in the crate.
#[derive(Debug, Clone, PartialEq)]
pub struct AttributedGraph {
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    features: Vec<f64>,
    feature_dim: usize,
    labels: Vec<usize>,
    class_count: usize,
}

impl AttributedGraph {
    /// Builds a graph from an edge list. Edges are treated as an undirected
    /// set: `(u, v)` and `(v, u)` collapse into one edge, repeats are ignored.
    /// Self-loops and out-of-range endpoints are rejected.
    pub fn new<I>(
        edges: I,
        features: Vec<Vec<f64>>,
        labels: Vec<usize>,
        class_count: usize,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let node_count = labels.len();
        if class_count < 2 {
            return Err(Error::InvalidArgument(format!(
                "class_count must be at least 2, got {class_count}"
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&z| z >= class_count) {
            return Err(Error::InvalidClass {
                class: bad,
                class_count,
            });
        }
        if features.len() != node_count {
            return Err(Error::DimensionMismatch {
                expected: node_count,
                actual: features.len(),
            });
        }
        let feature_dim = features.first().map_or(0, Vec::len);
        let mut flat = Vec::with_capacity(node_count * feature_dim);
        for row in &features {
            if row.len() != feature_dim {
                return Err(Error::DimensionMismatch {
                    expected: feature_dim,
                    actual: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }

        let mut set = BTreeSet::new();
        for (u, v) in edges {
            for node in [u, v] {
                if node >= node_count {
                    return Err(Error::InvalidNode { node, node_count });
                }
            }
            if u == v {
                return Err(Error::InvalidArgument(format!("self-loop on node {u}")));
            }
            set.insert((u.min(v), u.max(v)));
        }
        let edges: Vec<(usize, usize)> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); node_count];
        for &(u, v) in &edges {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        Ok(Self {
            edges,
            adjacency,
            features: flat,
            feature_dim,
            labels,
            class_count,
        })
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Undirected edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> usize {
        self.labels[node]
    }

    pub fn features(&self, node: usize) -> &[f64] {
        let start = node * self.feature_dim;
        &self.features[start..start + self.feature_dim]
    }

    /// Feature rows as owned vectors, in node order.
    pub fn feature_rows(&self) -> Vec<Vec<f64>> {
        (0..self.node_count())
            .map(|i| self.features(i).to_vec())
            .collect()
    }

    /// Neighbors of `node` in ascending id order.
    pub fn neighbors(&self, node: usize) -> Result<&[usize]> {
        self.check_node(node)?;
        Ok(&self.adjacency[node])
    }

    /// Unchecked neighbor access for hot loops; panics on a bad id.
    #[inline]
    pub(crate) fn adj(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn check_node(&self, node: usize) -> Result<()> {
        if node < self.node_count() {
            Ok(())
        } else {
            Err(Error::InvalidNode {
                node,
                node_count: self.node_count(),
            })
        }
    }

    pub fn check_class(&self, class: usize) -> Result<()> {
        if class < self.class_count {
            Ok(())
        } else {
            Err(Error::InvalidClass {
                class,
                class_count: self.class_count,
            })
        }
    }

    /// Number of edges whose endpoints share a label.
    pub fn same_label_edges(&self) -> usize {
        self.edges
            .iter()
            .filter(|&&(u, v)| self.labels[u] == self.labels[v])
            .count()
    }

    /// Fraction of edges joining same-label nodes.
    pub fn homophily(&self) -> Result<f64> {
        if self.edges.is_empty() {
            return Err(Error::UndefinedStatistic("homophily of an edgeless graph"));
        }
        Ok(self.same_label_edges() as f64 / self.edges.len() as f64)
    }

    /// Same topology and class count with replaced labels and feature rows.
    pub(crate) fn with_node_data(&self, labels: Vec<usize>, features: Vec<f64>) -> Self {
        debug_assert_eq!(labels.len(), self.node_count());
        debug_assert_eq!(features.len(), self.features.len());
        Self {
            edges: self.edges.clone(),
            adjacency: self.adjacency.clone(),
            features,
            feature_dim: self.feature_dim,
            labels,
            class_count: self.class_count,
        }
    }

    pub(crate) fn raw_features(&self) -> &[f64] {
        &self.features
    }

    /// Copy of this graph with the given feature matrix (one row per node).
    pub fn with_features(&self, features: Vec<Vec<f64>>) -> Result<Self> {
        Self::new(
            self.edges.iter().copied(),
            features,
            self.labels.clone(),
            self.class_count,
        )
    }
}

/// Label entropy divided by `ln(class_count)`: 1 for a uniform class
/// distribution, 0 when every node has the same class.
pub fn shannon_equitability(labels: &[usize], class_count: usize) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::InvalidArgument("labels must be non-empty".into()));
    }
    if class_count < 2 {
        return Err(Error::InvalidArgument(format!(
            "class_count must be at least 2, got {class_count}"
        )));
    }
    let mut counts = vec![0usize; class_count];
    for &z in labels {
        if z >= class_count {
            return Err(Error::InvalidClass {
                class: z,
                class_count,
            });
        }
        counts[z] += 1;
    }
    let total = labels.len() as f64;
    let entropy: f64 = counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.ln()
        })
        .sum();
    Ok(entropy / (class_count as f64).ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bare(n: usize, edges: &[(usize, usize)], labels: Vec<usize>, l: usize) -> AttributedGraph {
        AttributedGraph::new(edges.iter().copied(), vec![vec![]; n], labels, l).unwrap()
    }

    #[test]
    fn triangle_neighbors() {
        let g = bare(3, &[(0, 1), (1, 2), (2, 0)], vec![0, 0, 0], 2);
        assert_eq!(g.neighbors(1).unwrap(), &[0, 2]);
    }

    #[test]
    fn isolated_node_has_no_neighbors() {
        let g = bare(2, &[], vec![0, 1], 2);
        assert!(g.neighbors(1).unwrap().is_empty());
    }

    #[test]
    fn star_center_lists_leaves_ascending() {
        let g = bare(6, &[(0, 5), (0, 3), (1, 0), (0, 2), (4, 0)], vec![0; 6], 2);
        assert_eq!(g.neighbors(0).unwrap(), &[1, 2, 3, 4, 5]);
    }

    #[test]
    fn out_of_range_neighbor_query() {
        let g = bare(2, &[(0, 1)], vec![0, 1], 2);
        assert!(matches!(
            g.neighbors(2),
            Err(Error::InvalidNode { node: 2, .. })
        ));
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(AttributedGraph::new([(0, 0)], vec![vec![]; 1], vec![0], 2).is_err());
        assert!(AttributedGraph::new([(0, 3)], vec![vec![]; 2], vec![0, 1], 2).is_err());
        assert!(AttributedGraph::new([], vec![vec![]; 2], vec![0, 2], 2).is_err());
        assert!(AttributedGraph::new([], vec![vec![1.0], vec![]], vec![0, 1], 2).is_err());
        assert!(AttributedGraph::new([], vec![vec![]; 2], vec![0, 0], 1).is_err());
    }

    #[test]
    fn duplicate_and_reversed_edges_collapse() {
        let g = bare(2, &[(0, 1), (1, 0), (0, 1)], vec![0, 1], 2);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.degree(0), 1);
    }

    #[test]
    fn homophily_examples() {
        let tri = bare(3, &[(0, 1), (1, 2), (2, 0)], vec![1, 1, 1], 2);
        assert_eq!(tri.homophily().unwrap(), 1.0);
        let path = bare(3, &[(0, 1), (1, 2)], vec![0, 1, 0], 2);
        assert_eq!(path.homophily().unwrap(), 0.0);
        let cycle = bare(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], vec![0, 0, 1, 1], 2);
        assert_eq!(cycle.homophily().unwrap(), 0.5);
        let empty = bare(2, &[], vec![0, 1], 2);
        assert!(matches!(
            empty.homophily(),
            Err(Error::UndefinedStatistic(_))
        ));
    }

    #[test]
    fn equitability_examples() {
        assert!((shannon_equitability(&[0, 1, 0, 1], 2).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(shannon_equitability(&[1, 1, 1], 2).unwrap(), 0.0);
        let expected = -(0.75f64 * 0.75f64.ln() + 0.25 * 0.25f64.ln()) / 2f64.ln();
        let got = shannon_equitability(&[0, 0, 0, 1], 2).unwrap();
        assert!((got - expected).abs() < 1e-12);
        assert!((got - 0.8113).abs() < 1e-4);
        assert!(shannon_equitability(&[], 2).is_err());
    }

    fn arb_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>, Vec<usize>)> {
        (2usize..20).prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec((0..n, 0..n), 1..60),
                prop::collection::vec(0usize..3, n),
            )
        })
    }

    proptest! {
        #[test]
        fn homophily_in_unit_interval_and_relabel_invariant(
            (n, raw, labels) in arb_graph(),
            seed in any::<u64>(),
        ) {
            let edges: Vec<_> = raw.into_iter().filter(|(u, v)| u != v).collect();
            prop_assume!(!edges.is_empty());
            let g = bare(n, &edges, labels.clone(), 3);
            let h = g.homophily().unwrap();
            prop_assert!((0.0..=1.0).contains(&h));

            // permute node ids
            let mut perm: Vec<usize> = (0..n).collect();
            let mut s = seed;
            for i in (1..n).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (s >> 33) as usize % (i + 1));
            }
            let mut new_labels = vec![0; n];
            for (old, &new) in perm.iter().enumerate() {
                new_labels[new] = labels[old];
            }
            let new_edges: Vec<_> = edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
            let g2 = bare(n, &new_edges, new_labels, 3);
            prop_assert_eq!(g2.homophily().unwrap(), h);

            for i in 0..n {
                for &j in g.neighbors(i).unwrap() {
                    prop_assert!(g.neighbors(j).unwrap().contains(&i));
                }
            }
        }

        #[test]
        fn equitability_bounded_and_permutation_invariant(
            mut labels in prop::collection::vec(0usize..4, 1..50),
        ) {
            let e = shannon_equitability(&labels, 4).unwrap();
            prop_assert!((-1e-12..=1.0 + 1e-12).contains(&e));
            labels.reverse();
            let e2 = shannon_equitability(&labels, 4).unwrap();
            prop_assert!((e - e2).abs() < 1e-12);
            let uniform = labels.len() % 4 == 0
                && (0..4).all(|c| labels.iter().filter(|&&z| z == c).count() == labels.len() / 4);
            prop_assert_eq!(uniform, (e - 1.0).abs() < 1e-12);
        }
    }
}
