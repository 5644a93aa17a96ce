use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::graph::AttributedGraph;
use crate::rng::{bernoulli, stream, Stream};

/// Stochastic block model with round-robin labels.
///
/// Each same-label pair is joined with `within_prob`, each cross-label pair
/// with `between_prob`. Features are the label's one-hot vector (first
/// `class_count` coordinates) plus standard-normal noise on all `dim`
/// coordinates.
pub fn generate_sbm(
    n: usize,
    class_count: usize,
    within_prob: f64,
    between_prob: f64,
    dim: usize,
    seed: u64,
) -> Result<AttributedGraph> {
    if class_count < 2 || n < class_count {
        return Err(Error::InvalidArgument(format!(
            "need n >= classes >= 2, got n = {n}, classes = {class_count}"
        )));
    }
    if dim < class_count {
        return Err(Error::InvalidArgument(format!(
            "feature dimension {dim} cannot hold a {class_count}-class one-hot block"
        )));
    }
    for (name, p) in [("within_prob", within_prob), ("between_prob", between_prob)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!(
                "{name} = {p} is not a probability"
            )));
        }
    }

    let mut rng = stream(seed, Stream::Generator);
    let labels: Vec<usize> = (0..n).map(|i| i % class_count).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = if labels[i] == labels[j] {
                within_prob
            } else {
                between_prob
            };
            if bernoulli(&mut rng, p) {
                edges.push((i, j));
            }
        }
    }
    let features = labels
        .iter()
        .map(|&z| {
            (0..dim)
                .map(|k| {
                    let noise: f64 = StandardNormal.sample(&mut rng);
                    noise + if k == z { 1.0 } else { 0.0 }
                })
                .collect()
        })
        .collect();
    AttributedGraph::new(edges, features, labels, class_count)
}
