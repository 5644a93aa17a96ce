//! Dynamic neighborhood features.
//!
//! For node `i` with `l` classes the feature vector has four `l`-blocks,
//! each a ratio over the neighborhood `N_i`:
//!
//! 1. direct recommendations per class,
//! 2. direct recommendations per class whose target is still inactive,
//! 3. spillover attempts per class (`S_j + S̄_j`),
//! 4. failed spillover attempts per class (`S̄_j`).
//!
//! A block whose denominator is zero is all zeros.
//!
//! The cached vectors are maintained from integer per-block counts, so the
//! incremental path performs exactly the same divisions as
//! [`compute_features`] and agrees with it bit for bit.

use crate::diffusion::{AttemptRecord, SimulationState};
use crate::graph::AttributedGraph;

/// Per-node integer numerators for the four feature blocks, `4l` per node.
#[derive(Debug, Clone, PartialEq, Default)]
pub(crate) struct BlockCounts {
    class_count: usize,
    counts: Vec<u32>,
}

impl BlockCounts {
    pub(crate) fn new(node_count: usize, class_count: usize) -> Self {
        Self {
            class_count,
            counts: vec![0; node_count * 4 * class_count],
        }
    }

    #[inline]
    fn idx(&self, node: usize, block: usize, class: usize) -> usize {
        (node * 4 + block) * self.class_count + class
    }

    fn node(&self, node: usize) -> &[u32] {
        let w = 4 * self.class_count;
        &self.counts[node * w..(node + 1) * w]
    }

    fn node_mut(&mut self, node: usize) -> &mut [u32] {
        let w = 4 * self.class_count;
        &mut self.counts[node * w..(node + 1) * w]
    }
}

const RECOMMENDED: usize = 0;
const RECOMMENDED_INACTIVE: usize = 1;
const ATTEMPTED: usize = 2;
const FAILED: usize = 3;

fn neighborhood_counts(
    state: &SimulationState,
    graph: &AttributedGraph,
    node: usize,
    out: &mut [u32],
) {
    let l = state.class_count();
    out.fill(0);
    for &j in graph.adj(node) {
        if let Some(t) = state.recommendation(j) {
            out[RECOMMENDED * l + t] += 1;
            if !state.is_active(j) {
                out[RECOMMENDED_INACTIVE * l + t] += 1;
            }
        }
        let success = state.spillover_successes(j);
        let failure = state.spillover_failures(j);
        for k in 0..l {
            out[ATTEMPTED * l + k] += u32::from(success[k]) + failure[k];
            out[FAILED * l + k] += failure[k];
        }
    }
}

fn ratios(counts: &[u32], class_count: usize, out: &mut [f64]) {
    for (block, chunk) in counts.chunks_exact(class_count).enumerate() {
        let total: u32 = chunk.iter().sum();
        let dst = &mut out[block * class_count..(block + 1) * class_count];
        if total == 0 {
            dst.fill(0.0);
        } else {
            let total = f64::from(total);
            for (d, &c) in dst.iter_mut().zip(chunk) {
                *d = f64::from(c) / total;
            }
        }
    }
}

/// From-scratch `4l` feature vector for `node` using current state.
pub fn compute_features(state: &SimulationState, graph: &AttributedGraph, node: usize) -> Vec<f64> {
    let l = state.class_count();
    let mut counts = vec![0u32; 4 * l];
    neighborhood_counts(state, graph, node, &mut counts);
    let mut out = vec![0.0; 4 * l];
    ratios(&counts, l, &mut out);
    out
}

/// Folds spillover attempt outcomes into the `S` / `S̄` counters. A
/// successful record also marks its recipient active.
pub fn apply_attempt_records(state: &mut SimulationState, attempts: &[AttemptRecord]) {
    for record in attempts {
        state.record_spillover(record);
    }
}

fn refresh(state: &mut SimulationState, node: usize) {
    let l = state.class_count();
    let counts = state.block_counts.node(node).to_vec();
    ratios(&counts, l, state.dynamic_features_mut(node));
}

/// Brings cached features up to date after `node`'s round.
///
/// Must be called exactly once per round, after
/// [`crate::diffusion::apply_direct_recommendation`] and
/// [`apply_attempt_records`], with the same attempt list. Touches the
/// neighbors of `node` and the neighbors of every attempted recipient.
pub fn update_round_features(
    state: &mut SimulationState,
    graph: &AttributedGraph,
    node: usize,
    attempts: &[AttemptRecord],
) {
    let Some(class) = state.recommendation(node) else {
        return;
    };
    let source_active = state.is_active(node);
    for &q in graph.adj(node) {
        let i = state.block_counts.idx(q, RECOMMENDED, class);
        state.block_counts.counts[i] += 1;
        if !source_active {
            let i = state.block_counts.idx(q, RECOMMENDED_INACTIVE, class);
            state.block_counts.counts[i] += 1;
        }
    }

    for record in attempts {
        let q = record.recipient;
        // A recipient whose own direct recommendation had failed leaves the
        // "recommended but inactive" set of its neighbors.
        let reactivated = if record.success {
            state.recommendation(q)
        } else {
            None
        };
        for &r in graph.adj(q) {
            let counts = &mut state.block_counts;
            let i = counts.idx(r, ATTEMPTED, record.class);
            counts.counts[i] += 1;
            if !record.success {
                let i = counts.idx(r, FAILED, record.class);
                counts.counts[i] += 1;
            }
            if let Some(t) = reactivated {
                let i = counts.idx(r, RECOMMENDED_INACTIVE, t);
                counts.counts[i] -= 1;
            }
        }
    }

    for &q in graph.adj(node) {
        refresh(state, q);
    }
    for record in attempts {
        for &r in graph.adj(record.recipient) {
            refresh(state, r);
        }
    }
}

/// Recomputes every node's counts and cached features from the raw state.
/// Use after building a state by hand.
pub fn rebuild_features(state: &mut SimulationState, graph: &AttributedGraph) {
    let l = state.class_count();
    let mut counts = vec![0u32; 4 * l];
    for node in 0..graph.node_count() {
        neighborhood_counts(state, graph, node, &mut counts);
        state.block_counts.node_mut(node).copy_from_slice(&counts);
        refresh(state, node);
    }
}
