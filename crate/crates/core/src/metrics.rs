//! Bandit accuracy, direct activation rate and regret.
//!
//! Regret is charged per round as the exact expected network reward of the
//! best arm minus that of the class actually recommended, both under the
//! nodes' true labels. Single-hop cascades with independent attempts make
//! both expectations closed-form.

use serde::Serialize;

use crate::diffusion::{SimulationState, SpilloverParams};
use crate::engine::RoundRecord;
use crate::error::{Error, Result};
use crate::graph::AttributedGraph;

/// Exact expected number of new activations if `node` is recommended `arm`.
pub fn true_expected_reward(
    state: &SimulationState,
    graph: &AttributedGraph,
    params: &SpilloverParams,
    node: usize,
    arm: usize,
) -> f64 {
    let source_aligned = arm == graph.label(node);
    let spill: f64 = graph
        .adj(node)
        .iter()
        .filter(|&&j| !state.is_active(j))
        .map(|&j| params.spillover(source_aligned, arm == graph.label(j)))
        .sum();
    let p = params.direct(source_aligned);
    p + p * spill
}

/// Arm with maximal expected network reward under true labels, lowest index
/// on ties.
pub fn oracle_expected_optimum(
    state: &SimulationState,
    graph: &AttributedGraph,
    params: &SpilloverParams,
    node: usize,
) -> Result<(usize, f64)> {
    graph.check_node(node)?;
    if state.is_active(node) {
        return Err(Error::Protocol(format!(
            "oracle queried for active node {node}"
        )));
    }
    let mut best = (0, true_expected_reward(state, graph, params, node, 0));
    for arm in 1..graph.class_count() {
        let v = true_expected_reward(state, graph, params, node, arm);
        if v > best.1 {
            best = (arm, v);
        }
    }
    Ok(best)
}

pub fn round_regret(record: &RoundRecord) -> f64 {
    record.oracle_expected_reward - record.realized_expected_reward
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsSummary {
    pub bandit_accuracy: f64,
    pub final_dar: f64,
    pub cumulative_regret_series: Vec<f64>,
    pub total_regret: f64,
    /// Sum of per-round simulated regrets, when every round carries one.
    pub total_simulated_regret: Option<f64>,
    pub total_network_reward: usize,
    pub rounds: usize,
    pub override_count: usize,
}

pub fn summarize(records: &[RoundRecord]) -> Result<MetricsSummary> {
    let last = records
        .last()
        .ok_or(Error::UndefinedStatistic("summary of an empty run"))?;
    let mut running = 0.0;
    let cumulative_regret_series: Vec<f64> = records
        .iter()
        .map(|r| {
            running += round_regret(r);
            running
        })
        .collect();
    let aligned = records.iter().filter(|r| r.aligned_prediction).count();
    let total_simulated_regret = records
        .iter()
        .map(|r| r.simulated_regret)
        .sum::<Option<f64>>();
    Ok(MetricsSummary {
        bandit_accuracy: aligned as f64 / records.len() as f64,
        final_dar: last.dar,
        total_regret: running,
        cumulative_regret_series,
        total_simulated_regret,
        total_network_reward: records.iter().map(|r| r.network_reward).sum(),
        rounds: records.len(),
        override_count: records.iter().filter(|r| r.overridden).count(),
    })
}
