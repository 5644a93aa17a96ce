//! Single-hop heterogeneous independent-cascade activation.
//!
//! A direct recommendation succeeds with `p_a` (aligned) or `p_m`
//! (misaligned). A successful source then makes one independent attempt on
//! every inactive neighbor, with a probability picked by the alignment of the
//! source's recommendation with the source (`s`) and with the recipient
//! (`r`). Recipients activated this way do not propagate further.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::BlockCounts;
use crate::graph::AttributedGraph;
use crate::rng::bernoulli;

/// Direct and spillover activation probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpilloverParams {
    pub p_a: f64,
    pub p_m: f64,
    pub p_aa: f64,
    pub p_am: f64,
    pub p_ma: f64,
    pub p_mm: f64,
}

impl Default for SpilloverParams {
    fn default() -> Self {
        Self {
            p_a: 0.7,
            p_m: 0.5,
            p_aa: 0.3,
            p_am: 0.0,
            p_ma: 0.3,
            p_mm: 0.0,
        }
    }
}

impl SpilloverParams {
    pub fn fields(&self) -> [(&'static str, f64); 6] {
        [
            ("p_a", self.p_a),
            ("p_m", self.p_m),
            ("p_aa", self.p_aa),
            ("p_am", self.p_am),
            ("p_ma", self.p_ma),
            ("p_mm", self.p_mm),
        ]
    }

    /// Fails with the name of the first field outside `[0, 1]`.
    pub fn validate(&self) -> std::result::Result<(), &'static str> {
        match self
            .fields()
            .into_iter()
            .find(|(_, p)| !(0.0..=1.0).contains(p))
        {
            Some((name, _)) => Err(name),
            None => Ok(()),
        }
    }

    /// Probability that a direct recommendation activates its target.
    #[inline]
    pub fn direct(&self, aligned: bool) -> f64 {
        if aligned {
            self.p_a
        } else {
            self.p_m
        }
    }

    /// `p_sr` for a source whose recommendation is `source_aligned` with its
    /// own preference and `recipient_aligned` with the recipient's.
    #[inline]
    pub fn spillover(&self, source_aligned: bool, recipient_aligned: bool) -> f64 {
        match (source_aligned, recipient_aligned) {
            (true, true) => self.p_aa,
            (true, false) => self.p_am,
            (false, true) => self.p_ma,
            (false, false) => self.p_mm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActivationKind {
    Direct,
    Spillover { source_aligned: bool },
}

pub fn activation_probability(
    params: &SpilloverParams,
    kind: ActivationKind,
    recipient_aligned: bool,
) -> f64 {
    match kind {
        ActivationKind::Direct => params.direct(recipient_aligned),
        ActivationKind::Spillover { source_aligned } => {
            params.spillover(source_aligned, recipient_aligned)
        }
    }
}

/// One spillover attempt on an inactive neighbor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AttemptRecord {
    pub recipient: usize,
    /// The source's recommended class.
    pub class: usize,
    pub success: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DirectOutcome {
    pub activated: bool,
    /// The source itself plus every successful spillover.
    pub new_activations: usize,
    pub attempts: Vec<AttemptRecord>,
}

/// Mutable per-node simulation state for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationState {
    class_count: usize,
    active: Vec<bool>,
    recommendation: Vec<Option<usize>>,
    prediction: Vec<Option<usize>>,
    spill_success: Vec<u8>,
    spill_failure: Vec<u32>,
    dynamic: Vec<f64>,
    pub(crate) block_counts: BlockCounts,
}

impl SimulationState {
    /// All nodes inactive, no predictions or recommendations, zero counters
    /// and zero dynamic features.
    pub fn new(node_count: usize, class_count: usize) -> Self {
        Self {
            class_count,
            active: vec![false; node_count],
            recommendation: vec![None; node_count],
            prediction: vec![None; node_count],
            spill_success: vec![0; node_count * class_count],
            spill_failure: vec![0; node_count * class_count],
            dynamic: vec![0.0; node_count * 4 * class_count],
            block_counts: BlockCounts::new(node_count, class_count),
        }
    }

    pub fn for_graph(graph: &AttributedGraph) -> Self {
        Self::new(graph.node_count(), graph.class_count())
    }

    pub fn node_count(&self) -> usize {
        self.active.len()
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    #[inline]
    pub fn is_active(&self, node: usize) -> bool {
        self.active[node]
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    #[inline]
    pub fn recommendation(&self, node: usize) -> Option<usize> {
        self.recommendation[node]
    }

    #[inline]
    pub fn prediction(&self, node: usize) -> Option<usize> {
        self.prediction[node]
    }

    pub fn set_prediction(&mut self, node: usize, arm: usize) {
        self.prediction[node] = Some(arm);
    }

    /// `S_i`: per-class 0/1 spillover-activation flags.
    pub fn spillover_successes(&self, node: usize) -> &[u8] {
        let l = self.class_count;
        &self.spill_success[node * l..(node + 1) * l]
    }

    /// `S̄_i`: per-class counts of failed spillover attempts.
    pub fn spillover_failures(&self, node: usize) -> &[u32] {
        let l = self.class_count;
        &self.spill_failure[node * l..(node + 1) * l]
    }

    /// Cached `4l`-dimensional neighborhood features.
    pub fn dynamic_features(&self, node: usize) -> &[f64] {
        let w = 4 * self.class_count;
        &self.dynamic[node * w..(node + 1) * w]
    }

    pub(crate) fn dynamic_features_mut(&mut self, node: usize) -> &mut [f64] {
        let w = 4 * self.class_count;
        &mut self.dynamic[node * w..(node + 1) * w]
    }

    pub(crate) fn activate(&mut self, node: usize) {
        self.active[node] = true;
    }

    pub(crate) fn record_spillover(&mut self, record: &AttemptRecord) {
        let idx = record.recipient * self.class_count + record.class;
        if record.success {
            self.active[record.recipient] = true;
            self.spill_success[idx] = 1;
        } else {
            self.spill_failure[idx] += 1;
        }
    }
}

/// Recommends `class` to `node` and runs the single-hop cascade.
///
/// Updates activation flags and `t_node`; spillover counters are left to
/// [`crate::features::apply_attempt_records`], which consumes the returned
/// attempt list. RNG consumption: one draw for the direct recommendation,
/// then, only if it succeeds, one draw per inactive neighbor in ascending id
/// order.
pub fn apply_direct_recommendation<R: RngCore + ?Sized>(
    state: &mut SimulationState,
    graph: &AttributedGraph,
    params: &SpilloverParams,
    rng: &mut R,
    node: usize,
    class: usize,
) -> Result<DirectOutcome> {
    graph.check_node(node)?;
    graph.check_class(class)?;
    if state.is_active(node) {
        return Err(Error::Protocol(format!(
            "node {node} is already active and cannot be recommended"
        )));
    }
    if state.recommendation(node).is_some() {
        return Err(Error::Protocol(format!(
            "node {node} has already received a recommendation"
        )));
    }

    state.recommendation[node] = Some(class);
    let source_aligned = class == graph.label(node);
    if !bernoulli(rng, params.direct(source_aligned)) {
        return Ok(DirectOutcome::default());
    }
    state.activate(node);

    let mut attempts = Vec::new();
    let mut new_activations = 1;
    for &j in graph.adj(node) {
        if state.is_active(j) {
            continue;
        }
        let p = params.spillover(source_aligned, class == graph.label(j));
        let success = bernoulli(rng, p);
        if success {
            state.activate(j);
            new_activations += 1;
        }
        attempts.push(AttemptRecord {
            recipient: j,
            class,
            success,
        });
    }
    Ok(DirectOutcome {
        activated: true,
        new_activations,
        attempts,
    })
}

/// Draws the network reward `node` would produce if recommended `class`,
/// without touching `state`. Same draw order as
/// [`apply_direct_recommendation`].
pub fn sample_network_reward<R: RngCore + ?Sized>(
    state: &SimulationState,
    graph: &AttributedGraph,
    params: &SpilloverParams,
    rng: &mut R,
    node: usize,
    class: usize,
) -> usize {
    let source_aligned = class == graph.label(node);
    if !bernoulli(rng, params.direct(source_aligned)) {
        return 0;
    }
    1 + graph
        .adj(node)
        .iter()
        .filter(|&&j| !state.is_active(j))
        .filter(|&&j| {
            bernoulli(
                rng,
                params.spillover(source_aligned, class == graph.label(j)),
            )
        })
        .count()
}
