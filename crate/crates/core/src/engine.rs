//! The NetCB round loop.
//!
//! Each round one inactive node arrives, the bandit predicts an arm from the
//! node's context, and, in override mode once the direct activation rate has
//! stabilized, the arm may be replaced by the class with the highest expected
//! network reward over the node's inactive neighborhood. The recommendation
//! is then realized through the diffusion model and the neighborhood features
//! are brought up to date.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bandit::{argmax, build_context, Policy};
use crate::diffusion::{
    apply_direct_recommendation, sample_network_reward, SimulationState, SpilloverParams,
};
use crate::error::{Error, Result};
use crate::features::{apply_attempt_records, update_round_features};
use crate::graph::AttributedGraph;
use crate::metrics::{oracle_expected_optimum, true_expected_reward};
use crate::rng::{stream, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Plain contextual bandit on static features, rewarded for alignment.
    Baseline,
    /// Static + neighborhood features, rewarded with network reward.
    NetcbFeaturesOnly,
    /// As above, plus the expected-network-reward override.
    NetcbOverride,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Baseline, Mode::NetcbFeaturesOnly, Mode::NetcbOverride];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Baseline => "baseline",
            Mode::NetcbFeaturesOnly => "netcb_features_only",
            Mode::NetcbOverride => "netcb_override",
        }
    }

    pub fn uses_neighborhood(self) -> bool {
        !matches!(self, Mode::Baseline)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown mode `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EngineConfig {
    pub mode: Mode,
    pub spillover: SpilloverParams,
    /// Number of DAR points per slope fit (G).
    pub dar_window_g: usize,
    /// Number of consecutive slopes that must stay within the threshold (H).
    pub dar_window_h: usize,
    /// Slope threshold θ.
    pub dar_slope_threshold: f64,
    pub seed: u64,
    pub arm_count: usize,
    /// Counterfactual rollouts per round for the simulated regret; 0 disables.
    pub regret_rollouts: usize,
}

impl EngineConfig {
    pub fn new(mode: Mode, arm_count: usize, seed: u64) -> Self {
        Self {
            mode,
            spillover: SpilloverParams::default(),
            dar_window_g: 300,
            dar_window_h: 300,
            dar_slope_threshold: 1e-5,
            seed,
            arm_count,
            regret_rollouts: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Err(name) = self.spillover.validate() {
            return Err(Error::config(name, "probability must lie in [0, 1]"));
        }
        if self.dar_window_g < 2 {
            return Err(Error::config("dar_window_g", "must be at least 2"));
        }
        if self.dar_window_h < 1 {
            return Err(Error::config("dar_window_h", "must be at least 1"));
        }
        if self.dar_slope_threshold.is_nan() || self.dar_slope_threshold < 0.0 {
            return Err(Error::config("dar_slope_threshold", "must be non-negative"));
        }
        if self.arm_count < 2 {
            return Err(Error::config("arm_count", "must be at least 2"));
        }
        Ok(())
    }
}

/// Everything logged about one round.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    pub round: usize,
    pub node: usize,
    pub predicted_arm: usize,
    pub recommended_class: usize,
    pub overridden: bool,
    pub directly_activated: bool,
    pub network_reward: usize,
    pub oracle_optimal_arm: usize,
    pub oracle_expected_reward: f64,
    pub realized_expected_reward: f64,
    /// Direct activation rate after this round.
    pub dar: f64,
    /// Stability test result at decision time (before this round's DAR point).
    pub dar_stable: bool,
    pub aligned_prediction: bool,
    pub bandit_updated: bool,
    /// Mean rollout reward of the oracle arm minus that of the recommended
    /// class, when rollouts are enabled.
    pub simulated_regret: Option<f64>,
}

/// Expected network reward of recommending `candidate_arm` to `node`, using
/// `neighbor_predictions` in place of the unknown neighbor preferences.
///
/// The predicted arm is assumed aligned (`p_a`, then `p_aa`/`p_am`), any other
/// arm misaligned (`p_m`, then `p_ma`/`p_mm`). Only inactive neighbors count.
pub fn expected_network_reward(
    state: &SimulationState,
    graph: &AttributedGraph,
    params: &SpilloverParams,
    node: usize,
    candidate_arm: usize,
    predicted_arm: usize,
    neighbor_predictions: &[Option<usize>],
) -> Result<f64> {
    graph.check_node(node)?;
    let source_aligned = candidate_arm == predicted_arm;
    let mut spill = 0.0;
    for &j in graph.adj(node) {
        if state.is_active(j) {
            continue;
        }
        let arm_j = neighbor_predictions
            .get(j)
            .copied()
            .flatten()
            .ok_or_else(|| Error::Protocol(format!("no prediction for inactive neighbor {j}")))?;
        spill += params.spillover(source_aligned, candidate_arm == arm_j);
    }
    let p = params.direct(source_aligned);
    Ok(p + p * spill)
}

/// Ordinary least-squares slope of `values` against `0, 1, 2, …`.
///
/// Symmetric pairs are differenced first so a constant window yields exactly 0.
pub fn ols_slope(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let center = (n as f64 - 1.0) / 2.0;
    let mut num = 0.0;
    for k in 0..n / 2 {
        num += (center - k as f64) * (values[n - 1 - k] - values[k]);
    }
    let nf = n as f64;
    let sxx = nf * (nf * nf - 1.0) / 12.0;
    num / sxx
}

/// True iff each of the last `h` windows of `g` consecutive DAR values has an
/// OLS slope of magnitude at most `threshold`. Needs `g + h − 1` points.
pub fn dar_is_stable(history: &[f64], g: usize, h: usize, threshold: f64) -> bool {
    if g == 0 || h == 0 || history.len() < g + h - 1 {
        return false;
    }
    let m = history.len();
    (m - h + 1..=m).all(|end| ols_slope(&history[end - g..end]).abs() <= threshold)
}

/// Incremental form of [`dar_is_stable`]: one slope per new point and a run
/// length of consecutive in-threshold slopes.
#[derive(Debug, Clone)]
pub struct DarTracker {
    g: usize,
    h: usize,
    threshold: f64,
    history: Vec<f64>,
    stable_run: usize,
}

impl DarTracker {
    pub fn new(g: usize, h: usize, threshold: f64) -> Self {
        Self {
            g,
            h,
            threshold,
            history: Vec::new(),
            stable_run: 0,
        }
    }

    pub fn push(&mut self, dar: f64) {
        self.history.push(dar);
        let m = self.history.len();
        if m >= self.g {
            if ols_slope(&self.history[m - self.g..]).abs() <= self.threshold {
                self.stable_run += 1;
            } else {
                self.stable_run = 0;
            }
        }
    }

    pub fn is_stable(&self) -> bool {
        self.stable_run >= self.h
    }

    pub fn history(&self) -> &[f64] {
        &self.history
    }
}

/// One experiment run: graph, state, bandit and RNG streams.
pub struct Engine<'g, P> {
    graph: &'g AttributedGraph,
    config: EngineConfig,
    policy: P,
    state: SimulationState,
    rng: ChaCha8Rng,
    dar: DarTracker,
    direct_recommendations: usize,
    direct_activations: usize,
    rounds: usize,
    bandit_updates: usize,
    neighbor_predictions: Vec<Option<usize>>,
}

impl<'g, P: Policy> Engine<'g, P> {
    pub fn new(graph: &'g AttributedGraph, config: EngineConfig, policy: P) -> Result<Self> {
        config.validate()?;
        if config.arm_count != graph.class_count() || policy.arm_count() != graph.class_count() {
            return Err(Error::InvalidArgument(format!(
                "arm count mismatch: config {}, policy {}, graph classes {}",
                config.arm_count,
                policy.arm_count(),
                graph.class_count()
            )));
        }
        let expected_dim = context_dim(graph, config.mode);
        if policy.context_dim() != expected_dim {
            return Err(Error::DimensionMismatch {
                expected: expected_dim,
                actual: policy.context_dim(),
            });
        }
        Ok(Self {
            graph,
            rng: stream(config.seed, Stream::Diffusion),
            dar: DarTracker::new(
                config.dar_window_g,
                config.dar_window_h,
                config.dar_slope_threshold,
            ),
            config,
            policy,
            state: SimulationState::for_graph(graph),
            direct_recommendations: 0,
            direct_activations: 0,
            rounds: 0,
            bandit_updates: 0,
            neighbor_predictions: vec![None; graph.node_count()],
        })
    }

    pub fn state(&self) -> &SimulationState {
        &self.state
    }

    pub fn policy(&self) -> &P {
        &self.policy
    }

    pub fn dar_tracker(&self) -> &DarTracker {
        &self.dar
    }

    pub fn bandit_updates(&self) -> usize {
        self.bandit_updates
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    fn context(&self, node: usize) -> Result<Vec<f64>> {
        let x = self.graph.features(node);
        if self.config.mode.uses_neighborhood() {
            build_context(
                x,
                self.state.dynamic_features(node),
                self.graph.feature_dim(),
                self.graph.class_count(),
            )
        } else {
            Ok(x.to_vec())
        }
    }

    /// Runs one round for an arriving inactive node.
    pub fn run_round(&mut self, node: usize) -> Result<RoundRecord> {
        let graph = self.graph;
        let params = self.config.spillover;
        graph.check_node(node)?;
        if self.state.is_active(node) || self.state.recommendation(node).is_some() {
            return Err(Error::Protocol(format!(
                "node {node} is not an unrecommended inactive node"
            )));
        }

        let context = self.context(node)?;
        let predicted = self.policy.select(&context)?.arm;
        self.state.set_prediction(node, predicted);

        let dar_stable = self.dar.is_stable();
        let mut recommended = predicted;
        if self.config.mode == Mode::NetcbOverride && dar_stable {
            for &j in graph.adj(node) {
                if !self.state.is_active(j) {
                    let ctx = self.context(j)?;
                    self.neighbor_predictions[j] = Some(self.policy.select(&ctx)?.arm);
                }
            }
            let values = (0..graph.class_count())
                .map(|arm| {
                    expected_network_reward(
                        &self.state,
                        graph,
                        &params,
                        node,
                        arm,
                        predicted,
                        &self.neighbor_predictions,
                    )
                })
                .collect::<Result<Vec<f64>>>()?;
            for &j in graph.adj(node) {
                self.neighbor_predictions[j] = None;
            }
            let best = argmax(&values);
            if values[best] > values[predicted] {
                recommended = best;
            }
        }
        let overridden = recommended != predicted;

        let (oracle_arm, oracle_value) =
            oracle_expected_optimum(&self.state, graph, &params, node)?;
        let realized_value = true_expected_reward(&self.state, graph, &params, node, recommended);
        let simulated_regret = (self.config.regret_rollouts > 0).then(|| {
            let mut rng = stream(self.config.seed, Stream::Rollout(self.rounds as u64));
            let k = self.config.regret_rollouts;
            let mut diff = 0.0;
            for _ in 0..k {
                diff +=
                    sample_network_reward(&self.state, graph, &params, &mut rng, node, oracle_arm)
                        as f64;
                diff -=
                    sample_network_reward(&self.state, graph, &params, &mut rng, node, recommended)
                        as f64;
            }
            diff / k as f64
        });

        let outcome = apply_direct_recommendation(
            &mut self.state,
            graph,
            &params,
            &mut self.rng,
            node,
            recommended,
        )?;

        let aligned_prediction = predicted == graph.label(node);
        let reward = match self.config.mode {
            Mode::Baseline => Some(if aligned_prediction { 1.0 } else { 0.0 }),
            _ if overridden => None,
            _ => Some(outcome.new_activations as f64),
        };
        if let Some(r) = reward {
            self.policy.update(predicted, &context, r)?;
            self.bandit_updates += 1;
        }

        apply_attempt_records(&mut self.state, &outcome.attempts);
        update_round_features(&mut self.state, graph, node, &outcome.attempts);

        self.direct_recommendations += 1;
        if outcome.activated {
            self.direct_activations += 1;
        }
        let dar = self.direct_activations as f64 / self.direct_recommendations as f64;
        self.dar.push(dar);

        let record = RoundRecord {
            round: self.rounds,
            node,
            predicted_arm: predicted,
            recommended_class: recommended,
            overridden,
            directly_activated: outcome.activated,
            network_reward: outcome.new_activations,
            oracle_optimal_arm: oracle_arm,
            oracle_expected_reward: oracle_value,
            realized_expected_reward: realized_value,
            dar,
            dar_stable,
            aligned_prediction,
            bandit_updated: reward.is_some(),
            simulated_regret,
        };
        self.rounds += 1;
        Ok(record)
    }

    /// Seeded uniform arrival order over all nodes.
    pub fn arrival_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.graph.node_count()).collect();
        let mut rng = stream(self.config.seed, Stream::Arrival);
        order.shuffle(&mut rng);
        order
    }

    /// Runs every arrival in order, skipping nodes that are already active.
    pub fn run(&mut self) -> Result<Vec<RoundRecord>> {
        let order = self.arrival_order();
        let mut records = Vec::with_capacity(order.len());
        for node in order {
            if self.state.is_active(node) {
                continue;
            }
            records.push(self.run_round(node)?);
        }
        Ok(records)
    }
}

/// Context length a policy must accept for `mode` on `graph`.
pub fn context_dim(graph: &AttributedGraph, mode: Mode) -> usize {
    if mode.uses_neighborhood() {
        graph.feature_dim() + 4 * graph.class_count()
    } else {
        graph.feature_dim()
    }
}

pub fn run_experiment<P: Policy>(
    graph: &AttributedGraph,
    config: EngineConfig,
    policy: P,
) -> Result<Vec<RoundRecord>> {
    Engine::new(graph, config, policy)?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bandit::{LinUcb, LinUcbParams, UniformRandom};

    fn graph(n: usize, edges: &[(usize, usize)], labels: Vec<usize>, l: usize) -> AttributedGraph {
        let features = (0..n).map(|i| vec![1.0, (i % 3) as f64]).collect();
        AttributedGraph::new(edges.iter().copied(), features, labels, l).unwrap()
    }

    fn linucb(g: &AttributedGraph, mode: Mode) -> LinUcb {
        LinUcb::new(
            g.class_count(),
            context_dim(g, mode),
            LinUcbParams::default(),
        )
        .unwrap()
    }

    #[test]
    fn eq_one_and_two_hand_values() {
        // node 0 with neighbors 1, 2 (predicted 0) and 3 (predicted 1)
        let g = graph(5, &[(0, 1), (0, 2), (0, 3)], vec![0, 0, 0, 1, 1], 2);
        let s = SimulationState::for_graph(&g);
        let p = SpilloverParams::default();
        let preds = vec![None, Some(0), Some(0), Some(1), None];
        let e1 = expected_network_reward(&s, &g, &p, 0, 0, 0, &preds).unwrap();
        assert!((e1 - 1.12).abs() < 1e-12);

        // alternate arm 1 matches neighbor 3 only
        let g = graph(2, &[(0, 1)], vec![0, 1], 2);
        let s = SimulationState::for_graph(&g);
        let e2 = expected_network_reward(&s, &g, &p, 0, 1, 0, &[None, Some(1)]).unwrap();
        assert!((e2 - 0.65).abs() < 1e-12);

        let lonely = graph(1, &[], vec![0], 2);
        let s = SimulationState::for_graph(&lonely);
        assert_eq!(
            expected_network_reward(&s, &lonely, &p, 0, 0, 0, &[None]).unwrap(),
            0.7
        );
    }

    #[test]
    fn missing_neighbor_prediction_is_an_error() {
        let g = graph(2, &[(0, 1)], vec![0, 1], 2);
        let s = SimulationState::for_graph(&g);
        let err =
            expected_network_reward(&s, &g, &SpilloverParams::default(), 0, 0, 0, &[None, None]);
        assert!(matches!(err, Err(Error::Protocol(_))));
    }

    #[test]
    fn direct_probability_scaling_keeps_argmax() {
        let g = graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)], vec![0, 1, 1, 1, 0], 2);
        let s = SimulationState::for_graph(&g);
        let preds = vec![None, Some(1), Some(1), Some(1), Some(0)];
        let base = SpilloverParams::default();
        let pick = |p: &SpilloverParams| {
            let v: Vec<f64> = (0..2)
                .map(|a| expected_network_reward(&s, &g, p, 0, a, 0, &preds).unwrap())
                .collect();
            argmax(&v)
        };
        for c in [0.2, 0.5, 1.3] {
            let scaled = SpilloverParams {
                p_a: base.p_a * c,
                p_m: base.p_m * c,
                ..base
            };
            assert_eq!(pick(&scaled), pick(&base));
        }
    }

    #[test]
    fn slope_of_line_and_constant() {
        let line: Vec<f64> = (0..50).map(|i| 0.25 + 0.01 * i as f64).collect();
        assert!((ols_slope(&line) - 0.01).abs() < 1e-12);
        assert_eq!(ols_slope(&[0.3; 17]), 0.0);
    }

    #[test]
    fn stability_examples() {
        let constant = vec![0.6; 600];
        assert!(dar_is_stable(&constant, 300, 300, 0.0));
        assert!(!dar_is_stable(&constant[..598], 300, 300, 1e-5));
        assert!(dar_is_stable(&constant[..599], 300, 300, 1e-5));
        let line: Vec<f64> = (0..600).map(|i| 0.1 + 1e-4 * i as f64).collect();
        assert!(!dar_is_stable(&line, 300, 300, 1e-5));
        assert!(dar_is_stable(&line, 300, 300, 2e-4));
    }

    #[test]
    fn tracker_matches_batch_definition() {
        let mut t = DarTracker::new(5, 4, 0.01);
        let mut seq = Vec::new();
        for i in 0..60 {
            let v = if i < 20 {
                i as f64 * 0.05
            } else {
                1.0 + 0.001 * ((i * 7) % 5) as f64
            };
            seq.push(v);
            t.push(v);
            assert_eq!(t.is_stable(), dar_is_stable(&seq, 5, 4, 0.01), "at {i}");
        }
    }

    #[test]
    fn baseline_aligned_forced_activation_rewards_one() {
        let g = graph(3, &[(0, 1)], vec![0, 0, 1], 2);
        let mut cfg = EngineConfig::new(Mode::Baseline, 2, 1);
        cfg.spillover.p_a = 1.0;
        let mut e = Engine::new(&g, cfg, linucb(&g, Mode::Baseline)).unwrap();
        // fresh LinUCB ties to arm 0, which is node 0's label
        let r = e.run_round(0).unwrap();
        assert!(r.aligned_prediction && r.directly_activated && r.bandit_updated);
        assert!((e.policy().response(0).sum() - g.features(0).iter().sum::<f64>()).abs() < 1e-12);
        assert!(e
            .run_round(0)
            .unwrap_err()
            .to_string()
            .contains("not an unrecommended"));
    }

    #[test]
    fn override_needs_stable_dar() {
        let g = graph(
            6,
            &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)],
            vec![0, 1, 1, 1, 1, 1],
            2,
        );
        let mut cfg = EngineConfig::new(Mode::NetcbOverride, 2, 3);
        cfg.dar_window_g = 2;
        cfg.dar_window_h = 1;
        let records = run_experiment(&g, cfg, linucb(&g, Mode::NetcbOverride)).unwrap();
        assert!(records.iter().all(|r| !r.overridden));
    }

    /// Node 0 is predicted arm 0 while its five inactive neighbors are all
    /// predicted arm 1: Eq. 1 gives 0.7, Eq. 2 gives 0.5·(1 + 5·0.3) = 1.25.
    #[test]
    fn override_fires_when_alternate_is_strictly_better() {
        // static feature (1, 0) for node 0 and (0, 1) for the leaves
        let n = 9;
        let mut edges: Vec<(usize, usize)> = (1..6).map(|j| (0, j)).collect();
        edges.push((6, 7));
        edges.push((7, 8));
        let features: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                if i == 0 || i >= 6 {
                    vec![1.0, 0.0]
                } else {
                    vec![0.0, 1.0]
                }
            })
            .collect();
        let g = AttributedGraph::new(edges, features, vec![0, 1, 1, 1, 1, 1, 0, 0, 0], 2).unwrap();

        let mut cfg = EngineConfig::new(Mode::NetcbOverride, 2, 3);
        cfg.dar_window_g = 2;
        cfg.dar_window_h = 1;
        cfg.spillover.p_a = 1.0; // deterministic DAR of 1 makes the gate open early
        let params = LinUcbParams {
            alpha: 0.0,
            ..Default::default()
        };
        let dim = context_dim(&g, Mode::NetcbOverride);
        let mut policy = LinUcb::new(2, dim, params).unwrap();
        // teach: static (0,1) -> arm 1, static (1,0) -> arm 0
        let mut leaf = vec![0.0; dim];
        leaf[1] = 1.0;
        let mut hub = vec![0.0; dim];
        hub[0] = 1.0;
        for _ in 0..5 {
            policy.update(1, &leaf, 1.0).unwrap();
            policy.update(0, &hub, 1.0).unwrap();
        }
        let mut e = Engine::new(&g, cfg, policy).unwrap();
        e.run_round(6).unwrap();
        e.run_round(8).unwrap();
        assert!(e.dar_tracker().is_stable());
        let updates = e.bandit_updates();

        let r = e.run_round(0).unwrap();
        assert_eq!(r.predicted_arm, 0);
        assert_eq!(r.recommended_class, 1);
        assert!(r.overridden && r.dar_stable && !r.bandit_updated);
        assert_eq!(e.bandit_updates(), updates);
        assert!(
            e.state().prediction(1).is_none(),
            "neighbor predictions are transient"
        );
    }

    #[test]
    fn no_activation_means_every_node_gets_a_round() {
        let g = graph(
            8,
            &[(0, 1), (1, 2), (2, 3), (4, 5), (6, 7)],
            vec![0, 1, 0, 1, 0, 1, 0, 1],
            2,
        );
        let mut cfg = EngineConfig::new(Mode::NetcbFeaturesOnly, 2, 9);
        cfg.spillover = SpilloverParams {
            p_a: 0.0,
            p_m: 0.0,
            p_aa: 0.0,
            p_am: 0.0,
            p_ma: 0.0,
            p_mm: 0.0,
        };
        let records = run_experiment(&g, cfg, linucb(&g, Mode::NetcbFeaturesOnly)).unwrap();
        assert_eq!(records.len(), 8);
        assert!(records.iter().all(|r| r.network_reward == 0));
    }

    #[test]
    fn full_cascade_on_complete_graph_takes_one_round() {
        let n = 6;
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        let g = graph(n, &edges, vec![0, 1, 2, 0, 1, 2], 3);
        let mut cfg = EngineConfig::new(Mode::NetcbOverride, 3, 4);
        cfg.spillover = SpilloverParams {
            p_a: 1.0,
            p_m: 1.0,
            p_aa: 1.0,
            p_am: 1.0,
            p_ma: 1.0,
            p_mm: 1.0,
        };
        let records = run_experiment(&g, cfg, linucb(&g, Mode::NetcbOverride)).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].network_reward, n);
    }

    #[test]
    fn same_seed_same_records() {
        let edges: Vec<_> = (0..20)
            .map(|i| (i, (i * 7 + 3) % 20))
            .filter(|(a, b)| a != b)
            .collect();
        let labels: Vec<usize> = (0..20).map(|i| i % 3).collect();
        let g = graph(20, &edges, labels, 3);
        for mode in Mode::ALL {
            let mut cfg = EngineConfig::new(mode, 3, 17);
            cfg.dar_window_g = 3;
            cfg.dar_window_h = 2;
            cfg.dar_slope_threshold = 0.5;
            cfg.regret_rollouts = 4;
            let a = run_experiment(&g, cfg.clone(), linucb(&g, mode)).unwrap();
            let b = run_experiment(&g, cfg, linucb(&g, mode)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn round_and_update_accounting() {
        let edges: Vec<_> = (0..40)
            .map(|i| (i, (i * 11 + 5) % 40))
            .filter(|(a, b)| a != b)
            .collect();
        let labels: Vec<usize> = (0..40).map(|i| i % 2).collect();
        let g = graph(40, &edges, labels, 2);
        for mode in Mode::ALL {
            let mut cfg = EngineConfig::new(mode, 2, 5);
            cfg.dar_window_g = 2;
            cfg.dar_window_h = 1;
            cfg.dar_slope_threshold = 1.0;
            let policy = UniformRandom::new(2, context_dim(&g, mode), stream(5, Stream::Policy));
            let mut e = Engine::new(&g, cfg, policy).unwrap();
            let records = e.run().unwrap();
            let overridden = records.iter().filter(|r| r.overridden).count();
            assert_eq!(e.bandit_updates(), records.len() - overridden);
            assert!(records.len() <= g.node_count());
            let never_recommended: Vec<usize> = (0..40)
                .filter(|&i| e.state().recommendation(i).is_none())
                .collect();
            assert_eq!(records.len() + never_recommended.len(), 40);
            assert!(never_recommended.iter().all(|&i| e.state().is_active(i)));
            if mode != Mode::NetcbOverride {
                assert_eq!(overridden, 0);
            }
            for r in &records {
                assert!(!r.overridden || r.dar_stable);
                assert!(r.directly_activated || r.network_reward == 0);
                assert!(r.oracle_expected_reward >= r.realized_expected_reward);
            }
        }
    }
}
