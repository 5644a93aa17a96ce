//! TOML experiment specification.
//!
//! ```toml
//! [dataset]            # or [synthetic]
//! edges = "edges.txt"
//! features = "features.csv"
//! labels = "labels.txt"
//!
//! [spillover]
//! p_a = 0.7
//!
//! [run]
//! repeats = 10
//! modes = ["baseline", "netcb_override"]
//! ```
//!
//! Every absent field takes its default. Relative dataset paths are resolved
//! against the config file's directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bandit::LinUcbParams;
use crate::diffusion::SpilloverParams;
use crate::engine::{EngineConfig, Mode};
use crate::error::{Error, Result};
use crate::graph::AttributedGraph;
use crate::rng::{stream, Stream};
use crate::synth::{self, DatasetPaths, DEFAULT_SWAP_BUDGET};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticSpec {
    pub nodes: usize,
    pub classes: usize,
    pub within_prob: f64,
    pub between_prob: f64,
    pub dim: usize,
    #[serde(default)]
    pub seed: u64,
    /// Edge homophily to steer the generated graph toward.
    #[serde(default)]
    pub target_homophily: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DarSpec {
    pub window_g: usize,
    pub window_h: usize,
    pub slope_threshold: f64,
}

impl Default for DarSpec {
    fn default() -> Self {
        Self {
            window_g: 300,
            window_h: 300,
            slope_threshold: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BanditSpec {
    pub alpha: f64,
    pub ridge: f64,
    pub refresh_every: usize,
    /// When non-empty, each mode first picks the alpha with the lowest total
    /// regret on a tuning run, and `alpha` is ignored.
    pub alpha_grid: Vec<f64>,
}

impl Default for BanditSpec {
    fn default() -> Self {
        let p = LinUcbParams::default();
        Self {
            alpha: p.alpha,
            ridge: p.ridge,
            refresh_every: p.refresh_every,
            alpha_grid: Vec::new(),
        }
    }
}

impl BanditSpec {
    pub fn params(&self, alpha: f64) -> LinUcbParams {
        LinUcbParams {
            alpha,
            ridge: self.ridge,
            refresh_every: self.refresh_every,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSpec {
    pub repeats: usize,
    pub seed: u64,
    pub modes: Vec<Mode>,
    pub output_dir: PathBuf,
    /// Features wider than this are reduced by truncated SVD; 0 disables.
    pub reduce_dims: usize,
    /// Counterfactual rollouts per round for simulated regret; 0 disables.
    pub regret_rollouts: usize,
}

impl Default for RunSpec {
    fn default() -> Self {
        Self {
            repeats: 10,
            seed: 0,
            modes: Mode::ALL.to_vec(),
            output_dir: PathBuf::from("results"),
            reduce_dims: 500,
            regret_rollouts: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub dataset: Option<DatasetPaths>,
    #[serde(default)]
    pub synthetic: Option<SyntheticSpec>,
    #[serde(default)]
    pub spillover: SpilloverParams,
    #[serde(default)]
    pub dar: DarSpec,
    #[serde(default)]
    pub bandit: BanditSpec,
    #[serde(default)]
    pub run: RunSpec,
}

impl ExperimentSpec {
    pub fn from_toml(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| {
            let key = e
                .span()
                .map_or_else(|| "<document>".to_string(), |s| text[s].to_string());
            Error::config(key, e.message())
        })?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.dataset, &self.synthetic) {
            (Some(_), Some(_)) => {
                return Err(Error::config(
                    "dataset",
                    "give either [dataset] or [synthetic], not both",
                ))
            }
            (None, None) => {
                return Err(Error::config(
                    "dataset",
                    "missing [dataset] or [synthetic] section",
                ))
            }
            _ => {}
        }
        if let Some(s) = &self.synthetic {
            for (key, p) in [
                ("synthetic.within_prob", s.within_prob),
                ("synthetic.between_prob", s.between_prob),
            ] {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::config(key, "probability must lie in [0, 1]"));
                }
            }
            if s.classes < 2 {
                return Err(Error::config("synthetic.classes", "must be at least 2"));
            }
            if s.nodes < s.classes {
                return Err(Error::config(
                    "synthetic.nodes",
                    "must be at least the class count",
                ));
            }
            if s.dim < s.classes {
                return Err(Error::config(
                    "synthetic.dim",
                    "must be at least the class count",
                ));
            }
            if s.target_homophily
                .is_some_and(|h| !(0.0..=1.0).contains(&h))
            {
                return Err(Error::config(
                    "synthetic.target_homophily",
                    "must lie in [0, 1]",
                ));
            }
        }
        if let Err(name) = self.spillover.validate() {
            return Err(Error::config(
                format!("spillover.{name}"),
                "probability must lie in [0, 1]",
            ));
        }
        if self.dar.window_g < 2 {
            return Err(Error::config("dar.window_g", "must be at least 2"));
        }
        if self.dar.window_h < 1 {
            return Err(Error::config("dar.window_h", "must be at least 1"));
        }
        if self.dar.slope_threshold.is_nan() || self.dar.slope_threshold < 0.0 {
            return Err(Error::config("dar.slope_threshold", "must be non-negative"));
        }
        let bad_alpha = |a: f64| a.is_nan() || a < 0.0;
        if bad_alpha(self.bandit.alpha) || self.bandit.alpha_grid.iter().any(|&a| bad_alpha(a)) {
            return Err(Error::config("bandit.alpha", "must be non-negative"));
        }
        if self.bandit.ridge.is_nan() || self.bandit.ridge <= 0.0 {
            return Err(Error::config("bandit.ridge", "must be positive"));
        }
        if self.run.repeats == 0 {
            return Err(Error::config("repeats", "must be at least 1"));
        }
        if self.run.modes.is_empty() {
            return Err(Error::config("modes", "need at least one mode"));
        }
        Ok(())
    }

    /// Engine settings for one run.
    pub fn engine_config(&self, mode: Mode, arm_count: usize, seed: u64) -> EngineConfig {
        EngineConfig {
            mode,
            spillover: self.spillover,
            dar_window_g: self.dar.window_g,
            dar_window_h: self.dar.window_h,
            dar_slope_threshold: self.dar.slope_threshold,
            seed,
            arm_count,
            regret_rollouts: self.run.regret_rollouts,
        }
    }

    /// Loads or generates the graph, then applies feature reduction.
    pub fn build_graph(&self) -> Result<AttributedGraph> {
        let graph = if let Some(paths) = &self.dataset {
            synth::load_dataset(paths)?.graph
        } else {
            let s = self
                .synthetic
                .as_ref()
                .expect("validated spec has a graph source");
            let g = synth::generate_sbm(
                s.nodes,
                s.classes,
                s.within_prob,
                s.between_prob,
                s.dim,
                s.seed,
            )?;
            match s.target_homophily {
                None => g,
                Some(target) => {
                    let mut rng = stream(s.seed, Stream::Rollout(0));
                    let current = g.homophily()?;
                    let adjusted = if target > current {
                        synth::increase_homophily(&g, target, &mut rng)?
                    } else {
                        synth::decrease_homophily(&g, target, &mut rng, DEFAULT_SWAP_BUDGET)?
                    };
                    if !adjusted.reached {
                        log::warn!(
                            "homophily target {target} not reached, stopped at {:.4}",
                            adjusted.achieved
                        );
                    }
                    adjusted.graph
                }
            }
        };
        let k = self.run.reduce_dims;
        if k > 0 && graph.feature_dim() > k {
            let rows = synth::reduce_features(
                &graph.feature_rows(),
                k.min(graph.node_count()),
                self.run.seed,
            )?;
            return graph.with_features(rows);
        }
        Ok(graph)
    }
}

pub fn parse_config(path: &Path) -> Result<ExperimentSpec> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut spec = ExperimentSpec::from_toml(&text)?;
    let base = path.parent().unwrap_or(Path::new(""));
    if let Some(d) = spec.dataset.as_mut() {
        for p in [&mut d.edges, &mut d.features, &mut d.labels] {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
    }
    Ok(spec)
}
