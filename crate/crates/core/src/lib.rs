//! Contextual bandit recommendation on attributed networks where a
//! recommendation can spill over to a node's neighbors.

pub mod bandit;
pub mod config;
pub mod diffusion;
pub mod engine;
pub mod error;
pub mod features;
pub mod graph;
pub mod metrics;
pub mod rng;
pub mod runner;
pub mod synth;

pub use bandit::{LinUcb, LinUcbParams, Policy, UniformRandom};
pub use diffusion::{SimulationState, SpilloverParams};
pub use engine::{run_experiment, Engine, EngineConfig, Mode, RoundRecord};
pub use error::{Error, Result};
pub use graph::AttributedGraph;
pub use metrics::{summarize, MetricsSummary};
