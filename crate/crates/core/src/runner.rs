//! Runs every mode x repeat of an experiment and writes the results.
//!
//! Output files, per run `<mode>_seed<seed>.csv` and one `summary.json`.
//! Arms and classes in the CSV are 1-based, matching the label file format.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::bandit::LinUcb;
use crate::config::ExperimentSpec;
use crate::engine::{context_dim, run_experiment, Mode, RoundRecord};
use crate::error::{Error, Result};
use crate::graph::AttributedGraph;
use crate::metrics::{round_regret, summarize, MetricsSummary};
use crate::rng::GENERATOR_NAME;

pub const CSV_HEADER: &str =
    "round,node,predicted_arm,recommended_class,overridden,directly_activated,network_reward,dar,cum_regret,cum_bacc";

/// One seeded LinUCB run.
pub fn run_single(
    graph: &AttributedGraph,
    spec: &ExperimentSpec,
    mode: Mode,
    seed: u64,
    alpha: f64,
) -> Result<Vec<RoundRecord>> {
    let policy = LinUcb::new(
        graph.class_count(),
        context_dim(graph, mode),
        spec.bandit.params(alpha),
    )?;
    run_experiment(
        graph,
        spec.engine_config(mode, graph.class_count(), seed),
        policy,
    )
}

/// Alpha from `grid` with the lowest total regret on one run at `seed`;
/// the first such alpha on ties.
pub fn grid_search_alpha(
    graph: &AttributedGraph,
    spec: &ExperimentSpec,
    mode: Mode,
    grid: &[f64],
    seed: u64,
) -> Result<f64> {
    let regrets = grid
        .par_iter()
        .map(|&alpha| Ok(summarize(&run_single(graph, spec, mode, seed, alpha)?)?.total_regret))
        .collect::<Result<Vec<f64>>>()?;
    let best = (0..grid.len())
        .min_by(|&a, &b| regrets[a].total_cmp(&regrets[b]).then(a.cmp(&b)))
        .ok_or_else(|| Error::config("bandit.alpha_grid", "empty grid"))?;
    log::info!("{mode}: alpha {} selected from {grid:?}", grid[best]);
    Ok(grid[best])
}

pub fn rounds_csv(records: &[RoundRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    let (mut regret, mut aligned) = (0.0, 0usize);
    for (i, r) in records.iter().enumerate() {
        regret += round_regret(r);
        aligned += r.aligned_prediction as usize;
        let bacc = aligned as f64 / (i + 1) as f64;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.round,
            r.node,
            r.predicted_arm + 1,
            r.recommended_class + 1,
            r.overridden as u8,
            r.directly_activated as u8,
            r.network_reward,
            r.dar,
            regret,
            bacc
        )
        .expect("writing to a String cannot fail");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation; null with a single repeat.
    pub sd: Option<f64>,
    pub values: Vec<f64>,
}

impl Stat {
    pub fn new(values: Vec<f64>) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let sd = (values.len() > 1)
            .then(|| (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt());
        Self { mean, sd, values }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeSummary {
    pub alpha: f64,
    pub seeds: Vec<u64>,
    pub total_regret: Stat,
    pub bandit_accuracy: Stat,
    pub total_network_reward: Stat,
    pub override_count: Stat,
    pub final_dar: Stat,
    pub rounds: Stat,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentSummary {
    pub rng: &'static str,
    pub base_seed: u64,
    pub repeats: usize,
    pub nodes: usize,
    pub edges: usize,
    pub classes: usize,
    pub feature_dim: usize,
    pub homophily: Option<f64>,
    pub modes: BTreeMap<String, ModeSummary>,
}

struct RunResult {
    mode: Mode,
    seed: u64,
    summary: MetricsSummary,
}

fn write(path: &Path, body: &str) -> Result<()> {
    fs::write(path, body).map_err(|e| Error::io(path, e))
}

pub fn csv_path(dir: &Path, mode: Mode, seed: u64) -> PathBuf {
    dir.join(format!("{mode}_seed{seed}.csv"))
}

/// Executes the full experiment and returns the summary written to
/// `summary.json`.
pub fn run(spec: &ExperimentSpec) -> Result<ExperimentSummary> {
    spec.validate()?;
    let graph = spec.build_graph()?;
    let out = &spec.run.output_dir;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    log::info!(
        "graph: {} nodes, {} edges, {} classes, {} features",
        graph.node_count(),
        graph.edge_count(),
        graph.class_count(),
        graph.feature_dim()
    );

    let base = spec.run.seed;
    let repeats = spec.run.repeats as u64;
    let mut alphas = BTreeMap::new();
    for &mode in &spec.run.modes {
        let alpha = if spec.bandit.alpha_grid.is_empty() {
            spec.bandit.alpha
        } else {
            // tune on a seed none of the reported repeats use
            grid_search_alpha(&graph, spec, mode, &spec.bandit.alpha_grid, base + repeats)?
        };
        alphas.insert(mode, alpha);
    }

    let jobs: Vec<(Mode, u64)> = spec
        .run
        .modes
        .iter()
        .flat_map(|&m| (0..repeats).map(move |k| (m, base + k)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(mode, seed)| {
            let records = run_single(&graph, spec, mode, seed, alphas[&mode])?;
            write(&csv_path(out, mode, seed), &rounds_csv(&records))?;
            let summary = summarize(&records)?;
            log::info!(
                "{mode} seed {seed}: total regret {:.3}",
                summary.total_regret
            );
            Ok(RunResult {
                mode,
                seed,
                summary,
            })
        })
        .collect::<Result<Vec<RunResult>>>()?;

    let mut modes = BTreeMap::new();
    for &mode in &spec.run.modes {
        let runs: Vec<&RunResult> = results.iter().filter(|r| r.mode == mode).collect();
        let stat = |f: &dyn Fn(&MetricsSummary) -> f64| {
            Stat::new(runs.iter().map(|r| f(&r.summary)).collect())
        };
        modes.insert(
            mode.name().to_string(),
            ModeSummary {
                alpha: alphas[&mode],
                seeds: runs.iter().map(|r| r.seed).collect(),
                total_regret: stat(&|s| s.total_regret),
                bandit_accuracy: stat(&|s| s.bandit_accuracy),
                total_network_reward: stat(&|s| s.total_network_reward as f64),
                override_count: stat(&|s| s.override_count as f64),
                final_dar: stat(&|s| s.final_dar),
                rounds: stat(&|s| s.rounds as f64),
            },
        );
    }
    let summary = ExperimentSummary {
        rng: GENERATOR_NAME,
        base_seed: base,
        repeats: spec.run.repeats,
        nodes: graph.node_count(),
        edges: graph.edge_count(),
        classes: graph.class_count(),
        feature_dim: graph.feature_dim(),
        homophily: graph.homophily().ok(),
        modes,
    };
    let json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    write(&out.join("summary.json"), &(json + "\n"))?;
    Ok(summary)
}
