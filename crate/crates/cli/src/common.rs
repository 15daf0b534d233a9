//! Shared CLI plumbing: input loading, budget flags, result serialization.

use std::path::Path;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;

use boltzclust::anneal::{Budget, ProposalOrder};
use boltzclust::graph::{self, Graph};
use boltzclust::solve::SolveConfig;
use boltzclust::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Quadratic distance minimization on a one-hot Boltzmann machine
    QpBm,
    /// Quadratic K-medoids on a K-hot Boltzmann machine
    KmedBm,
    /// Louvain modularity maximization
    Louvain,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::QpBm => "qp-bm",
            Method::KmedBm => "kmed-bm",
            Method::Louvain => "louvain",
        }
    }
}

/// Parse durations like `10s`, `1.5s`, `250ms` or plain seconds.
pub fn parse_duration(s: &str) -> Result<Duration, String> {
    let s = s.trim();
    let (value, scale) = if let Some(v) = s.strip_suffix("ms") {
        (v, 1e-3)
    } else if let Some(v) = s.strip_suffix('s') {
        (v, 1.0)
    } else {
        (s, 1.0)
    };
    let secs: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("cannot parse duration `{s}`"))?;
    if !(secs > 0.0) {
        return Err(format!("duration must be positive, got `{s}`"));
    }
    Ok(Duration::from_secs_f64(secs * scale))
}

/// Budget and annealer flags shared by `cluster` and `bench`.
#[derive(Debug, Args, Clone)]
pub struct SolverFlags {
    /// Wall-clock budget, e.g. `10s`, `1500ms` (default 10s if no other budget)
    #[arg(long, value_parser = parse_duration)]
    pub budget: Option<Duration>,

    /// Stop after this many sweeps per replica
    #[arg(long)]
    pub max_sweeps: Option<u64>,

    /// Stop once the incumbent energy reaches this value
    #[arg(long)]
    pub target_energy: Option<f64>,

    /// Stop after this many barriers without improvement (0 disables)
    #[arg(long, default_value_t = boltzclust::anneal::DEFAULT_STALL_BARRIERS)]
    pub stall: u64,

    /// Replica count per tempering instance
    #[arg(long, default_value_t = 32)]
    pub replicas: usize,

    /// Sweeps between exchange barriers
    #[arg(long, default_value_t = 1)]
    pub sweeps_per_barrier: u64,

    /// Independent tempering instances (best result wins)
    #[arg(long, default_value_t = 1)]
    pub instances: usize,

    /// Coldest ladder temperature (overrides self-calibration; needs --tmax)
    #[arg(long, requires = "tmax")]
    pub tmin: Option<f64>,

    /// Hottest ladder temperature (overrides self-calibration; needs --tmin)
    #[arg(long, requires = "tmin")]
    pub tmax: Option<f64>,

    /// K-medoids scattering weight α (default 2)
    #[arg(long)]
    pub alpha: Option<f64>,

    /// K-medoids centrality weight β (default 1.05·(K+1)/n)
    #[arg(long)]
    pub beta: Option<f64>,

    /// Proposal slot order within a sweep
    #[arg(long, value_enum, default_value_t = OrderFlag::Random)]
    pub proposal: OrderFlag,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderFlag {
    Random,
    Sequential,
}

impl From<OrderFlag> for ProposalOrder {
    fn from(value: OrderFlag) -> ProposalOrder {
        match value {
            OrderFlag::Random => ProposalOrder::Random,
            OrderFlag::Sequential => ProposalOrder::Sequential,
        }
    }
}

impl SolverFlags {
    pub fn to_config(&self, seed: u64) -> Result<SolveConfig> {
        let mut budget = Budget {
            max_sweeps: self.max_sweeps,
            wall_clock: self.budget,
            target_energy: self.target_energy,
            stall_barriers: (self.stall > 0).then_some(self.stall),
        };
        if budget.max_sweeps.is_none()
            && budget.wall_clock.is_none()
            && budget.target_energy.is_none()
        {
            budget.wall_clock = Some(Duration::from_secs(10));
        }
        budget.validate()?;
        let ladder_bounds = match (self.tmin, self.tmax) {
            (Some(lo), Some(hi)) => Some((lo, hi)),
            _ => None,
        };
        Ok(SolveConfig {
            seed,
            replicas: self.replicas,
            sweeps_per_barrier: self.sweeps_per_barrier,
            budget,
            ladder_bounds,
            instances: self.instances,
            order: self.proposal.into(),
            alpha: self.alpha,
            beta: self.beta,
        })
    }
}

/// Load a graph by extension: `.gml` via the GML subset, anything else as an
/// edge list. Returns ground-truth labels when the GML carries them.
pub fn load_graph(path: &Path) -> Result<(Graph, Option<Vec<u32>>)> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("gml")) {
        let gml = graph::load_gml_subset(path)?;
        if gml.partial_labels {
            eprintln!(
                "warning: {} labels only part of the nodes; ground truth ignored",
                path.display()
            );
        }
        Ok((gml.graph, gml.labels))
    } else {
        Ok((graph::load_edge_list(path)?, None))
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).context("serializing JSON")?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn config_error(msg: impl Into<String>) -> anyhow::Error {
    Error::Config(msg.into()).into()
}
