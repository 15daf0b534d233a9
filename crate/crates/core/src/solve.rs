//! Shared solver configuration and run bookkeeping for the two Boltzmann
//! models.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::anneal::{
    run_pt, Budget, EnergyModel, ProposalOrder, PtConfig, PtResult, StopReason,
    TemperatureLadder, TracePoint,
};
use crate::error::Result;
use crate::rng;

/// Configuration shared by `qp_solve` and `kmed_solve`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveConfig {
    pub seed: u64,
    /// Replica count (ladder rungs) per tempering instance.
    pub replicas: usize,
    pub sweeps_per_barrier: u64,
    pub budget: Budget,
    /// Explicit `(t_min, t_max)` ladder bounds; self-calibrated when absent.
    pub ladder_bounds: Option<(f64, f64)>,
    /// Independent tempering instances; the best result wins.
    pub instances: usize,
    pub order: ProposalOrder,
    /// K-medoids scattering weight override (`α`).
    pub alpha: Option<f64>,
    /// K-medoids centrality weight override (`β`).
    pub beta: Option<f64>,
}

impl SolveConfig {
    /// Defaults: 32 replicas, one sweep per barrier, 10 s wall clock with
    /// stall detection, one instance, random proposal order.
    pub fn new(seed: u64) -> SolveConfig {
        SolveConfig {
            seed,
            replicas: 32,
            sweeps_per_barrier: 1,
            budget: Budget::wall_clock(Duration::from_secs(10)),
            ladder_bounds: None,
            instances: 1,
            order: ProposalOrder::Random,
            alpha: None,
            beta: None,
        }
    }

    /// A small, fast configuration for examples and smoke tests.
    pub fn quick(seed: u64) -> SolveConfig {
        SolveConfig {
            replicas: 8,
            budget: Budget::max_sweeps(300).with_stall(Some(100)),
            ..SolveConfig::new(seed)
        }
    }

    pub fn with_budget(mut self, budget: Budget) -> SolveConfig {
        self.budget = budget;
        self
    }

    pub fn with_replicas(mut self, replicas: usize) -> SolveConfig {
        self.replicas = replicas;
        self
    }
}

/// Timing and stopping summary of an annealing run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunStats {
    /// Wall clock from solver start to the final incumbent.
    pub time_to_best: Duration,
    /// Total solver wall clock (all instances).
    pub elapsed: Duration,
    /// Sweeps per replica in the winning instance.
    pub sweeps: u64,
    pub barriers: u64,
    pub stop: StopReason,
    pub winning_instance: usize,
    #[serde(skip)]
    pub trace: Vec<TracePoint>,
}

/// Run the configured number of independent tempering instances and keep the
/// lowest-energy result.
pub(crate) fn run_instances<M: EnergyModel>(
    model: &M,
    cfg: &SolveConfig,
) -> Result<(M::Snapshot, f64, RunStats)> {
    let ladder = match cfg.ladder_bounds {
        Some((lo, hi)) => TemperatureLadder::geometric(lo, hi, cfg.replicas)?,
        None => TemperatureLadder::calibrated(model, cfg.replicas, cfg.seed)?,
    };
    let instances = cfg.instances.max(1);
    let mut winner: Option<(PtResult<M::Snapshot>, usize)> = None;
    let mut total_elapsed = Duration::ZERO;
    for instance in 0..instances {
        let pt_cfg = PtConfig {
            ladder: ladder.clone(),
            budget: cfg.budget.clone(),
            seed: rng::derive(cfg.seed, rng::TAG_INSTANCE + instance as u64),
            sweeps_per_barrier: cfg.sweeps_per_barrier,
            order: cfg.order,
        };
        let res = run_pt(model, &pt_cfg)?;
        total_elapsed += res.elapsed;
        let better = winner
            .as_ref()
            .map(|(w, _)| res.best_energy < w.best_energy)
            .unwrap_or(true);
        if better {
            winner = Some((res, instance));
        }
    }
    let (res, winning_instance) = winner.expect("at least one instance");
    let stats = RunStats {
        time_to_best: res.time_to_best,
        elapsed: total_elapsed,
        sweeps: res.sweeps,
        barriers: res.barriers,
        stop: res.stop,
        winning_instance,
        trace: res.trace,
    };
    Ok((res.best, res.best_energy, stats))
}
