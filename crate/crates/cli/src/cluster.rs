//! `cluster`: run one method on one graph and persist labels, result JSON and
//! optionally the annealing trace.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Args;
use serde::Serialize;

use boltzclust::distance::{jaccard_matrix, DistanceMatrix};
use boltzclust::graph::write_labels;
use boltzclust::kmedoids::kmed_solve_with_matrix;
use boltzclust::louvain::louvain_cluster;
use boltzclust::qp::qp_solve_with_matrix;
use boltzclust::quality::{quality_report, Clustering};
use boltzclust::solve::{RunStats, SolveConfig};
use boltzclust::{Graph, QualityReport};

use crate::common::{config_error, load_graph, write_json, Method, SolverFlags};

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Input graph (`.edges` edge list or `.gml`)
    graph: PathBuf,

    #[arg(long, value_enum)]
    method: Method,

    /// Cluster count (required for qp-bm / kmed-bm, forbidden for louvain)
    #[arg(long)]
    k: Option<usize>,

    #[arg(long, default_value_t = 1)]
    seed: u64,

    #[command(flatten)]
    solver: SolverFlags,

    /// Write the annealing trace next to the result (`<out>.trace.jsonl`)
    #[arg(long)]
    trace: bool,

    /// Remap non-dense vertex ids and write `<out>.mapping.tsv`
    #[arg(long)]
    remap: bool,

    /// Reuse a saved distance matrix instead of recomputing it
    #[arg(long)]
    load_matrix: Option<PathBuf>,

    /// Save the distance matrix for later reuse
    #[arg(long)]
    save_matrix: Option<PathBuf>,

    /// Output base path; writes `<out>.json` and `<out>.labels.tsv`
    #[arg(long, default_value = "result")]
    out: PathBuf,
}

/// Everything needed to reproduce a run, echoed into the result JSON.
#[derive(Serialize)]
pub struct ConfigEcho<'a> {
    pub method: &'a str,
    pub graph: String,
    pub k: Option<usize>,
    pub seed: u64,
    pub solve: Option<&'a SolveConfig>,
}

#[derive(Serialize)]
struct ResultJson<'a> {
    config: ConfigEcho<'a>,
    n: usize,
    m: usize,
    clusters: usize,
    energy: Option<f64>,
    medoids: Option<Vec<u32>>,
    quality: &'a QualityReport,
    labels: &'a [u32],
    labels_file: String,
    trace_file: Option<String>,
    mapping_file: Option<String>,
    /// Wall-clock milliseconds to the best incumbent, from solver start.
    time_to_best_ms: Option<u64>,
    solver_ms: u64,
    /// Distance-matrix construction time, reported separately.
    matrix_ms: Option<u64>,
    stop: Option<String>,
    sweeps: Option<u64>,
}

pub struct MethodOutcome {
    pub clustering: Clustering,
    pub report: QualityReport,
    pub energy: Option<f64>,
    pub medoids: Option<Vec<u32>>,
    pub stats: Option<RunStats>,
    pub solver_ms: u64,
    pub matrix_ms: Option<u64>,
}

/// Run one method over a loaded graph (shared with `bench`).
pub fn run_method(
    g: &Graph,
    dm: Option<&DistanceMatrix>,
    method: Method,
    k: Option<usize>,
    seed: u64,
    cfg: &SolveConfig,
) -> Result<MethodOutcome> {
    match method {
        Method::Louvain => {
            if k.is_some() {
                return Err(config_error("--k is forbidden for louvain"));
            }
            let t0 = Instant::now();
            let clustering = louvain_cluster(g, seed)?;
            let solver_ms = t0.elapsed().as_millis() as u64;
            let report = quality_report(g, &clustering)?;
            Ok(MethodOutcome {
                clustering,
                report,
                energy: None,
                medoids: None,
                stats: None,
                solver_ms,
                matrix_ms: None,
            })
        }
        Method::QpBm | Method::KmedBm => {
            let k = k.ok_or_else(|| {
                config_error(format!("--k is required for {}", method.name()))
            })?;
            let (matrix_ms, owned);
            let dm = match dm {
                Some(dm) => {
                    matrix_ms = None;
                    dm
                }
                None => {
                    let t0 = Instant::now();
                    owned = jaccard_matrix(g);
                    matrix_ms = Some(t0.elapsed().as_millis() as u64);
                    &owned
                }
            };
            let t0 = Instant::now();
            let outcome = match method {
                Method::QpBm => {
                    let sol = qp_solve_with_matrix(g, dm, k, cfg)?;
                    MethodOutcome {
                        clustering: sol.clustering,
                        report: sol.report,
                        energy: Some(sol.energy),
                        medoids: None,
                        stats: sol.stats,
                        solver_ms: t0.elapsed().as_millis() as u64,
                        matrix_ms,
                    }
                }
                Method::KmedBm => {
                    let sol = kmed_solve_with_matrix(g, dm, k, cfg)?;
                    MethodOutcome {
                        clustering: sol.clustering,
                        report: sol.report,
                        energy: Some(sol.energy),
                        medoids: Some(sol.medoids),
                        stats: sol.stats,
                        solver_ms: t0.elapsed().as_millis() as u64,
                        matrix_ms,
                    }
                }
                Method::Louvain => unreachable!(),
            };
            Ok(outcome)
        }
    }
}

pub fn run(args: ClusterArgs) -> Result<()> {
    // method-specific requirements come before any file access
    match args.method {
        Method::Louvain if args.k.is_some() => {
            return Err(config_error("--k is forbidden for louvain"));
        }
        Method::QpBm | Method::KmedBm if args.k.is_none() => {
            return Err(config_error(format!(
                "--k is required for {}",
                args.method.name()
            )));
        }
        _ => {}
    }

    let (g, _labels) = if args.remap {
        let (g, mapping) = boltzclust::graph::load_edge_list_remapped(&args.graph)?;
        let mapping_path = args.out.with_extension("mapping.tsv");
        let lines: String = mapping
            .iter()
            .enumerate()
            .map(|(new, old)| format!("{new}\t{old}\n"))
            .collect();
        std::fs::write(&mapping_path, lines)
            .with_context(|| format!("writing {}", mapping_path.display()))?;
        (g, None)
    } else {
        load_graph(&args.graph)?
    };

    let cfg = args.solver.to_config(args.seed)?;
    let loaded_dm = match &args.load_matrix {
        Some(path) => Some(DistanceMatrix::load(path)?),
        None => None,
    };
    let outcome = run_method(&g, loaded_dm.as_ref(), args.method, args.k, args.seed, &cfg)?;

    if let Some(path) = &args.save_matrix {
        let dm = match loaded_dm {
            Some(dm) => dm,
            None => jaccard_matrix(&g),
        };
        dm.save(path)?;
    }

    let labels_file = with_suffix(&args.out, "labels.tsv");
    write_labels(outcome.clustering.labels(), &labels_file)?;

    let trace_file = if args.trace {
        let path = with_suffix(&args.out, "trace.jsonl");
        let mut text = String::new();
        if let Some(stats) = &outcome.stats {
            for point in &stats.trace {
                text.push_str(&serde_json::to_string(point)?);
                text.push('\n');
            }
        }
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Some(path.display().to_string())
    } else {
        None
    };

    let result = ResultJson {
        config: ConfigEcho {
            method: args.method.name(),
            graph: args.graph.display().to_string(),
            k: args.k,
            seed: args.seed,
            solve: matches!(args.method, Method::QpBm | Method::KmedBm).then_some(&cfg),
        },
        n: g.n(),
        m: g.m(),
        clusters: outcome.clustering.count(),
        energy: outcome.energy,
        medoids: outcome.medoids.clone(),
        quality: &outcome.report,
        labels: outcome.clustering.labels(),
        labels_file: labels_file.display().to_string(),
        trace_file,
        mapping_file: args.remap.then(|| {
            args.out.with_extension("mapping.tsv").display().to_string()
        }),
        time_to_best_ms: outcome
            .stats
            .as_ref()
            .map(|s| s.time_to_best.as_millis() as u64),
        solver_ms: outcome.solver_ms,
        matrix_ms: outcome.matrix_ms,
        stop: outcome.stats.as_ref().map(|s| format!("{:?}", s.stop)),
        sweeps: outcome.stats.as_ref().map(|s| s.sweeps),
    };
    let json_file = with_suffix(&args.out, "json");
    write_json(&json_file, &result)?;

    let r = &outcome.report;
    println!(
        "{}: {} clusters, K̄_inter={:.3} < K={:.3} < K̄_intra={:.3} [{}] Q={:.3}",
        args.method.name(),
        outcome.clustering.count(),
        r.mean_inter,
        r.density,
        r.mean_intra,
        if r.inequality_lower && r.inequality_upper { "Y" } else { "N" },
        r.modularity,
    );
    println!("wrote {} and {}", json_file.display(), labels_file.display());
    Ok(())
}

/// `out` + `.suffix`, preserving any existing stem.
fn with_suffix(base: &Path, suffix: &str) -> PathBuf {
    let mut s = base.as_os_str().to_os_string();
    s.push(".");
    s.push(suffix);
    PathBuf::from(s)
}
