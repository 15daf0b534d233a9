//! `evaluate`: quality-report a clustering and match it against ground truth.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use serde::Serialize;

use boltzclust::eval::{match_clusters, MatchReport};
use boltzclust::graph::load_labels;
use boltzclust::quality::{quality_report, Clustering};
use boltzclust::QualityReport;

use crate::common::{config_error, load_graph, write_json};

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// The graph both label files refer to
    #[arg(long)]
    graph: PathBuf,

    /// Ground-truth labels (`vertex<TAB>label`)
    #[arg(long)]
    truth: PathBuf,

    /// Labels produced by a clustering run
    #[arg(long)]
    found: PathBuf,

    /// Write the combined report as JSON
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Serialize)]
struct EvaluateJson {
    quality_truth: QualityReport,
    quality_found: QualityReport,
    matching: MatchReport,
}

pub fn run(args: EvaluateArgs) -> Result<()> {
    let (g, _) = load_graph(&args.graph)?;
    let truth_labels = load_labels(&args.truth)?;
    let found_labels = load_labels(&args.found)?;
    for (name, labels) in [("truth", &truth_labels), ("found", &found_labels)] {
        if labels.len() != g.n() {
            return Err(config_error(format!(
                "{name} labels cover {} vertices but the graph has {}",
                labels.len(),
                g.n()
            )));
        }
    }
    let truth = Clustering::from_labels(&truth_labels);
    let found = Clustering::from_labels(&found_labels);
    let report = EvaluateJson {
        quality_truth: quality_report(&g, &truth)?,
        quality_found: quality_report(&g, &found)?,
        matching: match_clusters(&truth, &found)?,
    };

    let m = &report.matching;
    println!(
        "found {} clusters vs {} ground-truth clusters",
        found.count(),
        truth.count()
    );
    println!(
        "mean J̃ = {:.3}, exact matches = {}, truth clusters claimed = {}",
        m.mean_jtilde, m.exact_matches, m.claimed_truth_clusters
    );
    let q = &report.quality_found;
    println!(
        "found quality: K̄_inter={:.3} K={:.3} K̄_intra={:.3} Q={:.3}",
        q.mean_inter, q.density, q.mean_intra, q.modularity
    );

    if let Some(path) = &args.out {
        write_json(path, &report)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
