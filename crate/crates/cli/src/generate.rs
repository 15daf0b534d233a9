//! `generate`: emit synthetic benchmark graphs with ground-truth labels and a
//! JSON sidecar recording the full spec and seed.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::Args;
use serde::Serialize;

use boltzclust::generators::{
    generate_sbm, sbm_desk_spec, BlockSpec, RNG_ALGORITHM,
};
use boltzclust::graph::write_labels;
use boltzclust::quality::Clustering;
use boltzclust::Graph;

use crate::common::config_error;

/// The PPM regimes of the published benchmark (P_intra / P_inter).
pub const PPM_REGIMES: [(f64, f64); 3] = [(0.9, 0.1), (0.85, 0.15), (0.8, 0.2)];
/// The SBM probability grid of the published benchmark.
pub const SBM_P_INTRA: [f64; 3] = [0.9, 0.85, 0.8];
pub const SBM_P_INTER: [f64; 3] = [0.05, 0.075, 0.1];

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Planted partition: K equal clusters of S vertices, e.g. `5x50`
    #[arg(long, value_name = "KxS", conflicts_with_all = ["sizes", "sbm_desk", "paper_grid"])]
    ppm: Option<String>,

    /// SBM cluster sizes, e.g. `35,120,200`
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["sbm_desk", "paper_grid"])]
    sizes: Option<Vec<usize>>,

    /// Emit the desk-scale SBM grid: 10 blocks, sizes in [35,200], all nine
    /// probability combinations
    #[arg(long, conflicts_with = "paper_grid")]
    sbm_desk: bool,

    /// Emit a preset suite: `ppm` (three 5x50 regimes) or `sbm-desk`
    #[arg(long, value_name = "SUITE")]
    paper_grid: Option<String>,

    /// Intra- and inter-cluster edge probabilities
    #[arg(long, num_args = 2, value_names = ["P_INTRA", "P_INTER"])]
    p: Option<Vec<f64>>,

    #[arg(long, default_value_t = 1)]
    seed: u64,

    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    generator: &'a str,
    spec: &'a BlockSpec,
    rng: &'a str,
    n: usize,
    m: usize,
    edges_file: String,
    labels_file: String,
}

pub fn run(args: GenerateArgs) -> Result<()> {
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;

    if let Some(suite) = &args.paper_grid {
        return match suite.as_str() {
            "ppm" => emit_ppm_suite(&args.out, args.seed),
            "sbm-desk" => emit_sbm_desk_suite(&args.out, args.seed),
            other => Err(config_error(format!(
                "unknown preset `{other}` (expected `ppm` or `sbm-desk`)"
            ))),
        };
    }
    if args.sbm_desk {
        return emit_sbm_desk_suite(&args.out, args.seed);
    }

    let (p_intra, p_inter) = match args.p.as_deref() {
        Some([a, b]) => (*a, *b),
        _ => {
            return Err(config_error(
                "--p P_INTRA P_INTER is required with --ppm/--sizes",
            ))
        }
    };

    if let Some(ppm) = &args.ppm {
        let (k, size) = parse_kxs(ppm)?;
        let spec = BlockSpec {
            sizes: vec![size; k],
            p_intra,
            p_inter,
            seed: args.seed,
        };
        let name = format!("ppm_{k}x{size}_p{p_intra:.2}_{p_inter:.3}_s{}", args.seed);
        emit(&args.out, &name, "ppm", &spec)?;
        Ok(())
    } else if let Some(sizes) = args.sizes {
        let spec = BlockSpec {
            sizes,
            p_intra,
            p_inter,
            seed: args.seed,
        };
        let name = format!("sbm_b{}_p{p_intra:.2}_{p_inter:.3}_s{}", spec.sizes.len(), args.seed);
        emit(&args.out, &name, "sbm", &spec)?;
        Ok(())
    } else {
        Err(config_error(
            "one of --ppm, --sizes, --sbm-desk or --paper-grid is required",
        ))
    }
}

fn parse_kxs(s: &str) -> Result<(usize, usize)> {
    let err = || config_error(format!("cannot parse `{s}` (expected KxS, e.g. 5x50)"));
    let (k, size) = s.split_once('x').ok_or_else(err)?;
    Ok((
        k.trim().parse().map_err(|_| err())?,
        size.trim().parse().map_err(|_| err())?,
    ))
}

fn emit_ppm_suite(out: &Path, seed: u64) -> Result<()> {
    for (i, &(p_intra, p_inter)) in PPM_REGIMES.iter().enumerate() {
        let spec = BlockSpec {
            sizes: vec![50; 5],
            p_intra,
            p_inter,
            seed,
        };
        let name = format!("g{}_ppm_p{p_intra:.2}_{p_inter:.3}_s{seed}", i + 1);
        emit(out, &name, "ppm", &spec)?;
    }
    Ok(())
}

fn emit_sbm_desk_suite(out: &Path, seed: u64) -> Result<()> {
    let mut id = 4; // the published grid numbers these G4..G12
    for &p_intra in &SBM_P_INTRA {
        for &p_inter in &SBM_P_INTER {
            let spec = sbm_desk_spec(p_intra, p_inter, seed);
            let name = format!("g{id}_sbmdesk_p{p_intra:.2}_{p_inter:.3}_s{seed}");
            emit(out, &name, "sbm-desk", &spec)?;
            id += 1;
        }
    }
    Ok(())
}

fn emit(out: &Path, name: &str, generator: &str, spec: &BlockSpec) -> Result<()> {
    let (graph, truth) = generate_sbm(spec)?;
    write_graph_files(out, name, generator, spec, &graph, &truth)
}

pub fn write_graph_files(
    out: &Path,
    name: &str,
    generator: &str,
    spec: &BlockSpec,
    graph: &Graph,
    truth: &Clustering,
) -> Result<()> {
    let edges_file = format!("{name}.edges");
    let labels_file = format!("{name}.labels.tsv");
    graph.write_edge_list(out.join(&edges_file))?;
    write_labels(truth.labels(), out.join(&labels_file))?;
    crate::common::write_json(
        &out.join(format!("{name}.json")),
        &Sidecar {
            generator,
            spec,
            rng: RNG_ALGORITHM,
            n: graph.n(),
            m: graph.m(),
            edges_file: edges_file.clone(),
            labels_file,
        },
    )?;
    println!(
        "{name}: n={} m={} -> {}",
        graph.n(),
        graph.m(),
        out.join(edges_file).display()
    );
    Ok(())
}
