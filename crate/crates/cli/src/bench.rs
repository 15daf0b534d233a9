//! `bench`: run a whole suite (all methods over a preset graph family, fixed
//! seeds) and emit side-by-side tables as markdown and JSON.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use anyhow::{Context, Result};
use clap::Args;
use serde::Serialize;

use boltzclust::anneal::Budget;
use boltzclust::distance::jaccard_matrix;
use boltzclust::eval::match_clusters;
use boltzclust::generators::{generate_sbm, sbm_desk_spec, BlockSpec};
use boltzclust::graph::load_gml_subset;
use boltzclust::quality::Clustering;
use boltzclust::solve::SolveConfig;
use boltzclust::QualityReport;

use crate::cluster::run_method;
use crate::common::{config_error, parse_duration, Method};
use crate::generate::PPM_REGIMES;

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Suite: `ppm`, `sbm-desk` or `football`
    suite: String,

    /// Output directory for the markdown and JSON tables
    #[arg(long, default_value = ".")]
    out: PathBuf,

    /// Graph generation seeds (one column per regime and seed)
    #[arg(long, value_delimiter = ',', default_value = "1")]
    seeds: Vec<u64>,

    /// Annealer seed
    #[arg(long, default_value_t = 42)]
    solver_seed: u64,

    /// Louvain scan-order seed
    #[arg(long, default_value_t = 1)]
    louvain_seed: u64,

    /// Wall-clock budget per solve (suite default: 10s ppm/football, 60s sbm-desk)
    #[arg(long, value_parser = parse_duration)]
    budget: Option<Duration>,

    /// Sweep cap per solve (suite default: 2000-4000)
    #[arg(long)]
    max_sweeps: Option<u64>,

    /// Stall barriers (suite default: 120-200)
    #[arg(long)]
    stall: Option<u64>,

    #[arg(long, default_value_t = 32)]
    replicas: usize,

    /// Cluster count for the Boltzmann methods (suite default: 5/10/12)
    #[arg(long)]
    k: Option<usize>,

    /// Football GML file (or set FOOTBALL_GML)
    #[arg(long)]
    data: Option<PathBuf>,

    /// Solver runs per method for the football best-of comparison
    #[arg(long, default_value_t = 10)]
    runs: u64,
}

#[derive(Serialize, Clone)]
struct RunRecord {
    graph_id: String,
    p_intra: f64,
    p_inter: f64,
    graph_seed: u64,
    n: usize,
    m: usize,
    method: &'static str,
    clusters: usize,
    quality: QualityReport,
    time_to_best_ms: Option<u64>,
    solver_ms: u64,
    matrix_ms: u64,
}

#[derive(Serialize)]
struct BenchJson<'a> {
    suite: &'a str,
    solver_seed: u64,
    louvain_seed: u64,
    graph_seeds: &'a [u64],
    records: &'a [RunRecord],
    best_intra_counts: Option<BestCounts>,
}

#[derive(Serialize, Default)]
struct BestCounts {
    louvain: usize,
    qp_bm: usize,
    kmed_bm: usize,
    /// Cells where a Boltzmann method is at least as dense as Louvain.
    bm_at_least_louvain: usize,
    cells: usize,
}

const METHODS: [Method; 3] = [Method::Louvain, Method::QpBm, Method::KmedBm];

pub fn run(args: BenchArgs) -> Result<()> {
    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("creating {}", args.out.display()))?;
    match args.suite.as_str() {
        "ppm" => grid_suite(&args, "ppm"),
        "sbm-desk" => grid_suite(&args, "sbm-desk"),
        "football" => football_suite(&args),
        other => Err(config_error(format!(
            "unknown suite `{other}` (expected ppm, sbm-desk or football)"
        ))),
    }
}

fn suite_config(args: &BenchArgs, suite: &str) -> SolveConfig {
    let (wall, sweeps, stall) = match suite {
        "sbm-desk" => (Duration::from_secs(60), 2500, 120),
        "football" => (Duration::from_secs(10), 4000, 200),
        _ => (Duration::from_secs(10), 2000, 150),
    };
    let budget = Budget {
        max_sweeps: Some(args.max_sweeps.unwrap_or(sweeps)),
        wall_clock: Some(args.budget.unwrap_or(wall)),
        target_energy: None,
        stall_barriers: Some(args.stall.unwrap_or(stall)),
    };
    SolveConfig::new(args.solver_seed)
        .with_replicas(args.replicas)
        .with_budget(budget)
}

/// The PPM and desk-scale SBM suites share the grid runner.
fn grid_suite(args: &BenchArgs, suite: &str) -> Result<()> {
    let cfg = suite_config(args, suite);
    let k = args.k.unwrap_or(if suite == "ppm" { 5 } else { 10 });

    let mut grid: Vec<(String, BlockSpec)> = Vec::new();
    for &gseed in &args.seeds {
        if suite == "ppm" {
            for (i, &(p_intra, p_inter)) in PPM_REGIMES.iter().enumerate() {
                grid.push((
                    format!("G{}", i + 1),
                    BlockSpec {
                        sizes: vec![50; 5],
                        p_intra,
                        p_inter,
                        seed: gseed,
                    },
                ));
            }
        } else {
            let mut id = 4;
            for &p_intra in &crate::generate::SBM_P_INTRA {
                for &p_inter in &crate::generate::SBM_P_INTER {
                    grid.push((format!("G{id}"), sbm_desk_spec(p_intra, p_inter, gseed)));
                    id += 1;
                }
            }
        }
    }

    let mut records = Vec::new();
    for (graph_id, spec) in &grid {
        let (g, _) = generate_sbm(spec)?;
        let t0 = Instant::now();
        let dm = jaccard_matrix(&g);
        let matrix_ms = t0.elapsed().as_millis() as u64;
        for method in METHODS {
            let (mk, seed) = match method {
                Method::Louvain => (None, args.louvain_seed),
                _ => (Some(k), args.solver_seed),
            };
            let out = run_method(&g, Some(&dm), method, mk, seed, &cfg)?;
            records.push(RunRecord {
                graph_id: graph_id.clone(),
                p_intra: spec.p_intra,
                p_inter: spec.p_inter,
                graph_seed: spec.seed,
                n: g.n(),
                m: g.m(),
                method: method.name(),
                clusters: out.clustering.count(),
                quality: out.report,
                time_to_best_ms: out.stats.as_ref().map(|s| s.time_to_best.as_millis() as u64),
                solver_ms: out.solver_ms,
                matrix_ms,
            });
            eprintln!(
                "{graph_id} s{} {}: done in {} ms",
                spec.seed,
                method.name(),
                records.last().unwrap().solver_ms
            );
        }
    }

    let mut md = String::new();
    let titles = [
        ("louvain", "Modularity maximization (Louvain)"),
        ("qp-bm", "Quadratic distance minimization (QP Boltzmann)"),
        ("kmed-bm", "K-medoids (K-med Boltzmann)"),
    ];
    for (method, title) in titles {
        md.push_str(&method_table(title, method, &records));
        md.push('\n');
    }
    let counts = side_by_side(&mut md, &records);
    emit(args, suite, &records, Some(counts), md)
}

fn column_label(r: &RunRecord, multi_seed: bool) -> String {
    if multi_seed {
        format!("{}/s{}", r.graph_id, r.graph_seed)
    } else {
        r.graph_id.clone()
    }
}

fn method_table(title: &str, method: &str, records: &[RunRecord]) -> String {
    let cols: Vec<&RunRecord> = records.iter().filter(|r| r.method == method).collect();
    let multi_seed = {
        let mut seeds: Vec<u64> = cols.iter().map(|r| r.graph_seed).collect();
        seeds.dedup();
        seeds.len() > 1
    };
    let mut md = format!("## {title}\n\n");
    let yn = |b: bool| if b { "Y" } else { "N" };

    let mut header = String::from("| |");
    let mut sep = String::from("|---|");
    for r in &cols {
        write!(header, " {} |", column_label(r, multi_seed)).unwrap();
        sep.push_str("---|");
    }
    md.push_str(&header);
    md.push('\n');
    md.push_str(&sep);
    md.push('\n');

    let mut row = |name: &str, f: &dyn Fn(&RunRecord) -> String| {
        let mut line = format!("| {name} |");
        for r in &cols {
            write!(line, " {} |", f(r)).unwrap();
        }
        md.push_str(&line);
        md.push('\n');
    };
    row("P_inter", &|r| format!("{:.3}", r.p_inter));
    row("P_intra", &|r| format!("{:.2}", r.p_intra));
    row("K", &|r| format!("{:.2}", r.quality.density));
    row("K̄_inter", &|r| format!("{:.2}", r.quality.mean_inter));
    row("K̄_intra", &|r| format!("{:.2}", r.quality.mean_intra));
    if method == "louvain" {
        row("Time to sol (s)", &|r| {
            format!("{:.3}", r.solver_ms as f64 / 1e3)
        });
        row("Clusters identified", &|r| r.clusters.to_string());
    } else {
        row("Time to sol (s)", &|r| {
            format!("{:.3}", r.time_to_best_ms.unwrap_or(0) as f64 / 1e3)
        });
        row("Matrix build (s)", &|r| {
            format!("{:.3}", r.matrix_ms as f64 / 1e3)
        });
    }
    row("K̄_inter < K", &|r| yn(r.quality.inequality_lower).into());
    row("K < K̄_intra", &|r| yn(r.quality.inequality_upper).into());
    row("Modularity", &|r| format!("{:.2}", r.quality.modularity));
    md
}

/// The side-by-side K̄_intra comparison with the best-of count, aggregating
/// multiple graph seeds per cell by mean.
fn side_by_side(md: &mut String, records: &[RunRecord]) -> BestCounts {
    let mut cells: Vec<(String, f64, f64)> = Vec::new(); // (id, p_inter, p_intra)
    for r in records {
        if !cells.iter().any(|(id, _, _)| *id == r.graph_id) {
            cells.push((r.graph_id.clone(), r.p_inter, r.p_intra));
        }
    }
    let mean_intra = |id: &str, method: &str| -> f64 {
        let xs: Vec<f64> = records
            .iter()
            .filter(|r| r.graph_id == id && r.method == method)
            .map(|r| r.quality.mean_intra)
            .collect();
        xs.iter().sum::<f64>() / xs.len() as f64
    };
    let mean_density = |id: &str| -> f64 {
        let xs: Vec<f64> = records
            .iter()
            .filter(|r| r.graph_id == id && r.method == "louvain")
            .map(|r| r.quality.density)
            .collect();
        xs.iter().sum::<f64>() / xs.len() as f64
    };

    md.push_str("## Side by side comparisons of K̄_intra\n\n");
    md.push_str("| Graph ID | P_inter | P_intra | K | Louvain | QP BM | K-med BM |\n");
    md.push_str("|---|---|---|---|---|---|---|\n");
    let mut counts = BestCounts::default();
    for (id, p_inter, p_intra) in &cells {
        let lv = mean_intra(id, "louvain");
        let qp = mean_intra(id, "qp-bm");
        let km = mean_intra(id, "kmed-bm");
        let best = lv.max(qp).max(km);
        let cell = |x: f64| {
            if x == best {
                format!("**{x:.2}**")
            } else {
                format!("{x:.2}")
            }
        };
        writeln!(
            md,
            "| {id} | {p_inter:.3} | {p_intra:.2} | {:.3} | {} | {} | {} |",
            mean_density(id),
            cell(lv),
            cell(qp),
            cell(km),
        )
        .unwrap();
        if lv == best {
            counts.louvain += 1;
        }
        if qp == best {
            counts.qp_bm += 1;
        }
        if km == best {
            counts.kmed_bm += 1;
        }
        if qp.max(km) >= lv {
            counts.bm_at_least_louvain += 1;
        }
        counts.cells += 1;
    }
    writeln!(
        md,
        "| **Count Best of 3** | | | | **{}** | **{}** | **{}** |",
        counts.louvain, counts.qp_bm, counts.kmed_bm
    )
    .unwrap();
    counts
}

fn football_suite(args: &BenchArgs) -> Result<()> {
    let path = args
        .data
        .clone()
        .or_else(|| std::env::var("FOOTBALL_GML").ok().map(PathBuf::from))
        .ok_or_else(|| {
            config_error(
                "the football suite needs --data <football.gml> (or FOOTBALL_GML); \
                 see `boltzclust fetch-football`",
            )
        })?;
    let gml = load_gml_subset(&path)?;
    let truth_labels = gml.labels.ok_or_else(|| {
        config_error("ground-truth `value` labels missing from the GML file")
    })?;
    let truth = Clustering::from_labels(&truth_labels);
    let g = gml.graph;
    let k = args.k.unwrap_or(truth.count());
    let cfg = suite_config(args, "football");
    let t0 = Instant::now();
    let dm = jaccard_matrix(&g);
    let matrix_ms = t0.elapsed().as_millis() as u64;

    #[derive(Serialize)]
    struct FootballRun {
        method: &'static str,
        seed: u64,
        clusters: usize,
        energy: Option<f64>,
        mean_jtilde: f64,
        exact_matches: usize,
        modularity: f64,
        time_to_best_ms: Option<u64>,
        solver_ms: u64,
    }

    let mut runs: Vec<FootballRun> = Vec::new();
    for method in METHODS {
        for seed in 1..=args.runs {
            let mk = (method != Method::Louvain).then_some(k);
            let cfg = SolveConfig { seed, ..cfg.clone() };
            let out = run_method(&g, Some(&dm), method, mk, seed, &cfg)?;
            let matching = match_clusters(&truth, &out.clustering)?;
            runs.push(FootballRun {
                method: method.name(),
                seed,
                clusters: out.clustering.count(),
                energy: out.energy,
                mean_jtilde: matching.mean_jtilde,
                exact_matches: matching.exact_matches,
                modularity: out.report.modularity,
                time_to_best_ms: out.stats.as_ref().map(|s| s.time_to_best.as_millis() as u64),
                solver_ms: out.solver_ms,
            });
        }
    }

    // best run per method by mean J̃ over the seeded runs
    let best = |method: &str| -> &FootballRun {
        runs.iter()
            .filter(|r| r.method == method)
            .max_by(|a, b| a.mean_jtilde.total_cmp(&b.mean_jtilde))
            .expect("at least one run")
    };
    let mut md = String::from("## Similarity to ground-truth clusters\n\n");
    writeln!(md, "Best of {} seeded runs per method, K = {k}.\n", args.runs).unwrap();
    md.push_str("| | Louvain | QP BM | K-med BM |\n|---|---|---|---|\n");
    let (lv, qp, km) = (best("louvain"), best("qp-bm"), best("kmed-bm"));
    writeln!(
        md,
        "| Num exact matches (J̃ = 1) | {} | {} | {} |",
        lv.exact_matches, qp.exact_matches, km.exact_matches
    )
    .unwrap();
    writeln!(
        md,
        "| Mean J̃ | {:.2} | {:.2} | {:.2} |",
        lv.mean_jtilde, qp.mean_jtilde, km.mean_jtilde
    )
    .unwrap();
    writeln!(md, "\nGraph: n={}, m={}, matrix build {} ms", g.n(), g.m(), matrix_ms).unwrap();

    #[derive(Serialize)]
    struct FootballJson<'a> {
        suite: &'a str,
        k: usize,
        runs: &'a [FootballRun],
    }
    crate::common::write_json(
        &args.out.join("bench_football.json"),
        &FootballJson {
            suite: "football",
            k,
            runs: &runs,
        },
    )?;
    let md_path = args.out.join("bench_football.md");
    std::fs::write(&md_path, &md).with_context(|| format!("writing {}", md_path.display()))?;
    println!("{md}");
    Ok(())
}

fn emit(
    args: &BenchArgs,
    suite: &str,
    records: &[RunRecord],
    counts: Option<BestCounts>,
    md: String,
) -> Result<()> {
    let stem = format!("bench_{}", suite.replace('-', "_"));
    crate::common::write_json(
        &args.out.join(format!("{stem}.json")),
        &BenchJson {
            suite,
            solver_seed: args.solver_seed,
            louvain_seed: args.louvain_seed,
            graph_seeds: &args.seeds,
            records,
            best_intra_counts: counts,
        },
    )?;
    let md_path = args.out.join(format!("{stem}.md"));
    std::fs::write(&md_path, &md).with_context(|| format!("writing {}", md_path.display()))?;
    println!("{md}");
    Ok(())
}
