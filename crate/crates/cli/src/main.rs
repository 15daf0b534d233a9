//! Command-line frontend: graph generation, clustering runs, evaluation and
//! the benchmark harness.

mod bench;
mod cluster;
mod common;
mod evaluate;
mod generate;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "boltzclust",
    version,
    about = "Graph clustering with Boltzmann-machine annealers, density metrics and a Louvain baseline",
    after_help = "Environment:\n  BOLTZCLUST_THREADS  worker threads for distance/annealing (default: all cores)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic benchmark graphs (PPM / SBM) with ground-truth labels
    Generate(generate::GenerateArgs),
    /// Cluster a graph with one of the three methods
    Cluster(cluster::ClusterArgs),
    /// Quality-report a clustering and match it against ground truth
    Evaluate(evaluate::EvaluateArgs),
    /// Run a benchmark suite and emit side-by-side tables
    Bench(bench::BenchArgs),
    /// Print where to obtain the football case-study dataset
    FetchFootball,
}

fn main() {
    if let Ok(threads) = std::env::var("BOLTZCLUST_THREADS") {
        if let Ok(threads) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global();
        }
    }

    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => generate::run(args),
        Command::Cluster(args) => cluster::run(args),
        Command::Evaluate(args) => evaluate::run(args),
        Command::Bench(args) => bench::run(args),
        Command::FetchFootball => {
            println!(
                "The US College Football Division IA 2000 season graph is distributed by\n\
                 Mark Newman: http://www-personal.umich.edu/~mejn/netdata/football.zip\n\
                 Unzip and pass football.gml to `cluster`, `evaluate` or `bench football --data`."
            );
            Ok(())
        }
    };

    match result {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(exit_code(&err));
        }
    }
}

/// Exit codes: 2 configuration, 3 input/output, 4 solver/internal.
fn exit_code(err: &anyhow::Error) -> i32 {
    use boltzclust::Error;
    if let Some(e) = err.downcast_ref::<Error>() {
        match e {
            Error::Io { .. } | Error::Parse { .. } | Error::NoEdges { .. } => 3,
            Error::Config(_) | Error::Degenerate(_) => 2,
        }
    } else if err.downcast_ref::<std::io::Error>().is_some() {
        3
    } else {
        4
    }
}
