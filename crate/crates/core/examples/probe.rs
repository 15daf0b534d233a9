use std::time::{Duration, Instant};
use boltzclust::anneal::Budget;
use boltzclust::distance::jaccard_matrix;
use boltzclust::generators::generate_ppm;
use boltzclust::kmedoids::kmed_solve_with_matrix;
use boltzclust::louvain::louvain_cluster;
use boltzclust::qp::qp_solve_with_matrix;
use boltzclust::quality::quality_report;
use boltzclust::solve::SolveConfig;

fn main() {
    let regimes = [(0.9, 0.1, 0.48), (0.85, 0.15, 0.38), (0.8, 0.2, 0.29)];
    for &(pi, pe, q_ref) in &regimes {
        for gseed in 1..=3u64 {
            let (g, _) = generate_ppm(5, 50, pi, pe, gseed).unwrap();
            let dm = jaccard_matrix(&g);
            let cfg = SolveConfig::new(42).with_budget(
                Budget::wall_clock(Duration::from_secs(10)).with_max_sweeps(2000).with_stall(Some(150)));
            let t0 = Instant::now();
            let qp = qp_solve_with_matrix(&g, &dm, 5, &cfg).unwrap();
            let t_qp = t0.elapsed();
            let t0 = Instant::now();
            let km = kmed_solve_with_matrix(&g, &dm, 5, &cfg).unwrap();
            let t_km = t0.elapsed();
            let lv = louvain_cluster(&g, 1).unwrap();
            let lr = quality_report(&g, &lv).unwrap();
            let ok = |r: &boltzclust::QualityReport| {
                (r.mean_intra - pi).abs() <= 0.02 && (r.mean_inter - pe).abs() <= 0.02
                  && r.inequality_lower && r.inequality_upper && (r.modularity - q_ref).abs() <= 0.03
            };
            println!("({pi},{pe}) seed {gseed}: qp[{} {:.3}/{:.3}/{:.3} {:.1?}] km[{} {:.3}/{:.3}/{:.3} {:.1?}] lv[{} C={} {:.3}/{:.3}/{:.3}]",
                ok(&qp.report), qp.report.mean_intra, qp.report.mean_inter, qp.report.modularity, t_qp,
                ok(&km.report), km.report.mean_intra, km.report.mean_inter, km.report.modularity, t_km,
                ok(&lr), lv.count(), lr.mean_intra, lr.mean_inter, lr.modularity);
        }
    }
}
