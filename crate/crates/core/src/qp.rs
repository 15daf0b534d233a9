//! One-hot encoded Boltzmann model for quadratic distance minimization.
//!
//! The energy of an assignment is the sum of Jaccard distances over all
//! unordered same-cluster vertex pairs:
//! `E(x̄) = Σ_i Σ_{j>i} Σ_k x_ik·x_jk·d_ij`.
//! Every vertex is assigned to exactly one of `K` clusters; the constraint is
//! structural, so the `N×K` binary unit matrix compresses to an assignment
//! vector. A per-vertex, per-cluster cache
//! `S[v][k] = Σ_{j≠v, c_j=k} d_vj` makes move deltas O(1) and applications O(N).

use rand::Rng;

use crate::anneal::{AnnealRng, EnergyModel};
use crate::distance::{jaccard_matrix, DistanceMatrix};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::quality::{quality_report, Clustering, QualityReport};
use crate::solve::{run_instances, RunStats, SolveConfig};

/// Assignment state plus the per-vertex cluster distance sums.
#[derive(Debug, Clone)]
pub struct QpState {
    assignment: Vec<u32>,
    /// `sums[v*k + c] = Σ_{j≠v, assignment[j]=c} d_vj`
    sums: Vec<f64>,
}

impl QpState {
    fn build(dm: &DistanceMatrix, k: usize, assignment: Vec<u32>) -> QpState {
        let n = dm.n();
        let mut sums = vec![0.0f64; n * k];
        for v in 0..n {
            let row = dm.row(v);
            let base = v * k;
            for (j, &d) in row.iter().enumerate() {
                if j != v {
                    sums[base + assignment[j] as usize] += d;
                }
            }
        }
        QpState { assignment, sums }
    }

    pub fn assignment(&self) -> &[u32] {
        &self.assignment
    }

    /// Cached `Σ_{j≠v, c_j=c} d_vj`.
    pub fn cluster_sum(&self, v: usize, c: usize, k: usize) -> f64 {
        self.sums[v * k + c]
    }
}

/// Move vertex `vertex` into cluster `to`.
#[derive(Debug, Clone, Copy)]
pub struct QpMove {
    pub vertex: u32,
    pub to: u32,
}

/// The one-hot model: a shared distance matrix and the cluster count `K`.
pub struct QpModel<'a> {
    dm: &'a DistanceMatrix,
    k: usize,
}

impl<'a> QpModel<'a> {
    pub fn new(dm: &'a DistanceMatrix, k: usize) -> Result<QpModel<'a>> {
        if k < 1 || k > dm.n() {
            return Err(Error::Config(format!(
                "cluster count {k} outside 1..={}",
                dm.n()
            )));
        }
        Ok(QpModel { dm, k })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// State with a given assignment (cache built from scratch).
    pub fn state_from(&self, assignment: Vec<u32>) -> QpState {
        QpState::build(self.dm, self.k, assignment)
    }
}

impl EnergyModel for QpModel<'_> {
    type State = QpState;
    type Move = QpMove;
    type Snapshot = Vec<u32>;

    fn dimension(&self) -> usize {
        self.dm.n()
    }

    fn random_state(&self, rng: &mut AnnealRng) -> QpState {
        let assignment = (0..self.dm.n())
            .map(|_| rng.random_range(0..self.k as u32))
            .collect();
        QpState::build(self.dm, self.k, assignment)
    }

    fn propose(&self, state: &QpState, slot: usize, rng: &mut AnnealRng) -> QpMove {
        debug_assert!(self.k >= 2, "no moves exist for K=1");
        let current = state.assignment[slot];
        // uniform over the K−1 other clusters
        let draw = rng.random_range(0..self.k as u32 - 1);
        let to = draw + u32::from(draw >= current);
        QpMove {
            vertex: slot as u32,
            to,
        }
    }

    fn delta_energy(&self, state: &QpState, mv: QpMove) -> f64 {
        let v = mv.vertex as usize;
        let from = state.assignment[v] as usize;
        state.sums[v * self.k + mv.to as usize] - state.sums[v * self.k + from]
    }

    fn apply(&self, state: &mut QpState, mv: QpMove) {
        let v = mv.vertex as usize;
        let from = state.assignment[v] as usize;
        let to = mv.to as usize;
        let row = self.dm.row(v);
        // d_vv = 0, so including j = v is a no-op
        for (j, &d) in row.iter().enumerate() {
            state.sums[j * self.k + from] -= d;
            state.sums[j * self.k + to] += d;
        }
        state.assignment[v] = mv.to;
    }

    fn energy(&self, state: &QpState) -> f64 {
        qp_energy(self.dm, &state.assignment)
    }

    fn snapshot(&self, state: &QpState) -> Vec<u32> {
        state.assignment.clone()
    }

    fn snapshot_into(&self, state: &QpState, out: &mut Vec<u32>) {
        out.clone_from(&state.assignment);
    }
}

/// Energy of an assignment, recomputed from scratch: the sum of `d_ij` over
/// all unordered same-cluster pairs.
pub fn qp_energy(dm: &DistanceMatrix, assignment: &[u32]) -> f64 {
    let n = dm.n();
    let mut e = 0.0;
    for i in 0..n {
        let row = dm.row(i);
        let ci = assignment[i];
        for j in i + 1..n {
            if assignment[j] == ci {
                e += row[j];
            }
        }
    }
    e
}

/// Result of a QP solve.
#[derive(Debug, Clone)]
pub struct QpSolution {
    pub clustering: Clustering,
    pub energy: f64,
    pub report: QualityReport,
    /// Annealing statistics; absent when the solution is closed-form
    /// (`K = 1` or `K = N`).
    pub stats: Option<RunStats>,
}

/// Solve quadratic distance minimization on `g` with `K` clusters.
pub fn qp_solve(g: &Graph, k: usize, cfg: &SolveConfig) -> Result<QpSolution> {
    let dm = jaccard_matrix(g);
    qp_solve_with_matrix(g, &dm, k, cfg)
}

/// As [`qp_solve`] but reusing a precomputed distance matrix.
pub fn qp_solve_with_matrix(
    g: &Graph,
    dm: &DistanceMatrix,
    k: usize,
    cfg: &SolveConfig,
) -> Result<QpSolution> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Degenerate("need at least 2 vertices".into()));
    }
    if k < 1 || k > n {
        return Err(Error::Config(format!("cluster count {k} outside 1..={n}")));
    }

    let (assignment, stats) = if k == 1 {
        (vec![0u32; n], None)
    } else if k == n {
        // every vertex its own cluster: zero energy is the global optimum
        ((0..n as u32).collect(), None)
    } else {
        let model = QpModel::new(dm, k)?;
        let (best, _, stats) = run_instances(&model, cfg)?;
        (best, Some(stats))
    };

    let energy = qp_energy(dm, &assignment);
    let clustering = Clustering::from_labels(&assignment);
    let report = quality_report(g, &clustering)?;
    Ok(QpSolution {
        clustering,
        energy,
        report,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anneal::{run_parallel_tempering, Budget, TemperatureLadder};
    use crate::generators::generate_ppm;
    use crate::rng;

    fn triangle_dm() -> DistanceMatrix {
        let g = Graph::from_edges(&[(0, 1), (1, 2), (0, 2)]).unwrap();
        jaccard_matrix(&g)
    }

    #[test]
    fn energy_of_named_assignments() {
        let dm = triangle_dm();
        assert_eq!(qp_energy(&dm, &[0, 1, 2]), 0.0);
        let all: f64 = dm.get(0, 1) + dm.get(0, 2) + dm.get(1, 2);
        assert_eq!(qp_energy(&dm, &[0, 0, 0]), all);
        assert_eq!(qp_energy(&dm, &[0, 0, 1]), dm.get(0, 1));
    }

    #[test]
    fn move_into_empty_cluster_is_nonpositive() {
        let (g, _) = generate_ppm(3, 8, 0.8, 0.2, 11).unwrap();
        let dm = jaccard_matrix(&g);
        let model = QpModel::new(&dm, 4).unwrap();
        // cluster 3 left empty
        let assignment: Vec<u32> = (0..g.n() as u32).map(|v| v % 3).collect();
        let state = model.state_from(assignment);
        for v in 0..g.n() {
            let mv = QpMove {
                vertex: v as u32,
                to: 3,
            };
            let de = model.delta_energy(&state, mv);
            assert!(de <= 0.0);
            let from = state.assignment[v] as usize;
            assert!((de + state.cluster_sum(v, from, 4)).abs() < 1e-12);
        }
    }

    #[test]
    fn proposals_never_keep_current_cluster() {
        let dm = triangle_dm();
        let model = QpModel::new(&dm, 2).unwrap();
        let mut rng = rng::stream(3, 0);
        let state = model.random_state(&mut rng);
        for slot in 0..3 {
            for _ in 0..50 {
                let mv = model.propose(&state, slot, &mut rng);
                assert_ne!(mv.to, state.assignment[slot]);
                assert!(mv.to < 2);
            }
        }
    }

    #[test]
    fn delta_matches_full_recomputation() {
        let (g, _) = generate_ppm(4, 5, 0.7, 0.2, 5).unwrap();
        let dm = jaccard_matrix(&g);
        let model = QpModel::new(&dm, 3).unwrap();
        let mut rng = rng::stream(8, 0);
        let mut state = model.random_state(&mut rng);
        for _ in 0..1000 {
            let slot = rng.random_range(0..model.dimension());
            let mv = model.propose(&state, slot, &mut rng);
            let de = model.delta_energy(&state, mv);
            let before = model.energy(&state);
            model.apply(&mut state, mv);
            let after = model.energy(&state);
            assert!(
                (de - (after - before)).abs() <= 1e-9,
                "delta {de} vs {}",
                after - before
            );
        }
    }

    #[test]
    fn label_permutation_leaves_energy_unchanged() {
        let (g, _) = generate_ppm(3, 6, 0.8, 0.1, 2).unwrap();
        let dm = jaccard_matrix(&g);
        let assignment: Vec<u32> = (0..g.n() as u32).map(|v| v % 3).collect();
        let permuted: Vec<u32> = assignment.iter().map(|&c| (c + 1) % 3).collect();
        assert_eq!(qp_energy(&dm, &assignment), qp_energy(&dm, &permuted));
    }

    #[test]
    fn ground_truth_beats_random_assignments() {
        for seed in 0..3 {
            let (g, truth) = generate_ppm(3, 15, 0.85, 0.15, seed).unwrap();
            let dm = jaccard_matrix(&g);
            let truth_energy = qp_energy(&dm, truth.labels());
            let mut rng = rng::stream(seed, 77);
            for _ in 0..100 {
                let random: Vec<u32> = (0..g.n()).map(|_| rng.random_range(0..3u32)).collect();
                assert!(truth_energy <= qp_energy(&dm, &random));
            }
        }
    }

    #[test]
    fn two_vertex_two_cluster_optimum_is_zero() {
        let g = Graph::from_edges(&[(0, 1)]).unwrap();
        let dm = jaccard_matrix(&g);
        let model = QpModel::new(&dm, 2).unwrap();
        let ladder = TemperatureLadder::geometric(0.01, 1.0, 4).unwrap();
        let res =
            run_parallel_tempering(&model, &ladder, &Budget::max_sweeps(50), 1).unwrap();
        assert_eq!(res.best_energy, 0.0);
    }

    #[test]
    fn solve_recovers_planted_partition() {
        let (g, truth) = generate_ppm(3, 20, 0.9, 0.05, 21).unwrap();
        let sol = qp_solve(&g, 3, &SolveConfig::quick(21)).unwrap();
        assert_eq!(sol.clustering.count(), 3);
        assert_eq!(sol.clustering.labels(), truth.labels());
        assert!(sol.report.inequality_lower && sol.report.inequality_upper);
    }

    #[test]
    fn degenerate_cluster_counts() {
        let (g, _) = generate_ppm(2, 5, 0.9, 0.1, 3).unwrap();
        let sol = qp_solve(&g, 1, &SolveConfig::quick(1)).unwrap();
        assert_eq!(sol.clustering.count(), 1);
        assert!(sol.stats.is_none());
        let sol = qp_solve(&g, g.n(), &SolveConfig::quick(1)).unwrap();
        assert_eq!(sol.clustering.count(), g.n());
        assert_eq!(sol.energy, 0.0);
        assert!(qp_solve(&g, 0, &SolveConfig::quick(1)).is_err());
        assert!(qp_solve(&g, g.n() + 1, &SolveConfig::quick(1)).is_err());
    }
}
