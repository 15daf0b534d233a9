//! K-hot encoded Boltzmann model for quadratic K-medoids, plus the
//! nearest-medoid assignment step.
//!
//! Exactly `K` of the `N` units are active; the active set `z` is the medoid
//! (exemplar) set. The energy balances centrality against scattering:
//! `E(x̄) = β Σ_i x_i (Σ_{j≠i} d_ij) − α Σ_i Σ_{j>i} x_i x_j d_ij`.
//! The cardinality constraint is structural — moves swap one medoid for one
//! non-medoid — so no quadratic penalty term is needed.

use rand::Rng;

use crate::anneal::{AnnealRng, EnergyModel};
use crate::distance::{jaccard_matrix, DistanceMatrix};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::quality::{quality_report, Clustering, QualityReport};
use crate::solve::{run_instances, RunStats, SolveConfig};

/// The trade-off defaults: `α = 2`, `β = 1.05·(K+1)/n`.
pub fn default_tradeoffs(n: usize, k: usize) -> (f64, f64) {
    (2.0, 1.05 * (k as f64 + 1.0) / n as f64)
}

/// Current medoid set with O(1) swap bookkeeping.
#[derive(Debug, Clone)]
pub struct KmedState {
    medoids: Vec<u32>,
    others: Vec<u32>,
    /// Position of each vertex inside its list.
    pos: Vec<u32>,
    is_medoid: Vec<bool>,
}

impl KmedState {
    fn new(n: usize, medoids: Vec<u32>) -> KmedState {
        let mut is_medoid = vec![false; n];
        for &m in &medoids {
            is_medoid[m as usize] = true;
        }
        let others: Vec<u32> = (0..n as u32).filter(|&v| !is_medoid[v as usize]).collect();
        let mut pos = vec![0u32; n];
        for (i, &m) in medoids.iter().enumerate() {
            pos[m as usize] = i as u32;
        }
        for (i, &v) in others.iter().enumerate() {
            pos[v as usize] = i as u32;
        }
        KmedState {
            medoids,
            others,
            pos,
            is_medoid,
        }
    }

    pub fn medoids(&self) -> &[u32] {
        &self.medoids
    }

    pub fn is_medoid(&self, v: u32) -> bool {
        self.is_medoid[v as usize]
    }
}

/// Swap medoid `exit` for non-medoid `enter`.
#[derive(Debug, Clone, Copy)]
pub struct KmedSwap {
    pub exit: u32,
    pub enter: u32,
}

/// The K-hot model: shared distances, cached row sums, and the trade-offs.
pub struct KmedModel<'a> {
    dm: &'a DistanceMatrix,
    row_sums: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    k: usize,
}

impl<'a> KmedModel<'a> {
    pub fn new(dm: &'a DistanceMatrix, k: usize, alpha: f64, beta: f64) -> Result<KmedModel<'a>> {
        if k < 1 || k > dm.n() {
            return Err(Error::Config(format!(
                "medoid count {k} outside 1..={}",
                dm.n()
            )));
        }
        if !(alpha > 0.0) || !(beta > 0.0) {
            return Err(Error::Config(format!(
                "trade-offs must be positive, got α={alpha}, β={beta}"
            )));
        }
        Ok(KmedModel {
            dm,
            row_sums: dm.row_sums(),
            alpha,
            beta,
            k,
        })
    }

    /// Model with the default `α = 2`, `β = 1.05·(K+1)/n`.
    pub fn with_default_tradeoffs(dm: &'a DistanceMatrix, k: usize) -> Result<KmedModel<'a>> {
        let (alpha, beta) = default_tradeoffs(dm.n(), k);
        KmedModel::new(dm, k, alpha, beta)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn row_sum(&self, v: u32) -> f64 {
        self.row_sums[v as usize]
    }

    pub fn state_from(&self, medoids: Vec<u32>) -> KmedState {
        KmedState::new(self.dm.n(), medoids)
    }
}

impl EnergyModel for KmedModel<'_> {
    type State = KmedState;
    type Move = KmedSwap;
    type Snapshot = Vec<u32>;

    fn dimension(&self) -> usize {
        self.dm.n()
    }

    fn random_state(&self, rng: &mut AnnealRng) -> KmedState {
        let medoids = rand::seq::index::sample(rng, self.dm.n(), self.k)
            .iter()
            .map(|v| v as u32)
            .collect();
        KmedState::new(self.dm.n(), medoids)
    }

    fn propose(&self, state: &KmedState, slot: usize, rng: &mut AnnealRng) -> KmedSwap {
        debug_assert!(self.k < self.dm.n(), "no swaps exist when every vertex is a medoid");
        // Completing the slot's vertex with a random partner from the other
        // list makes the (exit, enter) pair uniform over all swaps.
        if state.is_medoid[slot] {
            KmedSwap {
                exit: slot as u32,
                enter: state.others[rng.random_range(0..state.others.len())],
            }
        } else {
            KmedSwap {
                exit: state.medoids[rng.random_range(0..state.medoids.len())],
                enter: slot as u32,
            }
        }
    }

    fn delta_energy(&self, state: &KmedState, mv: KmedSwap) -> f64 {
        let row_in = self.dm.row(mv.enter as usize);
        let row_out = self.dm.row(mv.exit as usize);
        let mut scattering = 0.0;
        for &m in &state.medoids {
            if m != mv.exit {
                scattering += row_in[m as usize] - row_out[m as usize];
            }
        }
        self.beta * (self.row_sums[mv.enter as usize] - self.row_sums[mv.exit as usize])
            - self.alpha * scattering
    }

    fn apply(&self, state: &mut KmedState, mv: KmedSwap) {
        let (pe, pn) = (
            state.pos[mv.exit as usize],
            state.pos[mv.enter as usize],
        );
        state.medoids[pe as usize] = mv.enter;
        state.others[pn as usize] = mv.exit;
        state.pos.swap(mv.exit as usize, mv.enter as usize);
        state.is_medoid[mv.exit as usize] = false;
        state.is_medoid[mv.enter as usize] = true;
    }

    fn energy(&self, state: &KmedState) -> f64 {
        kmed_energy(self.dm, self.alpha, self.beta, &state.medoids)
    }

    fn snapshot(&self, state: &KmedState) -> Vec<u32> {
        let mut m = state.medoids.clone();
        m.sort_unstable();
        m
    }

    fn snapshot_into(&self, state: &KmedState, out: &mut Vec<u32>) {
        out.clone_from(&state.medoids);
        out.sort_unstable();
    }
}

/// Energy of a medoid set, recomputed from scratch:
/// `β Σ_{m} r_m − α Σ_{a<b} d_ab` over medoids in ascending vertex order.
pub fn kmed_energy(dm: &DistanceMatrix, alpha: f64, beta: f64, medoids: &[u32]) -> f64 {
    let mut sorted = medoids.to_vec();
    sorted.sort_unstable();
    let mut centrality = 0.0;
    for &m in &sorted {
        centrality += dm.row(m as usize).iter().sum::<f64>();
    }
    let mut scattering = 0.0;
    for (i, &a) in sorted.iter().enumerate() {
        let row = dm.row(a as usize);
        for &b in &sorted[i + 1..] {
            scattering += row[b as usize];
        }
    }
    beta * centrality - alpha * scattering
}

/// Label each vertex by its nearest medoid. A medoid labels itself; ties go to
/// the lowest medoid vertex id. Cluster ids follow ascending medoid order
/// before canonicalization.
pub fn assign_to_medoids(dm: &DistanceMatrix, medoids: &[u32]) -> Result<Clustering> {
    if medoids.is_empty() {
        return Err(Error::Config("empty medoid set".into()));
    }
    let mut sorted = medoids.to_vec();
    sorted.sort_unstable();
    let n = dm.n();
    let mut labels = vec![0u32; n];
    for v in 0..n {
        if let Ok(idx) = sorted.binary_search(&(v as u32)) {
            labels[v] = idx as u32;
            continue;
        }
        let row = dm.row(v);
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (idx, &m) in sorted.iter().enumerate() {
            let d = row[m as usize];
            if d < best_d {
                best_d = d;
                best = idx;
            }
        }
        labels[v] = best as u32;
    }
    Ok(Clustering::from_labels(&labels))
}

/// Result of a K-medoids solve.
#[derive(Debug, Clone)]
pub struct KmedSolution {
    pub clustering: Clustering,
    /// Chosen medoid vertex ids, ascending.
    pub medoids: Vec<u32>,
    pub energy: f64,
    pub report: QualityReport,
    /// Annealing statistics; absent when the solution is closed-form (`K = N`).
    pub stats: Option<RunStats>,
}

/// Solve quadratic K-medoids on `g` with `K` exemplars, then assign every
/// vertex to its nearest medoid.
pub fn kmed_solve(g: &Graph, k: usize, cfg: &SolveConfig) -> Result<KmedSolution> {
    let dm = jaccard_matrix(g);
    kmed_solve_with_matrix(g, &dm, k, cfg)
}

/// As [`kmed_solve`] but reusing a precomputed distance matrix.
pub fn kmed_solve_with_matrix(
    g: &Graph,
    dm: &DistanceMatrix,
    k: usize,
    cfg: &SolveConfig,
) -> Result<KmedSolution> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Degenerate("need at least 2 vertices".into()));
    }
    if k < 1 || k > n {
        return Err(Error::Config(format!("medoid count {k} outside 1..={n}")));
    }
    let (alpha, beta) = {
        let (da, db) = default_tradeoffs(n, k);
        (cfg.alpha.unwrap_or(da), cfg.beta.unwrap_or(db))
    };

    let (medoids, stats) = if k == n {
        ((0..n as u32).collect::<Vec<_>>(), None)
    } else {
        let model = KmedModel::new(dm, k, alpha, beta)?;
        let (best, _, stats) = run_instances(&model, cfg)?;
        (best, Some(stats))
    };

    let energy = kmed_energy(dm, alpha, beta, &medoids);
    let clustering = assign_to_medoids(dm, &medoids)?;
    let report = quality_report(g, &clustering)?;
    Ok(KmedSolution {
        clustering,
        medoids,
        energy,
        report,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::generate_ppm;
    use crate::rng;

    #[test]
    fn default_tradeoff_values() {
        let (a, b) = default_tradeoffs(250, 5);
        assert_eq!(a, 2.0);
        assert!((b - 0.0252).abs() < 1e-12);
        let (_, b) = default_tradeoffs(115, 12);
        assert!((b - 1.05 * 13.0 / 115.0).abs() < 1e-12);
        let (_, b) = default_tradeoffs(9, 8); // K + 1 = n
        assert!((b - 1.05).abs() < 1e-12);
    }

    #[test]
    fn k1_minimizer_is_smallest_row_sum() {
        let (g, _) = generate_ppm(2, 8, 0.8, 0.2, 4).unwrap();
        let dm = jaccard_matrix(&g);
        let (alpha, beta) = default_tradeoffs(dm.n(), 1);
        let energies: Vec<f64> = (0..dm.n() as u32)
            .map(|m| kmed_energy(&dm, alpha, beta, &[m]))
            .collect();
        let best_vertex = (0..dm.n())
            .min_by(|&a, &b| energies[a].total_cmp(&energies[b]))
            .unwrap();
        let sums = dm.row_sums();
        let smallest_sum = (0..dm.n())
            .min_by(|&a, &b| sums[a].total_cmp(&sums[b]))
            .unwrap();
        assert_eq!(best_vertex, smallest_sum);
    }

    #[test]
    fn alpha_zero_decouples_into_smallest_row_sums() {
        // with no scattering term the best K-set is the K smallest row sums
        let (g, _) = generate_ppm(3, 5, 0.9, 0.1, 9).unwrap();
        let dm = jaccard_matrix(&g);
        let beta = 1.0;
        let n = dm.n();
        let mut best = f64::INFINITY;
        for a in 0..n as u32 {
            for b in a + 1..n as u32 {
                for c in b + 1..n as u32 {
                    best = best.min(kmed_energy(&dm, 0.0, beta, &[a, b, c]));
                }
            }
        }
        let mut sums = dm.row_sums();
        sums.sort_by(f64::total_cmp);
        let expected: f64 = beta * (sums[0] + sums[1] + sums[2]);
        assert!((best - expected).abs() < 1e-12);
    }

    #[test]
    fn swap_between_identical_rows_is_zero_delta() {
        // vertices 0 and 1 share the neighborhood {2, 3}, so their distance
        // rows coincide
        let g = Graph::from_edges(&[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        let dm = jaccard_matrix(&g);
        let model = KmedModel::with_default_tradeoffs(&dm, 2).unwrap();
        let state = model.state_from(vec![0, 2]);
        let de = model.delta_energy(
            &state,
            KmedSwap { exit: 0, enter: 1 },
        );
        assert_eq!(de, 0.0);
    }

    #[test]
    fn delta_matches_full_recomputation() {
        let (g, _) = generate_ppm(4, 5, 0.7, 0.2, 6).unwrap();
        let dm = jaccard_matrix(&g);
        let model = KmedModel::with_default_tradeoffs(&dm, 4).unwrap();
        let mut rng = rng::stream(12, 0);
        let mut state = model.random_state(&mut rng);
        for _ in 0..1000 {
            let slot = rng.random_range(0..model.dimension());
            let mv = model.propose(&state, slot, &mut rng);
            assert!(state.is_medoid(mv.exit));
            assert!(!state.is_medoid(mv.enter));
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
    fn energy_invariant_under_vertex_relabeling() {
        // relabeling = applying a permutation to the distance matrix
        let (g, _) = generate_ppm(2, 6, 0.8, 0.2, 13).unwrap();
        let dm = jaccard_matrix(&g);
        let n = dm.n();
        let perm: Vec<usize> = (0..n).map(|v| (v + 5) % n).collect();
        let mut values = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                values[perm[i] * n + perm[j]] = dm.get(i, j);
            }
        }
        let dmp = DistanceMatrix::from_values(n, values).unwrap();
        let (alpha, beta) = default_tradeoffs(n, 3);
        let medoids = [0u32, 4, 7];
        let mapped: Vec<u32> = medoids.iter().map(|&m| perm[m as usize] as u32).collect();
        let e1 = kmed_energy(&dm, alpha, beta, &medoids);
        let e2 = kmed_energy(&dmp, alpha, beta, &mapped);
        assert!((e1 - e2).abs() < 1e-12);
    }

    #[test]
    fn assignment_identity_when_all_are_medoids() {
        let (g, _) = generate_ppm(2, 4, 0.9, 0.1, 2).unwrap();
        let dm = jaccard_matrix(&g);
        let medoids: Vec<u32> = (0..g.n() as u32).collect();
        let cl = assign_to_medoids(&dm, &medoids).unwrap();
        assert_eq!(cl.count(), g.n());
        assert_eq!(cl.labels(), Clustering::identity(g.n()).labels());
    }

    #[test]
    fn assignment_tie_breaks_to_lowest_medoid_id() {
        // vertex 0 equidistant to medoids 3 and 7 by symmetry of the values
        let n = 8;
        let mut values = vec![0.0f64; n * n];
        let mut set = |i: usize, j: usize, d: f64| {
            values[i * n + j] = d;
            values[j * n + i] = d;
        };
        for i in 0..n {
            for j in i + 1..n {
                set(i, j, 0.9);
            }
        }
        set(0, 3, 0.5);
        set(0, 7, 0.5);
        let dm = DistanceMatrix::from_values(n, values).unwrap();
        let cl = assign_to_medoids(&dm, &[7, 3]).unwrap();
        assert_eq!(cl.labels()[0], cl.labels()[3]);
        assert_ne!(cl.labels()[0], cl.labels()[7]);
    }

    #[test]
    fn assignment_is_idempotent() {
        let (g, _) = generate_ppm(3, 10, 0.8, 0.1, 5).unwrap();
        let dm = jaccard_matrix(&g);
        let cl1 = assign_to_medoids(&dm, &[1, 12, 25]).unwrap();
        let cl2 = assign_to_medoids(&dm, &[1, 12, 25]).unwrap();
        assert_eq!(cl1, cl2);
    }

    #[test]
    fn central_medoids_recover_planted_partition() {
        for seed in 0..3 {
            let (g, truth) = generate_ppm(5, 50, 0.9, 0.1, seed).unwrap();
            let dm = jaccard_matrix(&g);
            // per block, take the vertex minimizing total intra-block distance
            let members = truth.members();
            let medoids: Vec<u32> = members
                .iter()
                .map(|block| {
                    *block
                        .iter()
                        .min_by(|&&a, &&b| {
                            let sum = |v: u32| -> f64 {
                                block.iter().map(|&u| dm.get(v as usize, u as usize)).sum()
                            };
                            sum(a).total_cmp(&sum(b))
                        })
                        .unwrap()
                })
                .collect();
            let cl = assign_to_medoids(&dm, &medoids).unwrap();
            assert_eq!(cl.labels(), truth.labels(), "seed {seed}");
        }
    }

    #[test]
    fn solve_returns_k_clusters_with_medoids() {
        let (g, _) = generate_ppm(3, 15, 0.9, 0.05, 8).unwrap();
        let sol = kmed_solve(&g, 3, &SolveConfig::quick(8)).unwrap();
        assert_eq!(sol.medoids.len(), 3);
        assert_eq!(sol.clustering.count(), 3);
        assert!(sol.report.inequality_lower && sol.report.inequality_upper);
        for w in sol.medoids.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn k_equals_n_gives_singletons() {
        let (g, _) = generate_ppm(2, 4, 0.9, 0.1, 1).unwrap();
        let sol = kmed_solve(&g, g.n(), &SolveConfig::quick(1)).unwrap();
        assert_eq!(sol.clustering.count(), g.n());
        assert!(sol.stats.is_none());
        let r = &sol.report;
        // singleton clustering: every intra density is 1 by convention and
        // K̄_inter equals the overall density
        assert_eq!(r.mean_intra, 1.0);
        assert!((r.mean_inter - r.density).abs() < 1e-9);
    }
}
