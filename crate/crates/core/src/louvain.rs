//! Greedy Louvain modularity maximization, the comparison baseline.
//!
//! Two phases per level: local moves to the neighbor community with maximal
//! positive modularity gain until no vertex moves, then aggregation of
//! communities into super-vertices (intra-community weight becomes a self
//! loop, so total edge weight is conserved and modularity is preserved across
//! levels). Vertex scan order is reshuffled per pass from the seed, which
//! makes runs deterministic per seed. Unlike the Boltzmann models, the number
//! of clusters is not an input.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::quality::Clustering;
use crate::rng;

/// Gain threshold terminating floating-point ping-pong between equal moves.
const MIN_GAIN: f64 = 1e-7;

/// Aggregated graph at one Louvain level: weighted adjacency plus self-loop
/// weights carrying the intra-community mass.
struct LevelGraph {
    adj: Vec<Vec<(u32, f64)>>,
    self_loop: Vec<f64>,
    /// Weighted degree; self loops count twice. `Σ strength = 2·total`.
    strength: Vec<f64>,
    total: f64,
}

impl LevelGraph {
    fn from_graph(g: &Graph) -> LevelGraph {
        let n = g.n();
        let mut adj = vec![Vec::new(); n];
        for (u, v, w) in g.edges() {
            adj[u as usize].push((v, w));
            adj[v as usize].push((u, w));
        }
        LevelGraph {
            adj,
            self_loop: vec![0.0; n],
            strength: (0..n as u32).map(|v| g.strength(v)).collect(),
            total: g.total_weight(),
        }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    /// Modularity of a membership vector over this level.
    fn modularity(&self, com: &[u32], communities: usize) -> f64 {
        let mut intra = vec![0.0f64; communities];
        let mut degree = vec![0.0f64; communities];
        for v in 0..self.len() {
            let c = com[v] as usize;
            intra[c] += self.self_loop[v];
            degree[c] += self.strength[v];
            for &(u, w) in &self.adj[v] {
                if u as usize > v && com[u as usize] == com[v] {
                    intra[c] += w;
                }
            }
        }
        let two_w = 2.0 * self.total;
        intra
            .iter()
            .zip(&degree)
            .map(|(&e, &d)| e / self.total - (d / two_w) * (d / two_w))
            .sum()
    }

    /// One local-move phase. Returns the membership vector and whether any
    /// vertex changed community.
    fn local_moves(&self, rng: &mut crate::anneal::AnnealRng) -> (Vec<u32>, bool) {
        let n = self.len();
        let two_w = 2.0 * self.total;
        let mut com: Vec<u32> = (0..n as u32).collect();
        let mut com_degree: Vec<f64> = self.strength.clone();
        // scaled gain units carry a 1/total factor relative to modularity
        let min_gain = MIN_GAIN * self.total;

        let mut neighbor_w = vec![0.0f64; n];
        let mut touched: Vec<u32> = Vec::new();
        let mut order: Vec<u32> = (0..n as u32).collect();
        let mut changed = false;

        loop {
            order.shuffle(rng);
            let mut moved = false;
            for &v in &order {
                let v = v as usize;
                let cv = com[v];
                let kv = self.strength[v];
                com_degree[cv as usize] -= kv;

                touched.clear();
                for &(u, w) in &self.adj[v] {
                    let c = com[u as usize];
                    if neighbor_w[c as usize] == 0.0 {
                        touched.push(c);
                    }
                    neighbor_w[c as usize] += w;
                }
                if neighbor_w[cv as usize] == 0.0 {
                    touched.push(cv);
                }

                // gain of joining c, scaled by total: k_{v,c} − a_c·k_v/(2W)
                let gain = |c: u32| {
                    neighbor_w[c as usize] - com_degree[c as usize] * kv / two_w
                };
                let stay = gain(cv);
                let mut best_c = cv;
                let mut best_gain = stay;
                for &c in &touched {
                    let g = gain(c);
                    if g > best_gain {
                        best_gain = g;
                        best_c = c;
                    }
                }

                if best_c != cv && best_gain > stay + min_gain {
                    com[v] = best_c;
                    com_degree[best_c as usize] += kv;
                    moved = true;
                    changed = true;
                } else {
                    com_degree[cv as usize] += kv;
                }

                for &c in &touched {
                    neighbor_w[c as usize] = 0.0;
                }
            }
            if !moved {
                break;
            }
        }
        (com, changed)
    }

    /// Collapse communities into super-vertices.
    fn aggregate(&self, com: &[u32], communities: usize) -> LevelGraph {
        let mut self_loop = vec![0.0f64; communities];
        let mut strength = vec![0.0f64; communities];
        let mut cross: BTreeMap<(u32, u32), f64> = BTreeMap::new();
        for v in 0..self.len() {
            let cv = com[v];
            self_loop[cv as usize] += self.self_loop[v];
            strength[cv as usize] += self.strength[v];
            for &(u, w) in &self.adj[v] {
                if (u as usize) <= v {
                    continue;
                }
                let cu = com[u as usize];
                if cu == cv {
                    self_loop[cv as usize] += w;
                } else {
                    *cross.entry((cv.min(cu), cv.max(cu))).or_insert(0.0) += w;
                }
            }
        }
        let mut adj = vec![Vec::new(); communities];
        for (&(a, b), &w) in &cross {
            adj[a as usize].push((b, w));
            adj[b as usize].push((a, w));
        }
        LevelGraph {
            adj,
            self_loop,
            strength,
            total: self.total,
        }
    }
}

/// Renumber a membership vector to dense `0..c`; returns the community count.
fn compact(com: &mut [u32]) -> usize {
    let mut remap: BTreeMap<u32, u32> = BTreeMap::new();
    for c in com.iter_mut() {
        let next = remap.len() as u32;
        *c = *remap.entry(*c).or_insert(next);
    }
    remap.len()
}

/// One completed Louvain level.
#[derive(Debug, Clone)]
pub struct LouvainLevel {
    /// Partition flattened to the original vertices.
    pub clustering: Clustering,
    /// Modularity as tracked incrementally by the algorithm.
    pub modularity: f64,
}

/// Run Louvain and return the flattened partition after every level.
pub fn louvain_levels(g: &Graph, seed: u64) -> Result<Vec<LouvainLevel>> {
    if g.m() == 0 {
        return Err(Error::Degenerate("louvain needs at least one edge".into()));
    }
    let mut rng = rng::stream(seed, rng::TAG_LOUVAIN);
    let mut level = LevelGraph::from_graph(g);
    // original vertex -> current super-vertex
    let mut membership: Vec<u32> = (0..g.n() as u32).collect();
    let mut levels: Vec<LouvainLevel> = Vec::new();

    loop {
        let (mut com, changed) = level.local_moves(&mut rng);
        let communities = compact(&mut com);
        for m in membership.iter_mut() {
            *m = com[*m as usize];
        }
        levels.push(LouvainLevel {
            clustering: Clustering::from_labels(&membership),
            modularity: level.modularity(&com, communities),
        });
        if !changed || communities == level.len() {
            break;
        }
        level = level.aggregate(&com, communities);
    }
    Ok(levels)
}

/// Louvain clustering: the final flat partition of the last level.
pub fn louvain_cluster(g: &Graph, seed: u64) -> Result<Clustering> {
    let levels = louvain_levels(g, seed)?;
    Ok(levels.last().expect("at least one level").clustering.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::generate_ppm;
    use crate::quality::{modularity, quality_report};

    fn two_triangles() -> Graph {
        Graph::from_edges(&[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    #[test]
    fn two_disjoint_triangles_split() {
        let cl = louvain_cluster(&two_triangles(), 1).unwrap();
        assert_eq!(cl.count(), 2);
        assert_eq!(cl.labels()[0], cl.labels()[1]);
        assert_eq!(cl.labels()[0], cl.labels()[2]);
        assert_eq!(cl.labels()[3], cl.labels()[4]);
        // the optimum for two disjoint triangles, by the reference formula
        let g = two_triangles();
        let q = modularity(&g, &cl).unwrap();
        assert!((q - 0.5).abs() < 1e-12);
    }

    #[test]
    fn recovers_planted_partition_with_count() {
        // greedy scan order occasionally merges two blocks (a known Louvain
        // failure mode), so the solver seed is fixed; recovery is the typical
        // outcome at these probabilities
        for gseed in 0..4 {
            let (g, truth) = generate_ppm(5, 50, 0.9, 0.1, gseed).unwrap();
            let cl = louvain_cluster(&g, 1).unwrap();
            assert_eq!(cl.count(), 5, "graph seed {gseed}");
            assert_eq!(cl.labels(), truth.labels(), "graph seed {gseed}");
            let r = quality_report(&g, &cl).unwrap();
            assert!((r.modularity - 0.48).abs() < 0.03, "Q = {}", r.modularity);
        }
    }

    #[test]
    fn internal_q_matches_reference_on_every_level() {
        for seed in 0..5 {
            let (g, _) = generate_ppm(4, 20, 0.7, 0.15, seed).unwrap();
            let levels = louvain_levels(&g, seed).unwrap();
            for level in &levels {
                let reference = modularity(&g, &level.clustering).unwrap();
                assert!(
                    (level.modularity - reference).abs() < 1e-9,
                    "internal {} vs reference {reference}",
                    level.modularity
                );
            }
        }
    }

    #[test]
    fn q_non_decreasing_across_levels() {
        for seed in 0..5 {
            let (g, _) = generate_ppm(4, 25, 0.6, 0.2, seed).unwrap();
            let levels = louvain_levels(&g, seed).unwrap();
            for w in levels.windows(2) {
                assert!(w[1].modularity >= w[0].modularity - 1e-12);
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let (g, _) = generate_ppm(4, 20, 0.7, 0.15, 3).unwrap();
        let a = louvain_cluster(&g, 17).unwrap();
        let b = louvain_cluster(&g, 17).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn edgeless_graph_rejected() {
        let g = Graph::from_edges_with_n(4, &[]).unwrap();
        assert!(louvain_cluster(&g, 1).is_err());
    }

    #[test]
    fn weighted_edges_steer_the_partition() {
        // two squares joined by a light edge; heavy intra weights keep them apart
        let g = Graph::from_weighted_edges_with_n(
            8,
            &[
                (0, 1, 5.0),
                (1, 2, 5.0),
                (2, 3, 5.0),
                (3, 0, 5.0),
                (4, 5, 5.0),
                (5, 6, 5.0),
                (6, 7, 5.0),
                (7, 4, 5.0),
                (3, 4, 0.5),
            ],
        )
        .unwrap();
        let cl = louvain_cluster(&g, 2).unwrap();
        assert_eq!(cl.count(), 2);
        assert_eq!(cl.labels()[0], cl.labels()[3]);
        assert_eq!(cl.labels()[4], cl.labels()[7]);
        assert_ne!(cl.labels()[0], cl.labels()[4]);
    }
}
