//! Density-based clustering quality metrics and modularity.
//!
//! A clustering is good when clusters form dense induced subgraphs with sparse
//! connections between them. With `K` the overall density, `K̄_intra` the mean
//! intra-cluster density and `K̄_inter` the mean inter-cluster density, a good
//! clustering satisfies `K̄_inter < K < K̄_intra` (strict). These densities are
//! empirical estimates of the intra-/inter-cluster Bernoulli edge probabilities.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Total assignment of each vertex to exactly one of `C` cluster labels.
///
/// Always canonical: labels are `0..C−1` in first-appearance order and every
/// label is used by at least one vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    labels: Vec<u32>,
    count: usize,
}

impl Clustering {
    /// Canonicalize raw labels: relabel to `0..C−1` in first-appearance order.
    pub fn from_labels(raw: &[u32]) -> Clustering {
        let mut remap: HashMap<u32, u32> = HashMap::new();
        let mut labels = Vec::with_capacity(raw.len());
        for &l in raw {
            let next = remap.len() as u32;
            labels.push(*remap.entry(l).or_insert(next));
        }
        Clustering {
            labels,
            count: remap.len(),
        }
    }

    /// Every vertex in its own cluster.
    pub fn identity(n: usize) -> Clustering {
        Clustering {
            labels: (0..n as u32).collect(),
            count: n,
        }
    }

    /// All vertices in a single cluster.
    pub fn single(n: usize) -> Clustering {
        Clustering {
            labels: vec![0; n],
            count: if n == 0 { 0 } else { 1 },
        }
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of (non-empty) clusters `C`.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0usize; self.count];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }

    /// Member lists per cluster, each sorted ascending.
    pub fn members(&self) -> Vec<Vec<u32>> {
        let mut members = vec![Vec::new(); self.count];
        for (v, &l) in self.labels.iter().enumerate() {
            members[l as usize].push(v as u32);
        }
        members
    }
}

/// Quality metrics of one clustering: densities, the inequality verdicts and
/// modularity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QualityReport {
    /// Overall graph density `K`.
    pub density: f64,
    /// Mean intra-cluster density `K̄_intra` (unweighted mean over clusters).
    pub mean_intra: f64,
    /// Mean inter-cluster density `K̄_inter` (unweighted mean over cluster pairs).
    pub mean_inter: f64,
    /// Modularity `Q` of the clustering, in `[-1/2, 1]`.
    pub modularity: f64,
    /// Verdict of the strict inequality `K̄_inter < K`.
    pub inequality_lower: bool,
    /// Verdict of the strict inequality `K < K̄_intra`.
    pub inequality_upper: bool,
    /// Number of clusters `C`.
    pub clusters: usize,
    /// Number of singleton clusters (their intra density is 1 by convention).
    pub singletons: usize,
    /// Intra-cluster density per cluster id.
    pub per_cluster_intra: Vec<f64>,
    /// True when `C == 1`; `mean_inter` is then defined as 0.
    pub degenerate: bool,
}

fn check_cluster(cl: &Clustering, c: usize) -> Result<()> {
    if c >= cl.count() {
        return Err(Error::Config(format!(
            "unknown cluster id {c} (clustering has {} clusters)",
            cl.count()
        )));
    }
    Ok(())
}

/// Intra-cluster density `|e_ii| / (0.5·n_i·(n_i − 1))` of cluster `c`.
///
/// A singleton cluster is vacuously fully connected and returns 1.
pub fn intra_density(g: &Graph, cl: &Clustering, c: usize) -> Result<f64> {
    check_cluster(cl, c)?;
    let labels = cl.labels();
    let c = c as u32;
    let mut size = 0usize;
    let mut edges = 0usize;
    for (v, &l) in labels.iter().enumerate() {
        if l != c {
            continue;
        }
        size += 1;
        edges += g
            .neighbors(v as u32)
            .iter()
            .filter(|&&u| u as usize > v && labels[u as usize] == c)
            .count();
    }
    if size <= 1 {
        return Ok(1.0);
    }
    Ok(edges as f64 / (0.5 * size as f64 * (size as f64 - 1.0)))
}

/// Inter-cluster density `|e_ij| / (n_i·n_j)` of the cluster pair `(a, b)`.
pub fn inter_density(g: &Graph, cl: &Clustering, a: usize, b: usize) -> Result<f64> {
    check_cluster(cl, a)?;
    check_cluster(cl, b)?;
    if a == b {
        return Err(Error::Config(format!(
            "inter-cluster density needs two distinct clusters, got {a} twice"
        )));
    }
    let labels = cl.labels();
    let (a, b) = (a as u32, b as u32);
    let mut size_a = 0usize;
    let mut size_b = 0usize;
    let mut crossing = 0usize;
    for (v, &l) in labels.iter().enumerate() {
        if l == a {
            size_a += 1;
            crossing += g
                .neighbors(v as u32)
                .iter()
                .filter(|&&u| labels[u as usize] == b)
                .count();
        } else if l == b {
            size_b += 1;
        }
    }
    Ok(crossing as f64 / (size_a as f64 * size_b as f64))
}

/// Modularity `Q = (1/2m) Σ_ij [A_ij − k_i·k_j/2m] δ(c_i, c_j)`.
///
/// Uses edge weights when the graph carries them (`A_ij = w_ij`,
/// `k_i = Σ_j w_ij`, `2m = Σ w`).
pub fn modularity(g: &Graph, cl: &Clustering) -> Result<f64> {
    if g.m() == 0 {
        return Err(Error::Degenerate("modularity needs at least one edge".into()));
    }
    let labels = cl.labels();
    let two_m = 2.0 * g.total_weight();
    let mut intra = vec![0.0f64; cl.count()]; // Σ w over edges inside cluster
    let mut strength = vec![0.0f64; cl.count()]; // Σ k_i over members
    for (u, v, w) in g.edges() {
        if labels[u as usize] == labels[v as usize] {
            intra[labels[u as usize] as usize] += w;
        }
    }
    for (v, &l) in labels.iter().enumerate() {
        strength[l as usize] += g.strength(v as u32);
    }
    let q = intra
        .iter()
        .zip(&strength)
        .map(|(&e, &s)| 2.0 * e / two_m - (s / two_m) * (s / two_m))
        .sum();
    Ok(q)
}

/// Full quality report: densities, verdicts, modularity, singleton count.
///
/// With a single cluster `K̄_inter` is defined as 0 and the report is flagged
/// degenerate.
pub fn quality_report(g: &Graph, cl: &Clustering) -> Result<QualityReport> {
    if g.n() < 2 {
        return Err(Error::Degenerate("quality report needs at least 2 vertices".into()));
    }
    if cl.len() != g.n() {
        return Err(Error::Config(format!(
            "clustering covers {} vertices but graph has {}",
            cl.len(),
            g.n()
        )));
    }
    let labels = cl.labels();
    let c = cl.count();
    let sizes = cl.sizes();

    let mut intra_edges = vec![0usize; c];
    let mut inter_edges: HashMap<(u32, u32), usize> = HashMap::new();
    for (u, v, _) in g.edges() {
        let (lu, lv) = (labels[u as usize], labels[v as usize]);
        if lu == lv {
            intra_edges[lu as usize] += 1;
        } else {
            *inter_edges.entry((lu.min(lv), lu.max(lv))).or_insert(0) += 1;
        }
    }

    let per_cluster_intra: Vec<f64> = (0..c)
        .map(|i| {
            if sizes[i] <= 1 {
                1.0
            } else {
                intra_edges[i] as f64 / (0.5 * sizes[i] as f64 * (sizes[i] as f64 - 1.0))
            }
        })
        .collect();
    let mean_intra = per_cluster_intra.iter().sum::<f64>() / c as f64;

    let degenerate = c == 1;
    let mean_inter = if degenerate {
        0.0
    } else {
        let pair_count = 0.5 * c as f64 * (c as f64 - 1.0);
        let sum: f64 = inter_edges
            .iter()
            .map(|(&(a, b), &e)| e as f64 / (sizes[a as usize] as f64 * sizes[b as usize] as f64))
            .sum();
        sum / pair_count
    };

    let density = g.density()?;
    let singletons = sizes.iter().filter(|&&s| s == 1).count();
    Ok(QualityReport {
        density,
        mean_intra,
        mean_inter,
        modularity: modularity(g, cl)?,
        inequality_lower: mean_inter < density,
        inequality_upper: density < mean_intra,
        clusters: c,
        singletons,
        per_cluster_intra,
        degenerate,
    })
}
