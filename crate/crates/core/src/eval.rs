//! Ground-truth comparison via maximum-Jaccard cluster matching.
//!
//! Cluster labels are arbitrary, so clusterings are compared by content: each
//! algorithm cluster is scored by its best Jaccard set similarity over all
//! ground-truth clusters, `J̃(c_a) = max_g |c_g ∩ c_a| / |c_g ∪ c_a|`, and the
//! mean J̃ is taken over algorithm clusters. Matching is not a bijection — two
//! algorithm clusters may claim the same ground-truth cluster.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quality::Clustering;

/// Best ground-truth match of one algorithm cluster.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterMatch {
    pub found: usize,
    pub truth: usize,
    pub jaccard: f64,
}

/// Match quality of a clustering against ground truth.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatchReport {
    pub per_cluster_best: Vec<ClusterMatch>,
    /// Unweighted mean of J̃ over algorithm clusters.
    pub mean_jtilde: f64,
    /// Number of exact matches (J̃ = 1).
    pub exact_matches: usize,
    /// Distinct ground-truth clusters claimed as a best match.
    pub claimed_truth_clusters: usize,
}

fn set_jaccard(a: &[u32], b: &[u32]) -> (usize, usize) {
    let mut inter = 0usize;
    let (mut x, mut y) = (0usize, 0usize);
    while x < a.len() && y < b.len() {
        match a[x].cmp(&b[y]) {
            std::cmp::Ordering::Less => x += 1,
            std::cmp::Ordering::Greater => y += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                x += 1;
                y += 1;
            }
        }
    }
    (inter, a.len() + b.len() - inter)
}

/// Score `found` against `truth` over the same vertex set.
pub fn match_clusters(truth: &Clustering, found: &Clustering) -> Result<MatchReport> {
    if truth.len() != found.len() {
        return Err(Error::Config(format!(
            "clusterings cover different vertex sets ({} vs {})",
            truth.len(),
            found.len()
        )));
    }
    let truth_members = truth.members();
    let found_members = found.members();

    let mut per_cluster_best = Vec::with_capacity(found_members.len());
    let mut exact = 0usize;
    let mut claimed = vec![false; truth_members.len()];
    for (a, cluster) in found_members.iter().enumerate() {
        let mut best_truth = 0usize;
        let mut best = -1.0f64;
        let mut best_exact = false;
        for (g, truth_cluster) in truth_members.iter().enumerate() {
            let (inter, union) = set_jaccard(truth_cluster, cluster);
            let j = inter as f64 / union as f64;
            if j > best {
                best = j;
                best_truth = g;
                best_exact = inter == union;
            }
        }
        if best_exact {
            exact += 1;
        }
        claimed[best_truth] = true;
        per_cluster_best.push(ClusterMatch {
            found: a,
            truth: best_truth,
            jaccard: best,
        });
    }
    let mean = per_cluster_best.iter().map(|m| m.jaccard).sum::<f64>()
        / per_cluster_best.len() as f64;
    Ok(MatchReport {
        per_cluster_best,
        mean_jtilde: mean,
        exact_matches: exact,
        claimed_truth_clusters: claimed.iter().filter(|&&c| c).count(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_match_is_perfect() {
        let truth = Clustering::from_labels(&[0, 0, 1, 1, 2, 2]);
        let report = match_clusters(&truth, &truth).unwrap();
        assert_eq!(report.mean_jtilde, 1.0);
        assert_eq!(report.exact_matches, 3);
        assert_eq!(report.claimed_truth_clusters, 3);
    }

    #[test]
    fn one_blob_against_c_equal_clusters() {
        let truth = Clustering::from_labels(&[0, 0, 1, 1, 2, 2, 3, 3]);
        let found = Clustering::single(8);
        let report = match_clusters(&truth, &found).unwrap();
        assert_eq!(report.mean_jtilde, 0.25);
        assert_eq!(report.exact_matches, 0);
    }

    #[test]
    fn label_permutations_do_not_matter() {
        let truth = Clustering::from_labels(&[0, 0, 1, 1, 2]);
        let found = Clustering::from_labels(&[2, 2, 0, 0, 1]);
        let report = match_clusters(&truth, &found).unwrap();
        assert_eq!(report.mean_jtilde, 1.0);
        assert_eq!(report.exact_matches, 3);
    }

    #[test]
    fn vertex_set_mismatch_rejected() {
        let truth = Clustering::from_labels(&[0, 0, 1]);
        let found = Clustering::from_labels(&[0, 1]);
        assert!(match_clusters(&truth, &found).is_err());
    }

    #[test]
    fn matches_naive_all_pairs_oracle() {
        let truth = Clustering::from_labels(&[0, 1, 0, 2, 1, 2, 0, 1, 2, 0]);
        let found = Clustering::from_labels(&[0, 1, 0, 1, 1, 2, 2, 1, 2, 0]);
        let report = match_clusters(&truth, &found).unwrap();

        // naive oracle over explicit sets
        let as_sets = |cl: &Clustering| -> Vec<std::collections::BTreeSet<u32>> {
            cl.members()
                .into_iter()
                .map(|m| m.into_iter().collect())
                .collect()
        };
        let ts = as_sets(&truth);
        let fs = as_sets(&found);
        let mut total = 0.0;
        for f in &fs {
            let mut best: f64 = 0.0;
            for t in &ts {
                let inter = f.intersection(t).count() as f64;
                let union = f.union(t).count() as f64;
                best = best.max(inter / union);
            }
            total += best;
        }
        assert_eq!(report.mean_jtilde, total / fs.len() as f64);
    }

    #[test]
    fn two_found_clusters_may_claim_one_truth_cluster() {
        let truth = Clustering::from_labels(&[0, 0, 0, 0, 1, 1]);
        let found = Clustering::from_labels(&[0, 0, 1, 1, 2, 2]);
        let report = match_clusters(&truth, &found).unwrap();
        assert_eq!(report.per_cluster_best[0].truth, 0);
        assert_eq!(report.per_cluster_best[1].truth, 0);
        assert_eq!(report.claimed_truth_clusters, 2);
        assert_eq!(report.exact_matches, 1);
    }
}
