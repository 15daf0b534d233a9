//! All-pairs Jaccard distance matrices.
//!
//! The distance between vertices `i` and `j` is `1 − |c_i ∩ c_j| / |c_i ∪ c_j|`
//! over their open neighborhoods. It is small when two vertices share most of
//! their neighbors, which makes its pairwise minimization a proxy for
//! intra-cluster density.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Dense symmetric all-pairs distance matrix with zero diagonal, entries in [0, 1].
///
/// The full square is stored so row scans need no index gymnastics; memory is
/// `8·n²` bytes. Immutable once built; share it read-only across replicas.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    values: Vec<f64>,
}

impl DistanceMatrix {
    /// Build from row-major values; validates symmetry, zero diagonal and the
    /// [0, 1] range.
    pub fn from_values(n: usize, values: Vec<f64>) -> Result<DistanceMatrix> {
        if values.len() != n * n {
            return Err(Error::Config(format!(
                "expected {} values for n={n}, got {}",
                n * n,
                values.len()
            )));
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::Config(format!("nonzero diagonal at {i}")));
            }
            for j in i + 1..n {
                let d = values[i * n + j];
                if !(0.0..=1.0).contains(&d) || d != values[j * n + i] {
                    return Err(Error::Config(format!(
                        "entry ({i}, {j}) not a symmetric distance in [0, 1]"
                    )));
                }
            }
        }
        Ok(DistanceMatrix { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n..(i + 1) * self.n]
    }

    /// Per-vertex row sums `r_i = Σ_j d_ij` (the diagonal contributes zero).
    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().sum()).collect()
    }

    /// Binary dump: little-endian u64 `n` followed by `n²` little-endian f64,
    /// row-major.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut buf = Vec::with_capacity(8 + self.values.len() * 8);
        buf.extend_from_slice(&(self.n as u64).to_le_bytes());
        for v in &self.values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        fs::write(path, buf).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<DistanceMatrix> {
        let path = path.as_ref();
        let buf = fs::read(path).map_err(|e| Error::io(path, e))?;
        if buf.len() < 8 {
            return Err(Error::parse(path, 0, "truncated distance matrix"));
        }
        let n = u64::from_le_bytes(buf[0..8].try_into().unwrap()) as usize;
        let expected = 8 + n * n * 8;
        if buf.len() != expected {
            return Err(Error::parse(
                path,
                0,
                format!("expected {expected} bytes for n={n}, got {}", buf.len()),
            ));
        }
        let values = buf[8..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(DistanceMatrix { n, values })
    }
}

/// Jaccard distance of two sorted neighbor lists; 1 when both are empty.
fn jaccard(a: &[u32], b: &[u32]) -> f64 {
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
    let union = a.len() + b.len() - inter;
    if union == 0 {
        1.0
    } else {
        1.0 - inter as f64 / union as f64
    }
}

/// All-pairs Jaccard distances over open neighborhoods. Rows are computed in
/// parallel; the diagonal is forced to zero (including isolated vertices).
pub fn jaccard_matrix(g: &Graph) -> DistanceMatrix {
    let n = g.n();
    let mut values = vec![0.0f64; n * n];
    values
        .par_chunks_mut(n.max(1))
        .enumerate()
        .for_each(|(i, row)| {
            let ci = g.neighbors(i as u32);
            for j in i + 1..n {
                row[j] = jaccard(ci, g.neighbors(j as u32));
            }
        });
    for i in 0..n {
        for j in i + 1..n {
            values[j * n + i] = values[i * n + j];
        }
    }
    DistanceMatrix { n, values }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_distance_is_two_thirds() {
        let g = Graph::from_edges(&[(0, 1), (1, 2), (0, 2)]).unwrap();
        let dm = jaccard_matrix(&g);
        // c_0 = {1,2}, c_1 = {0,2}: intersection {2}, union {0,1,2}
        let expected = 1.0 - 1.0 / 3.0;
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            assert_eq!(dm.get(i, j), expected);
            assert_eq!(dm.get(j, i), expected);
        }
        for i in 0..3 {
            assert_eq!(dm.get(i, i), 0.0);
        }
    }

    #[test]
    fn identical_neighborhoods_are_distance_zero() {
        // 0 and 1 both see exactly {2, 3}
        let g = Graph::from_edges(&[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        let dm = jaccard_matrix(&g);
        assert_eq!(dm.get(0, 1), 0.0);
    }

    #[test]
    fn isolated_pair_is_distance_one() {
        let g = Graph::from_edges_with_n(4, &[(0, 1)]).unwrap();
        let dm = jaccard_matrix(&g);
        assert_eq!(dm.get(2, 3), 1.0);
        assert_eq!(dm.get(2, 2), 0.0);
    }

    #[test]
    fn binary_round_trip() {
        let g = Graph::from_edges(&[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let dm = jaccard_matrix(&g);
        let f = tempfile::NamedTempFile::new().unwrap();
        dm.save(f.path()).unwrap();
        assert_eq!(DistanceMatrix::load(f.path()).unwrap(), dm);
    }

    #[test]
    fn row_sums_match_manual_sum() {
        let g = Graph::from_edges(&[(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        let dm = jaccard_matrix(&g);
        let sums = dm.row_sums();
        for i in 0..dm.n() {
            let manual: f64 = (0..dm.n()).map(|j| dm.get(i, j)).sum();
            assert!((sums[i] - manual).abs() < 1e-12);
        }
    }
}
