//! Isomap baseline: geodesic estimation over a nearest-neighbor graph
//! followed by classical multidimensional scaling, plus the persistence-ratio
//! score used to compare embeddings on how well they keep a dominant loop.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, CMatrix, C64};
use crate::persistence::{per_ratio, persistent_cohomology};
use crate::rips::build_rips;
use crate::spaces::DistanceMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IsomapConfig {
    /// Neighbors per point for the graph (the union over both endpoints is
    /// kept, so degrees can exceed this).
    pub k_neighbors: usize,
    /// Output dimension of the embedding.
    pub target_dim: usize,
}

impl Default for IsomapConfig {
    fn default() -> Self {
        IsomapConfig { k_neighbors: 8, target_dim: 4 }
    }
}

/// Min-heap entry for Dijkstra; the reversed ordering turns the standard
/// max-heap into a min-heap on (distance, node).
#[derive(PartialEq)]
struct QueueEntry {
    dist: f64,
    node: usize,
}

impl Eq for QueueEntry {}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

fn knn_adjacency(dm: &DistanceMatrix, k: usize) -> Result<Vec<Vec<(usize, f64)>>> {
    let n = dm.n();
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter("need 1 <= k_neighbors < number of points"));
    }
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for i in 0..n {
        let mut order: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        order.sort_by(|&a, &b| dm.get(i, a).total_cmp(&dm.get(i, b)).then(a.cmp(&b)));
        for &j in order.iter().take(k) {
            let d = dm.get(i, j);
            if !adj[i].iter().any(|&(v, _)| v == j) {
                adj[i].push((j, d));
            }
            if !adj[j].iter().any(|&(v, _)| v == i) {
                adj[j].push((i, d));
            }
        }
    }
    for row in &mut adj {
        row.sort_by_key(|e| e.0);
    }
    Ok(adj)
}

fn component_count(adj: &[Vec<(usize, f64)>]) -> usize {
    let n = adj.len();
    let mut seen = vec![false; n];
    let mut components = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(v) = stack.pop() {
            for &(u, _) in &adj[v] {
                if !seen[u] {
                    seen[u] = true;
                    stack.push(u);
                }
            }
        }
    }
    components
}

/// All-pairs shortest-path matrix over the symmetric `k`-nearest-neighbor
/// graph. Fails with the component count when the graph is disconnected.
pub fn geodesic_distances(dm: &DistanceMatrix, k: usize) -> Result<Vec<Vec<f64>>> {
    let n = dm.n();
    let adj = knn_adjacency(dm, k)?;
    let components = component_count(&adj);
    if components > 1 {
        return Err(Error::DisconnectedGraph { components });
    }
    let mut out = Vec::with_capacity(n);
    for src in 0..n {
        let mut dist = vec![f64::INFINITY; n];
        dist[src] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(QueueEntry { dist: 0.0, node: src });
        while let Some(QueueEntry { dist: d, node: v }) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &(u, w) in &adj[v] {
                let cand = d + w;
                if cand < dist[u] {
                    dist[u] = cand;
                    heap.push(QueueEntry { dist: cand, node: u });
                }
            }
        }
        out.push(dist);
    }
    Ok(out)
}

/// Classical multidimensional scaling of a symmetric distance matrix.
///
/// Double-centers `-1/2 D^2`, keeps the `target_dim` largest eigenpairs, and
/// scales eigenvectors by the square roots of their eigenvalues; directions
/// with non-positive eigenvalues contribute zero coordinates.
pub fn classical_mds(d: &[Vec<f64>], target_dim: usize) -> Result<Vec<Vec<f64>>> {
    let n = d.len();
    if n == 0 {
        return Err(Error::EmptyCloud);
    }
    if target_dim == 0 {
        return Err(Error::InvalidParameter("target dimension must be positive"));
    }
    for row in d {
        if row.len() != n {
            return Err(Error::NonSquare { rows: n, cols: row.len() });
        }
    }
    let mut sq = vec![vec![0.0f64; n]; n];
    let mut row_mean = vec![0.0f64; n];
    let mut total = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let v = d[i][j] * d[i][j];
            sq[i][j] = v;
            row_mean[i] += v;
        }
        row_mean[i] /= n as f64;
        total += row_mean[i];
    }
    total /= n as f64;

    let mut gram = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let b = -0.5 * (sq[i][j] - row_mean[i] - row_mean[j] + total);
            gram.set(i, j, C64::new(b, 0.0));
        }
    }
    let eig = hermitian_eig(&gram)?;

    let mut coords = vec![vec![0.0f64; target_dim]; n];
    let top = eig.values.iter().zip(&eig.vectors).rev().take(target_dim.min(n));
    for (t, (&lambda, col)) in top.enumerate() {
        if lambda <= 0.0 {
            continue;
        }
        let scale = libm::sqrt(lambda);
        for (row, c) in coords.iter_mut().zip(col) {
            row[t] = scale * c.re;
        }
    }
    Ok(coords)
}

/// Isomap embedding of a finite metric space given by its distance matrix.
pub fn isomap(dm: &DistanceMatrix, cfg: &IsomapConfig) -> Result<Vec<Vec<f64>>> {
    let geo = geodesic_distances(dm, cfg.k_neighbors)?;
    classical_mds(&geo, cfg.target_dim)
}

/// Ratio of the two longest finite dim-1 bars of the Rips filtration of a
/// distance matrix, computed with coefficients mod `q` at the enclosing
/// radius. Large values mean one loop dominates everything else.
pub fn per_ratio_of_matrix(dm: &DistanceMatrix, q: u32) -> Result<f64> {
    let threshold = dm.enclosing_radius() * 1.000001;
    let complex = build_rips(dm, 2, threshold)?;
    let result = persistent_cohomology(&complex, q)?;
    per_ratio(&result.diagrams[1])
}

/// One row of the embedding comparison: dominance ratios of the same data
/// seen through an Isomap embedding and through lens coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerRatioRow {
    pub q: u32,
    pub isomap: f64,
    pub lens: f64,
}

/// Dominance ratios over several coefficient moduli for two prepared
/// distance matrices covering the same points.
pub fn compare_per_ratio(
    isomap_dm: &DistanceMatrix,
    lens_dm: &DistanceMatrix,
    q_list: &[u32],
) -> Result<Vec<PerRatioRow>> {
    if isomap_dm.n() != lens_dm.n() {
        return Err(Error::LengthMismatch { left: isomap_dm.n(), right: lens_dm.n() });
    }
    let mut rows = Vec::with_capacity(q_list.len());
    for &q in q_list {
        rows.push(PerRatioRow {
            q,
            isomap: per_ratio_of_matrix(isomap_dm, q)?,
            lens: per_ratio_of_matrix(lens_dm, q)?,
        });
    }
    Ok(rows)
}
