//! Vietoris-Rips filtration of a finite dissimilarity matrix.
//!
//! Conventions: every vertex is present and enters at diameter 0; a
//! positive-dimensional simplex is present iff its diameter (largest pairwise
//! distance among its vertices) is *strictly* below `max_diameter`, and it
//! enters at that diameter. Simplices are returned already sorted by
//! `(diameter, dimension, lexicographic vertex order)`, which is a valid
//! filtration order because a face can never sort after a coface.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::spaces::DistanceMatrix;

/// Flag-complex enumeration is dense in the vertex count; landmark-scale
/// inputs are two orders of magnitude below this cap.
pub const MAX_RIPS_VERTICES: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    /// Ascending vertex ids (landmark-local, `0..n_vertices`).
    pub vertices: Vec<u32>,
    pub diameter: f64,
}

impl Simplex {
    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilteredComplex {
    pub n_vertices: usize,
    /// Largest simplex dimension enumerated (1, 2 or 3).
    pub max_dim: usize,
    /// Strict diameter bound used during enumeration.
    pub max_diameter: f64,
    /// All simplices in filtration order.
    pub simplices: Vec<Simplex>,
}

impl FilteredComplex {
    /// Simplex counts per dimension, `0..=max_dim`.
    pub fn counts_by_dim(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.max_dim + 1];
        for s in &self.simplices {
            counts[s.dim()] += 1;
        }
        counts
    }
}

/// Enumerate the Rips filtration of `dist` up to `max_dim` (at most 3) and
/// strict diameter bound `max_diameter`.
pub fn build_rips(dist: &DistanceMatrix, max_dim: usize, max_diameter: f64) -> Result<FilteredComplex> {
    let n = dist.n();
    if n == 0 {
        return Err(Error::EmptyCloud);
    }
    if n > MAX_RIPS_VERTICES {
        return Err(Error::InvalidParameter("too many vertices for a flag complex"));
    }
    if !(1..=3).contains(&max_dim) {
        return Err(Error::InvalidParameter("max_dim must be 1, 2 or 3"));
    }
    if max_diameter < 0.0 || !max_diameter.is_finite() {
        return Err(Error::InvalidParameter("max_diameter must be finite and >= 0"));
    }

    let mut simplices: Vec<Simplex> = Vec::new();
    for v in 0..n {
        simplices.push(Simplex {
            vertices: vec![v as u32],
            diameter: 0.0,
        });
    }

    // Upper-neighbor lists (j > i with d(i, j) < max_diameter) drive the
    // clique enumeration; adjacency gives O(1) membership checks.
    let mut nbrs: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut adj = vec![false; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dist.get(i, j) < max_diameter {
                nbrs[i].push(j);
                adj[i * n + j] = true;
                adj[j * n + i] = true;
                simplices.push(Simplex {
                    vertices: vec![i as u32, j as u32],
                    diameter: dist.get(i, j),
                });
            }
        }
    }

    if max_dim >= 2 {
        for i in 0..n {
            for &j in &nbrs[i] {
                let dij = dist.get(i, j);
                for &k in &nbrs[j] {
                    if !adj[i * n + k] {
                        continue;
                    }
                    let diam = dij.max(dist.get(i, k)).max(dist.get(j, k));
                    simplices.push(Simplex {
                        vertices: vec![i as u32, j as u32, k as u32],
                        diameter: diam,
                    });
                    if max_dim >= 3 {
                        for &l in &nbrs[k] {
                            if adj[i * n + l] && adj[j * n + l] {
                                let diam3 = diam
                                    .max(dist.get(i, l))
                                    .max(dist.get(j, l))
                                    .max(dist.get(k, l));
                                simplices.push(Simplex {
                                    vertices: vec![i as u32, j as u32, k as u32, l as u32],
                                    diameter: diam3,
                                });
                            }
                        }
                    }
                }
            }
        }
    }

    simplices.sort_by(|a, b| {
        a.diameter
            .total_cmp(&b.diameter)
            .then(a.vertices.len().cmp(&b.vertices.len()))
            .then_with(|| a.vertices.cmp(&b.vertices))
    });

    Ok(FilteredComplex {
        n_vertices: n,
        max_dim,
        max_diameter,
        simplices,
    })
}
