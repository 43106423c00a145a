//! Landmark selection: greedy maxmin (farthest-point) sampling and a uniform
//! random baseline. Landmarks index into their dataset; the selection also
//! reports the cover radius `max_x min_l d(x, l)`, which downstream stages
//! use to sanity-check coverage of the landmark balls.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::spaces::{DistanceMatrix, MetricDataset};

#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkSet {
    indices: Vec<usize>,
    cover_radius: f64,
}

impl LandmarkSet {
    /// Wrap explicit landmark indices, recomputing the cover radius.
    pub fn from_indices(ds: &MetricDataset, indices: Vec<usize>) -> Result<Self> {
        validate_indices(ds, &indices)?;
        let mind = min_dist_array(ds, &indices);
        Ok(LandmarkSet {
            indices,
            cover_radius: max_of(&mind),
        })
    }

    /// Dataset indices in selection order.
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `max_x min_l d(x, l)` over the whole dataset.
    pub fn cover_radius(&self) -> f64 {
        self.cover_radius
    }

    /// Pairwise landmark distances (diagonal pinned to zero).
    pub fn distance_matrix(&self, ds: &MetricDataset) -> Result<DistanceMatrix> {
        DistanceMatrix::from_dataset(ds, &self.indices)
    }

    /// Distances from dataset point `x` to every landmark, in landmark order.
    pub fn distances_from(&self, ds: &MetricDataset, x: usize) -> Vec<f64> {
        self.indices.iter().map(|&l| ds.distance(x, l)).collect()
    }
}

fn validate_indices(ds: &MetricDataset, indices: &[usize]) -> Result<()> {
    if indices.is_empty() || indices.len() > ds.len() {
        return Err(Error::BadLandmarkCount {
            requested: indices.len(),
            available: ds.len(),
        });
    }
    for (k, &i) in indices.iter().enumerate() {
        if i >= ds.len() || indices[..k].contains(&i) {
            return Err(Error::BadSeedIndex(i));
        }
    }
    Ok(())
}

fn min_dist_array(ds: &MetricDataset, chosen: &[usize]) -> Vec<f64> {
    let mut mind = vec![f64::INFINITY; ds.len()];
    for &l in chosen {
        for (x, m) in mind.iter_mut().enumerate() {
            let d = ds.distance(x, l);
            if d < *m {
                *m = d;
            }
        }
    }
    mind
}

fn max_of(mind: &[f64]) -> f64 {
    mind.iter().copied().fold(0.0, f64::max)
}

/// Greedy maxmin landmark selection: each new landmark maximizes the distance
/// to the ones already chosen (`argmax_x min_l d(x, l)`), with ties broken
/// toward the smallest dataset index. `seeds` become the first landmarks in
/// the given order; with no seeds the first landmark is drawn uniformly from
/// the RNG. Already-chosen indices are excluded from the argmax explicitly
/// rather than relying on their min-distance being zero.
pub fn maxmin_landmarks(
    ds: &MetricDataset,
    n_landmarks: usize,
    seeds: &[usize],
    seed: u64,
) -> Result<LandmarkSet> {
    if n_landmarks == 0 || n_landmarks > ds.len() || seeds.len() > n_landmarks {
        return Err(Error::BadLandmarkCount {
            requested: n_landmarks,
            available: ds.len(),
        });
    }
    for (k, &s) in seeds.iter().enumerate() {
        if s >= ds.len() || seeds[..k].contains(&s) {
            return Err(Error::BadSeedIndex(s));
        }
    }

    let mut chosen: Vec<usize> = seeds.to_vec();
    let mut selected = vec![false; ds.len()];
    for &s in seeds {
        selected[s] = true;
    }
    if chosen.is_empty() {
        let first = ChaCha8Rng::seed_from_u64(seed).gen_range(0..ds.len());
        chosen.push(first);
        selected[first] = true;
    }

    let mut mind = min_dist_array(ds, &chosen);
    while chosen.len() < n_landmarks {
        let mut best = usize::MAX;
        let mut best_d = f64::NEG_INFINITY;
        for (x, &m) in mind.iter().enumerate() {
            if !selected[x] && m > best_d {
                best_d = m;
                best = x;
            }
        }
        debug_assert!(best != usize::MAX);
        chosen.push(best);
        selected[best] = true;
        for (x, m) in mind.iter_mut().enumerate() {
            let d = ds.distance(x, best);
            if d < *m {
                *m = d;
            }
        }
    }

    Ok(LandmarkSet {
        indices: chosen,
        cover_radius: max_of(&mind),
    })
}

/// Uniform sample of `n_landmarks` distinct indices.
pub fn random_landmarks(ds: &MetricDataset, n_landmarks: usize, seed: u64) -> Result<LandmarkSet> {
    if n_landmarks == 0 || n_landmarks > ds.len() {
        return Err(Error::BadLandmarkCount {
            requested: n_landmarks,
            available: ds.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let indices = rand::seq::index::sample(&mut rng, ds.len(), n_landmarks).into_vec();
    let mind = min_dist_array(ds, &indices);
    Ok(LandmarkSet {
        indices,
        cover_radius: max_of(&mind),
    })
}
