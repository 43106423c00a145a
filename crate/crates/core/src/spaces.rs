//! Sample spaces, their metrics, and dense distance matrices.
//!
//! Three kinds of datasets are supported: Euclidean point clouds (noisy
//! circles), the mod-3 Moore space built from the unit disc with its boundary
//! glued to itself by 120-degree rotation, and lens spaces `L_q^2` sampled
//! uniformly on `S^3`.
//!
//! The Moore-space "distance" below is a dissimilarity rather than an exact
//! metric: disc pairs use chordal distance between best orbit
//! representatives while glued boundary pairs use arc length, and the mix
//! can overshoot a triangle inequality slightly. Downstream stages only
//! consume it pairwise and never assume exact metric axioms;
//! [`DistanceMatrix`] pins the diagonal to zero.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::lens_space::{check_prime, lens_distance, LensPoint};
use crate::linalg::C64;

/// Points with `||x|| >= 1 - BOUNDARY_TOL` count as boundary points of the
/// Moore-space disc.
pub const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Straight-line distance in `R^d`.
    Euclidean,
    /// Mod-3 Moore space dissimilarity on the closed unit disc in `R^2`.
    Moore,
    /// Quotient metric of `L_q^(d/2)` on unit vectors stored as
    /// `[re_1, im_1, re_2, im_2, ...]`.
    Lens { q: u32 },
}

impl Metric {
    pub fn id(&self) -> &'static str {
        match self {
            Metric::Euclidean => "euclidean",
            Metric::Moore => "moore",
            Metric::Lens { .. } => "lens",
        }
    }
}

/// A finite dataset paired with the metric (or dissimilarity) to read it
/// under, plus the RNG seed that produced it, for provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricDataset {
    metric: Metric,
    points: Vec<Vec<f64>>,
    seed: u64,
}

impl MetricDataset {
    pub fn new(metric: Metric, points: Vec<Vec<f64>>, seed: u64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyCloud);
        }
        let width = points[0].len();
        for (i, p) in points.iter().enumerate() {
            if p.len() != width {
                return Err(Error::LengthMismatch {
                    left: p.len(),
                    right: width,
                });
            }
            if !p.iter().all(|v| v.is_finite()) {
                return Err(Error::InvalidParameter("non-finite coordinate"));
            }
            match metric {
                Metric::Euclidean => {
                    if width == 0 {
                        return Err(Error::InvalidParameter("zero-width points"));
                    }
                }
                Metric::Moore => {
                    if width != 2 {
                        return Err(Error::InvalidParameter("moore points live in R^2"));
                    }
                    if p[0] * p[0] + p[1] * p[1] > 1.0 + 1e-9 {
                        return Err(Error::PointOutsideDisc { index: i });
                    }
                }
                Metric::Lens { q } => {
                    check_prime(q)?;
                    if width < 2 || !width.is_multiple_of(2) {
                        return Err(Error::InvalidParameter(
                            "lens points need an even number of coordinates",
                        ));
                    }
                    let n2: f64 = p.iter().map(|v| v * v).sum();
                    if (libm::sqrt(n2) - 1.0).abs() > 1e-9 {
                        return Err(Error::NotUnit);
                    }
                }
            }
        }
        Ok(MetricDataset {
            metric,
            points,
            seed,
        })
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Lens-space view of point `i`; only valid under `Metric::Lens`.
    pub fn lens_point(&self, i: usize) -> Result<LensPoint> {
        let Metric::Lens { q } = self.metric else {
            return Err(Error::InvalidParameter("not a lens dataset"));
        };
        let p = &self.points[i];
        let rep: Vec<C64> = p.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect();
        LensPoint::from_unnormalized(rep, q)
    }

    /// Distance (dissimilarity, for the Moore space) between points `i` and
    /// `j` as stored.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (&self.points[i], &self.points[j]);
        match self.metric {
            Metric::Euclidean => libm::sqrt(
                a.iter()
                    .zip(b)
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>(),
            ),
            Metric::Moore => moore_distance((a[0], a[1]), (b[0], b[1])),
            Metric::Lens { q } => {
                // Representatives were validated as unit at construction.
                let pa: Vec<C64> = a.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect();
                let pb: Vec<C64> = b.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect();
                let la = LensPoint::from_unnormalized(pa, q).expect("validated at construction");
                let lb = LensPoint::from_unnormalized(pb, q).expect("validated at construction");
                lens_distance(&la, &lb).expect("same q and dimension")
            }
        }
    }
}

/// Dissimilarity on the mod-3 Moore space `M(Z_3, 1)`, realized as the closed
/// unit disc with boundary identified under 120-degree rotation. Case split:
///
/// * both interior:       `|x - y|`
/// * exactly one on the boundary: `min_k |x - zeta^k y|`
/// * both on the boundary: `min_k acos(<x, zeta^k y>)`  (clamped)
///
/// where `<.,.>` is the Euclidean inner product on `R^2` and `zeta` rotates
/// by `2*pi/3`. A boundary point is the same point of the quotient as its two
/// rotations, so distances to it take the best representative; the glued
/// boundary circle itself carries the arc metric. The arccos uses the raw
/// inner product, not its absolute value: the identification glues boundary
/// points to their 120-degree rotations only, so antipodal boundary points
/// must stay at distance `acos(cos(pi/3)) = pi/3`, not zero.
///
/// Mixing chords (disc) with arcs (glued circle) can overshoot triangle
/// inequalities by a few percent on triples that hug the boundary; downstream
/// stages treat this as a dissimilarity and never assume exact metric axioms.
pub fn moore_distance(x: (f64, f64), y: (f64, f64)) -> f64 {
    let nx = libm::sqrt(x.0 * x.0 + x.1 * x.1);
    let ny = libm::sqrt(y.0 * y.0 + y.1 * y.1);
    let x_bd = nx >= 1.0 - BOUNDARY_TOL;
    let y_bd = ny >= 1.0 - BOUNDARY_TOL;
    let inner = |a: (f64, f64), b: (f64, f64)| a.0 * b.0 + a.1 * b.1;
    let chord = |a: (f64, f64), b: (f64, f64)| libm::sqrt((a.0 - b.0) * (a.0 - b.0) + (a.1 - b.1) * (a.1 - b.1));
    let rot = |p: (f64, f64), k: u32| -> (f64, f64) {
        let ang = 2.0 * PI * k as f64 / 3.0;
        let (s, c) = (libm::sin(ang), libm::cos(ang));
        (c * p.0 - s * p.1, s * p.0 + c * p.1)
    };
    // Rotating either argument sweeps the same set of representative pairs,
    // so the boundary point need not be singled out in the mixed case.
    match (x_bd, y_bd) {
        (false, false) => chord(x, y),
        (true, true) => (0..3)
            .map(|k| libm::acos(inner(x, rot(y, k)).clamp(-1.0, 1.0)))
            .fold(f64::INFINITY, f64::min),
        _ => (0..3)
            .map(|k| chord(x, rot(y, k)))
            .fold(f64::INFINITY, f64::min),
    }
}

/// Noisy unit circle in `R^2`: angles uniform on `[0, 2*pi)`, radii
/// `1 + N(0, sigma^2)`. Draw order per point is angle, then radial noise;
/// changing it would silently break seed reproducibility.
pub fn sample_circle(n_points: usize, sigma: f64, seed: u64) -> Result<MetricDataset> {
    if n_points == 0 {
        return Err(Error::EmptyCloud);
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidParameter("sigma must be finite and >= 0"));
    }
    let normal = Normal::new(0.0, sigma).map_err(|_| Error::InvalidParameter("sigma"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n_points);
    for _ in 0..n_points {
        let theta = rng.gen::<f64>() * 2.0 * PI;
        let r = 1.0 + normal.sample(&mut rng);
        points.push(vec![r * libm::cos(theta), r * libm::sin(theta)]);
    }
    MetricDataset::new(Metric::Euclidean, points, seed)
}

/// Uniform sample of the open unit disc (area measure), read as the Moore
/// space: radius `sqrt(u)`, angle uniform.
pub fn sample_moore(n_points: usize, seed: u64) -> Result<MetricDataset> {
    if n_points == 0 {
        return Err(Error::EmptyCloud);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n_points);
    for _ in 0..n_points {
        let theta = rng.gen::<f64>() * 2.0 * PI;
        let r = libm::sqrt(rng.gen::<f64>());
        points.push(vec![r * libm::cos(theta), r * libm::sin(theta)]);
    }
    MetricDataset::new(Metric::Moore, points, seed)
}

/// Moore-space sample whose first `n_boundary` points sit evenly spaced on
/// the glued boundary circle (angles `2*pi*j / n_boundary`), followed by
/// `n_points - n_boundary` uniform disc points.
///
/// A uniform disc sample contains no boundary points, so the gluing would
/// stay invisible to a landmark complex built from it; seeding the landmark
/// selection with indices `0..n_boundary` of this dataset puts the quotient
/// circle into the complex explicitly.
pub fn sample_moore_with_boundary(
    n_points: usize,
    n_boundary: usize,
    seed: u64,
) -> Result<MetricDataset> {
    if n_boundary == 0 {
        return sample_moore(n_points, seed);
    }
    if n_boundary > n_points {
        return Err(Error::InvalidParameter("more boundary points than points"));
    }
    let mut points: Vec<Vec<f64>> = (0..n_boundary)
        .map(|j| {
            let ang = 2.0 * PI * j as f64 / n_boundary as f64;
            vec![libm::cos(ang), libm::sin(ang)]
        })
        .collect();
    if n_points > n_boundary {
        let interior = sample_moore(n_points - n_boundary, seed)?;
        points.extend(interior.points().iter().cloned());
    }
    MetricDataset::new(Metric::Moore, points, seed)
}

/// Uniform sample of `L_q^2`: standard Gaussian vectors in `R^4 = C^2`,
/// normalized onto `S^3` (near-zero draws are rejected and redrawn).
pub fn sample_lens(n_points: usize, q: u32, seed: u64) -> Result<MetricDataset> {
    if n_points == 0 {
        return Err(Error::EmptyCloud);
    }
    check_prime(q)?;
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n_points);
    while points.len() < n_points {
        let v: [f64; 4] = [
            normal.sample(&mut rng),
            normal.sample(&mut rng),
            normal.sample(&mut rng),
            normal.sample(&mut rng),
        ];
        let n = libm::sqrt(v.iter().map(|x| x * x).sum());
        if n < 1e-6 {
            continue;
        }
        points.push(v.iter().map(|x| x / n).collect());
    }
    MetricDataset::new(Metric::Lens { q }, points, seed)
}

/// Dense symmetric distance matrix with a zero diagonal. All constructors
/// fill the upper triangle once and mirror it, so symmetry holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

/// Hard cap on dense matrix side length; beyond this the quadratic storage
/// stops being a desk-scale object.
pub const MAX_DENSE: usize = 20_000;

impl DistanceMatrix {
    /// Build from `f(i, j)` evaluated once per unordered pair `i < j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        if n > MAX_DENSE {
            return Err(Error::InvalidParameter("distance matrix too large"));
        }
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = f(i, j);
                if !(d >= 0.0 && d.is_finite()) {
                    return Err(Error::AsymmetricInput { i, j });
                }
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        Ok(DistanceMatrix { n, data })
    }

    /// Pairwise distances of a subset of dataset points (the whole dataset if
    /// `indices` enumerates it). The diagonal is pinned to zero even for the
    /// Moore dissimilarity.
    pub fn from_dataset(ds: &MetricDataset, indices: &[usize]) -> Result<Self> {
        for &i in indices {
            if i >= ds.len() {
                return Err(Error::InvalidParameter("index out of range"));
            }
        }
        Self::from_fn(indices.len(), |a, b| ds.distance(indices[a], indices[b]))
    }

    /// Euclidean pairwise distances of raw coordinate rows.
    pub fn from_euclidean_rows(points: &[Vec<f64>]) -> Result<Self> {
        for p in points {
            if p.len() != points[0].len() {
                return Err(Error::LengthMismatch {
                    left: p.len(),
                    right: points[0].len(),
                });
            }
        }
        Self::from_fn(points.len(), |i, j| {
            libm::sqrt(
                points[i]
                    .iter()
                    .zip(&points[j])
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>(),
            )
        })
    }

    /// Pairwise lens distances of a cloud of lens points (all sharing `q` and
    /// ambient dimension).
    pub fn from_lens_points(points: &[LensPoint]) -> Result<Self> {
        let mut err = None;
        let m = Self::from_fn(points.len(), |i, j| {
            match lens_distance(&points[i], &points[j]) {
                Ok(d) => d,
                Err(e) => {
                    err = Some(e);
                    0.0
                }
            }
        })?;
        match err {
            Some(e) => Err(e),
            None => Ok(m),
        }
    }

    /// Validate and wrap an externally supplied square matrix.
    pub fn from_raw(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n > MAX_DENSE {
            return Err(Error::InvalidParameter("distance matrix too large"));
        }
        let mut data = vec![0.0; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::LengthMismatch {
                    left: row.len(),
                    right: n,
                });
            }
            for (j, &d) in row.iter().enumerate() {
                if !(d >= 0.0 && d.is_finite()) || (i == j && d != 0.0) {
                    return Err(Error::AsymmetricInput { i, j });
                }
                data[i * n + j] = d;
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if data[i * n + j] != data[j * n + i] {
                    return Err(Error::AsymmetricInput { i, j });
                }
            }
        }
        Ok(DistanceMatrix { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// `min_i max_j d(i, j)`: every simplex of diameter at or above this is
    /// a cone over some vertex, so degree >= 1 persistence is complete below
    /// it. Zero for a single point.
    pub fn enclosing_radius(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.get(i, j))
                    .fold(0.0f64, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
            .min(f64::MAX)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moore_hand_values() {
        // interior pairs use plain Euclidean distance
        let x = (0.5, 0.0);
        assert_eq!(moore_distance(x, x), 0.0);
        assert!((moore_distance(x, (0.2, 0.4)) - 0.5).abs() < 1e-15);
        // boundary point and its 120-degree rotation are identified
        let b = (1.0, 0.0);
        let rot = ((2.0 * PI / 3.0).cos(), (2.0 * PI / 3.0).sin());
        assert!(moore_distance(b, rot) < 1e-7);
        // ... but a 60-degree neighbor stays pi/3 away
        let s = ((PI / 3.0).cos(), (PI / 3.0).sin());
        assert!((moore_distance(b, s) - PI / 3.0).abs() < 1e-12);
        // mixed case: the nearest of the three representatives wins
        let y = (0.3, 0.0);
        assert!((moore_distance(b, y) - 0.7).abs() < 1e-12);
        assert!((moore_distance(y, b) - 0.7).abs() < 1e-12);
        // a point near a rotated copy of the boundary point is close to it
        let near_rot = (0.95 * rot.0, 0.95 * rot.1);
        assert!((moore_distance(b, near_rot) - 0.05).abs() < 1e-12);
    }

    #[test]
    fn moore_symmetry_and_boundary_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rot120 = |p: (f64, f64)| -> (f64, f64) {
            let (s, c) = (2.0 * PI / 3.0).sin_cos();
            (c * p.0 - s * p.1, s * p.0 + c * p.1)
        };
        for _ in 0..200 {
            let interior = |rng: &mut ChaCha8Rng| {
                let t = rng.gen::<f64>() * 2.0 * PI;
                let r = 0.999 * rng.gen::<f64>().sqrt();
                (r * t.cos(), r * t.sin())
            };
            let boundary = |rng: &mut ChaCha8Rng| {
                let t = rng.gen::<f64>() * 2.0 * PI;
                (t.cos(), t.sin())
            };
            let (x, y) = match rng.gen_range(0..3) {
                0 => (interior(&mut rng), interior(&mut rng)),
                1 => (boundary(&mut rng), interior(&mut rng)),
                _ => (boundary(&mut rng), boundary(&mut rng)),
            };
            assert!((moore_distance(x, y) - moore_distance(y, x)).abs() < 1e-12);
            // rotating a boundary argument never changes the value
            let nx = (x.0 * x.0 + x.1 * x.1).sqrt();
            if nx >= 1.0 - BOUNDARY_TOL {
                assert!((moore_distance(rot120(x), y) - moore_distance(x, y)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn circle_sampler_shape() {
        let ds = sample_circle(10, 0.0, 7).unwrap();
        assert_eq!(ds.len(), 10);
        for p in ds.points() {
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            assert!((r - 1.0).abs() < 1e-15);
        }
        // single-point dataset is legal
        assert_eq!(sample_circle(1, 0.1, 0).unwrap().len(), 1);

        let big = sample_circle(10_000, 0.1, 1).unwrap();
        let mean_r: f64 = big
            .points()
            .iter()
            .map(|p| (p[0] * p[0] + p[1] * p[1]).sqrt())
            .sum::<f64>()
            / 10_000.0;
        assert!((mean_r - 1.0).abs() < 0.02, "mean radius {mean_r}");
    }

    #[test]
    fn samplers_are_seed_deterministic() {
        assert_eq!(sample_circle(50, 0.1, 9).unwrap(), sample_circle(50, 0.1, 9).unwrap());
        assert_eq!(sample_moore(50, 9).unwrap(), sample_moore(50, 9).unwrap());
        assert_eq!(sample_lens(50, 3, 9).unwrap(), sample_lens(50, 3, 9).unwrap());
        assert_ne!(
            sample_circle(50, 0.1, 9).unwrap().points(),
            sample_circle(50, 0.1, 10).unwrap().points()
        );
    }

    #[test]
    fn boundary_seeded_moore_sampler_layout() {
        let ds = sample_moore_with_boundary(100, 10, 5).unwrap();
        assert_eq!(ds.len(), 100);
        for j in 0..10 {
            let p = &ds.points()[j];
            let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
            assert!((r - 1.0).abs() <= BOUNDARY_TOL);
            let ang = 2.0 * PI * j as f64 / 10.0;
            assert!((p[0] - ang.cos()).abs() < 1e-15);
            assert!((p[1] - ang.sin()).abs() < 1e-15);
        }
        for p in &ds.points()[10..] {
            assert!((p[0] * p[0] + p[1] * p[1]).sqrt() < 1.0);
        }
        // interior tail matches the plain sampler with the same seed
        let plain = sample_moore(90, 5).unwrap();
        assert_eq!(&ds.points()[10..], plain.points());
        // degenerate parameter choices
        assert_eq!(sample_moore_with_boundary(50, 0, 1).unwrap(), sample_moore(50, 1).unwrap());
        assert_eq!(sample_moore_with_boundary(10, 10, 1).unwrap().len(), 10);
        assert!(sample_moore_with_boundary(5, 10, 1).is_err());
    }

    #[test]
    fn moore_sampler_stays_inside() {
        let ds = sample_moore(500, 4).unwrap();
        for p in ds.points() {
            assert!(p[0] * p[0] + p[1] * p[1] < 1.0);
        }
    }

    #[test]
    fn lens_sampler_is_unit_and_consistent() {
        let ds = sample_lens(100, 3, 11).unwrap();
        for i in 0..ds.len() {
            let p = &ds.points()[i];
            let n: f64 = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-12);
        }
        // dataset distance equals the lens metric on extracted points
        for (i, j) in [(0usize, 1usize), (5, 17), (40, 99)] {
            let a = ds.lens_point(i).unwrap();
            let b = ds.lens_point(j).unwrap();
            let want = lens_distance(&a, &b).unwrap();
            assert!((ds.distance(i, j) - want).abs() < 1e-15);
        }
    }

    #[test]
    fn dataset_validation() {
        assert!(matches!(
            MetricDataset::new(Metric::Moore, vec![vec![1.5, 0.0]], 0),
            Err(Error::PointOutsideDisc { index: 0 })
        ));
        assert!(matches!(
            MetricDataset::new(Metric::Lens { q: 3 }, vec![vec![0.5, 0.0, 0.0, 0.0]], 0),
            Err(Error::NotUnit)
        ));
        assert!(MetricDataset::new(Metric::Euclidean, Vec::new(), 0).is_err());
        assert!(MetricDataset::new(
            Metric::Euclidean,
            vec![vec![0.0, 1.0], vec![f64::NAN, 0.0]],
            0
        )
        .is_err());
    }

    #[test]
    fn distance_matrix_basics() {
        let square = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ];
        let m = DistanceMatrix::from_euclidean_rows(&square).unwrap();
        assert_eq!(m.get(0, 2), 2f64.sqrt());
        assert_eq!(m.get(2, 0), m.get(0, 2));
        assert_eq!(m.get(1, 1), 0.0);
        assert!((m.enclosing_radius() - 2f64.sqrt()).abs() < 1e-15);

        // Moore diagonal stays zero.
        let ds = sample_moore(10, 2).unwrap();
        let dm = DistanceMatrix::from_dataset(&ds, &[0, 3, 7]).unwrap();
        for i in 0..3 {
            assert_eq!(dm.get(i, i), 0.0);
        }

        assert!(DistanceMatrix::from_raw(&[vec![0.0, 1.0], vec![2.0, 0.0]]).is_err());
        assert!(DistanceMatrix::from_raw(&[vec![0.5]]).is_err());
        assert!(DistanceMatrix::from_raw(&[vec![0.0, 1.0], vec![1.0, 0.0]]).is_ok());
    }

    #[test]
    fn enclosing_radius_single_point() {
        let m = DistanceMatrix::from_fn(1, |_, _| unreachable!()).unwrap();
        assert_eq!(m.enclosing_radius(), 0.0);
    }
}
