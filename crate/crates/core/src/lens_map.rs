//! Classifying map from a covered metric space into a lens space.
//!
//! Given landmarks `L`, a scale `epsilon`, and a degree-1 cocycle `eta` with
//! values mod a prime `q`, every point within `epsilon` of some landmark is
//! sent to homogeneous coordinates
//!
//! ```text
//! f_j(x) = [ sqrt(phi_0(x)) * zeta^eta(j,0) : ... : sqrt(phi_{n-1}(x)) * zeta^eta(j,n-1) ]
//! ```
//!
//! where `phi` is the partition of unity subordinate to the epsilon-balls,
//! `j` is a chart landmark with `d(x, l_j) < epsilon`, and `zeta = e^{2 pi i / q}`.
//! The cocycle condition makes different chart choices differ by a global
//! power of `zeta`, so the class in the lens space is chart independent.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::landmarks::LandmarkSet;
use crate::lens_space::LensPoint;
use crate::linalg::C64;
use crate::persistence::{Cocycle, PersistencePair};
use crate::spaces::{DistanceMatrix, MetricDataset};

use core::f64::consts::PI;

/// Default offset added to a class birth when deriving `epsilon`.
pub const DEFAULT_DELTA: f64 = 1e-5;

/// Scale parameters for the classifying map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LensMapConfig {
    /// Coefficient modulus; must match the cocycle.
    pub q: u32,
    /// Ball radius for the landmark cover.
    pub epsilon: f64,
    verify_edges: bool,
}

impl LensMapConfig {
    pub fn new(q: u32, epsilon: f64) -> Result<Self> {
        crate::lens_space::check_prime(q)?;
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(Error::InvalidParameter("epsilon must be positive and finite"));
        }
        Ok(LensMapConfig {
            q,
            epsilon,
            verify_edges: true,
        })
    }

    /// Allow cocycle lookups on landmark pairs at or beyond the cocycle's
    /// validity scale instead of failing with [`Error::MissingEdge`].
    ///
    /// With `2 * epsilon < valid_below` (the admissible regime) every pair of
    /// landmarks sharing a covered point is a verified edge and this setting
    /// changes nothing. Driving the map from a class whose death is at most
    /// twice its birth forces lookups past that scale; values then read as
    /// stored (zero when absent) and chart independence is no longer
    /// guaranteed. Opting in records that the caller accepts the heuristic.
    pub fn with_unverified_edges(mut self) -> Self {
        self.verify_edges = false;
        self
    }

    /// Whether cocycle lookups are restricted to verified edges.
    pub fn verifies_edges(&self) -> bool {
        self.verify_edges
    }

    /// Derive `epsilon` from a persistence pair `(birth, death)`:
    /// `epsilon = birth + min(delta, (death/2 - birth)/2)`.
    ///
    /// The pair must satisfy `death > 2 * birth`, which leaves room for a
    /// scale with `birth <= epsilon` and `2 * epsilon < death`; the first
    /// keeps the cover as coarse as the class requires, the second keeps the
    /// cocycle valid on every landmark pair the partition of unity can join.
    pub fn for_class(q: u32, pair: &PersistencePair, delta: f64) -> Result<Self> {
        if !delta.is_finite() || delta <= 0.0 {
            return Err(Error::InvalidParameter("delta must be positive and finite"));
        }
        let (a, b) = (pair.birth, pair.death);
        if b <= 2.0 * a {
            return Err(Error::NoAdmissibleClass);
        }
        let headroom = if b.is_finite() { (b / 2.0 - a) / 2.0 } else { delta };
        let epsilon = a + delta.min(headroom);
        let cfg = LensMapConfig::new(q, epsilon)?;
        debug_assert!(a <= cfg.epsilon && 2.0 * cfg.epsilon < b);
        Ok(cfg)
    }

    /// Check that this scale is admissible for the given pair.
    pub fn check_class(&self, pair: &PersistencePair) -> Result<()> {
        if pair.birth <= self.epsilon && 2.0 * self.epsilon < pair.death {
            Ok(())
        } else {
            Err(Error::InvalidParameter(
                "epsilon must satisfy birth <= epsilon and 2*epsilon < death",
            ))
        }
    }
}

/// Bump weights of the landmark cover at one point, normalized to sum 1.
///
/// `dists[l]` is the distance from the point to landmark `l`. The weight of
/// landmark `l` is `max(epsilon - dists[l], 0)` rescaled by the total, so a
/// weight is strictly positive exactly when `dists[l] < epsilon`. Fails with
/// [`Error::Uncovered`] when every distance is at least `epsilon`.
pub fn partition_of_unity(dists: &[f64], epsilon: f64) -> Result<Vec<f64>> {
    if !epsilon.is_finite() || epsilon <= 0.0 {
        return Err(Error::InvalidParameter("epsilon must be positive and finite"));
    }
    if dists.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let mut total = 0.0;
    let mut phi = Vec::with_capacity(dists.len());
    for &d in dists {
        if !d.is_finite() || d < 0.0 {
            return Err(Error::InvalidParameter("distances must be finite and nonnegative"));
        }
        let bump = if d < epsilon { epsilon - d } else { 0.0 };
        total += bump;
        phi.push(bump);
    }
    if total <= 0.0 {
        return Err(Error::Uncovered);
    }
    for w in &mut phi {
        *w /= total;
    }
    Ok(phi)
}

/// Classify one point using its nearest landmark as the chart.
///
/// `dists[l]` is the distance from the point to landmark `l`, in the same
/// order as the rows of `landmark_dm`. Ties on the nearest landmark resolve
/// to the smallest index.
pub fn classify(
    dists: &[f64],
    landmark_dm: &DistanceMatrix,
    eta: &Cocycle,
    cfg: &LensMapConfig,
) -> Result<LensPoint> {
    let chart = nearest_chart(dists)?;
    classify_in_chart(chart, dists, landmark_dm, eta, cfg).map(|(p, _)| p)
}

/// Classify one point in an explicitly chosen chart.
///
/// The chart landmark must itself be within `epsilon` of the point. Returns
/// the lens point together with `|sum(phi) - 1|`, the partition-of-unity
/// normalization residual (useful as a numerical health statistic).
pub fn classify_in_chart(
    chart: usize,
    dists: &[f64],
    landmark_dm: &DistanceMatrix,
    eta: &Cocycle,
    cfg: &LensMapConfig,
) -> Result<(LensPoint, f64)> {
    let n = dists.len();
    if landmark_dm.n() != n {
        return Err(Error::LengthMismatch { left: n, right: landmark_dm.n() });
    }
    if eta.q() != cfg.q {
        return Err(Error::ModulusMismatch { left: cfg.q, right: eta.q() });
    }
    if chart >= n {
        return Err(Error::InvalidParameter("chart index out of range"));
    }
    if dists[chart] >= cfg.epsilon {
        return Err(Error::Uncovered);
    }
    let phi = partition_of_unity(dists, cfg.epsilon)?;
    let deviation = (phi.iter().sum::<f64>() - 1.0).abs();

    let mut rep = vec![C64::new(0.0, 0.0); n];
    for (k, &weight) in phi.iter().enumerate() {
        if weight <= 0.0 {
            continue;
        }
        let amp = libm::sqrt(weight);
        if k == chart {
            rep[k] = C64::new(amp, 0.0);
            continue;
        }
        // The cocycle value is only trustworthy while the landmark pair is an
        // edge of the complex the cocycle was read off from.
        if cfg.verify_edges && landmark_dm.get(chart, k) >= eta.valid_below() {
            return Err(Error::MissingEdge { j: chart, k });
        }
        let angle = 2.0 * PI * f64::from(eta.value(chart, k)) / f64::from(cfg.q);
        rep[k] = C64::new(amp * libm::cos(angle), amp * libm::sin(angle));
    }
    let point = LensPoint::from_unnormalized(rep, cfg.q)?;
    Ok((point, deviation))
}

fn nearest_chart(dists: &[f64]) -> Result<usize> {
    if dists.is_empty() {
        return Err(Error::EmptyCloud);
    }
    let mut best = 0usize;
    for (l, &d) in dists.iter().enumerate().skip(1) {
        if d < dists[best] {
            best = l;
        }
    }
    Ok(best)
}

/// Image of a dataset under the classifying map, with coverage statistics.
#[derive(Debug, Clone)]
pub struct LensCloud {
    q: u32,
    n_landmarks: usize,
    points: Vec<LensPoint>,
    max_partition_deviation: f64,
}

impl LensCloud {
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Ambient homogeneous dimension (number of landmarks).
    pub fn n_landmarks(&self) -> usize {
        self.n_landmarks
    }

    pub fn points(&self) -> &[LensPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Largest observed `|sum(phi) - 1|` over all classified points.
    pub fn max_partition_deviation(&self) -> f64 {
        self.max_partition_deviation
    }

    pub fn into_points(self) -> Vec<LensPoint> {
        self.points
    }
}

/// Apply the classifying map to every row of precomputed landmark distances.
///
/// `rows[i][l]` is the distance from point `i` to landmark `l`. Points not
/// covered by any landmark ball are collected and reported together in
/// [`Error::CoverageFailure`]; any other failure aborts immediately.
pub fn lens_coordinates_from_rows(
    rows: &[Vec<f64>],
    landmark_dm: &DistanceMatrix,
    eta: &Cocycle,
    cfg: &LensMapConfig,
) -> Result<LensCloud> {
    let mut points = Vec::with_capacity(rows.len());
    let mut uncovered = Vec::new();
    let mut max_dev = 0.0f64;
    for (i, dists) in rows.iter().enumerate() {
        let chart = nearest_chart(dists)?;
        match classify_in_chart(chart, dists, landmark_dm, eta, cfg) {
            Ok((p, dev)) => {
                if dev > max_dev {
                    max_dev = dev;
                }
                points.push(p);
            }
            Err(Error::Uncovered) => uncovered.push(i),
            Err(other) => return Err(other),
        }
    }
    if !uncovered.is_empty() {
        return Err(Error::CoverageFailure { uncovered });
    }
    Ok(LensCloud {
        q: cfg.q,
        n_landmarks: landmark_dm.n(),
        points,
        max_partition_deviation: max_dev,
    })
}

/// Apply the classifying map to every point of a dataset.
pub fn lens_coordinates(
    ds: &MetricDataset,
    landmarks: &LandmarkSet,
    eta: &Cocycle,
    cfg: &LensMapConfig,
) -> Result<LensCloud> {
    let landmark_dm = landmarks.distance_matrix(ds)?;
    let rows: Vec<Vec<f64>> = (0..ds.len()).map(|x| landmarks.distances_from(ds, x)).collect();
    lens_coordinates_from_rows(&rows, &landmark_dm, eta, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landmarks::maxmin_landmarks;
    use crate::lens_space::lens_distance;
    use crate::persistence::{persistent_cohomology, select_class};
    use crate::rips::build_rips;
    use crate::spaces::{sample_circle, Metric};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn euclidean_line(points: &[f64]) -> MetricDataset {
        let pts = points.iter().map(|&x| vec![x]).collect();
        MetricDataset::new(Metric::Euclidean, pts, 0).unwrap()
    }

    fn zero_cocycle(q: u32) -> Cocycle {
        Cocycle::from_edges(q, &[], f64::INFINITY).unwrap()
    }

    #[test]
    fn partition_of_unity_examples() {
        let phi = partition_of_unity(&[0.0, 2.0], 1.0).unwrap();
        assert_eq!(phi, vec![1.0, 0.0]);

        let phi = partition_of_unity(&[0.5, 0.75], 1.0).unwrap();
        assert!((phi[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((phi[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!((phi.iter().sum::<f64>() - 1.0).abs() < 1e-15);

        // Positive exactly on the landmarks strictly inside the ball.
        let phi = partition_of_unity(&[0.2, 1.0, 0.999], 1.0).unwrap();
        assert!(phi[0] > 0.0);
        assert_eq!(phi[1], 0.0);
        assert!(phi[2] > 0.0);

        assert!(matches!(partition_of_unity(&[1.0, 2.0], 1.0), Err(Error::Uncovered)));
        assert!(matches!(partition_of_unity(&[], 1.0), Err(Error::EmptyCloud)));
        assert!(partition_of_unity(&[0.1], 0.0).is_err());
        assert!(partition_of_unity(&[-0.1], 1.0).is_err());
    }

    #[test]
    fn isolated_chart_maps_to_a_vertex() {
        let ds = euclidean_line(&[0.0, 10.0, 0.1]);
        let landmarks = LandmarkSet::from_indices(&ds, vec![0, 1]).unwrap();
        let dm = landmarks.distance_matrix(&ds).unwrap();
        let eta = zero_cocycle(3);
        let cfg = LensMapConfig::new(3, 1.0).unwrap();

        let dists = landmarks.distances_from(&ds, 2);
        let p = classify(&dists, &dm, &eta, &cfg).unwrap();
        assert_eq!(p.rep()[0], C64::new(1.0, 0.0));
        assert_eq!(p.rep()[1], C64::new(0.0, 0.0));
    }

    #[test]
    fn zero_cocycle_gives_nonnegative_real_coordinates() {
        let ds = euclidean_line(&[0.0, 1.0, 0.4]);
        let landmarks = LandmarkSet::from_indices(&ds, vec![0, 1]).unwrap();
        let dm = landmarks.distance_matrix(&ds).unwrap();
        let eta = zero_cocycle(5);
        let cfg = LensMapConfig::new(5, 0.8).unwrap();
        let dists = landmarks.distances_from(&ds, 2);
        let p = classify(&dists, &dm, &eta, &cfg).unwrap();
        for z in p.rep() {
            assert!(z.im == 0.0 && z.re >= 0.0);
        }
        // Weights (0.4, 0.2)/0.6 -> amplitudes sqrt(2/3), sqrt(1/3).
        assert!((p.rep()[0].re - libm::sqrt(2.0 / 3.0)).abs() < 1e-15);
        assert!((p.rep()[1].re - libm::sqrt(1.0 / 3.0)).abs() < 1e-15);
    }

    #[test]
    fn chart_change_is_a_global_phase() {
        let ds = euclidean_line(&[0.0, 1.0, 0.5]);
        let landmarks = LandmarkSet::from_indices(&ds, vec![0, 1]).unwrap();
        let dm = landmarks.distance_matrix(&ds).unwrap();
        let eta = Cocycle::from_edges(3, &[(0, 1, 1)], 10.0).unwrap();
        let cfg = LensMapConfig::new(3, 0.8).unwrap();
        let dists = landmarks.distances_from(&ds, 2);

        let (p0, dev0) = classify_in_chart(0, &dists, &dm, &eta, &cfg).unwrap();
        let (p1, dev1) = classify_in_chart(1, &dists, &dm, &eta, &cfg).unwrap();
        assert!(dev0 < 1e-15 && dev1 < 1e-15);

        // Chart 0 sees (sqrt(1/2), sqrt(1/2) * zeta).
        let amp = libm::sqrt(0.5);
        assert!((p0.rep()[0] - C64::new(amp, 0.0)).norm() < 1e-15);
        let zeta = C64::new(libm::cos(2.0 * PI / 3.0), libm::sin(2.0 * PI / 3.0));
        assert!((p0.rep()[1] - zeta * amp).norm() < 1e-15);

        // Same class in the lens space despite different representatives.
        assert!(lens_distance(&p0, &p1).unwrap() < 1e-12);
        assert!((p0.rep()[0] - p1.rep()[0]).norm() > 0.1, "representatives should differ");
    }

    #[test]
    fn missing_edge_is_reported() {
        let ds = euclidean_line(&[0.0, 1.0, 0.5]);
        let landmarks = LandmarkSet::from_indices(&ds, vec![0, 1]).unwrap();
        let dm = landmarks.distance_matrix(&ds).unwrap();
        // Cocycle only valid below 0.5, but the chart must join landmarks at
        // distance 1.
        let eta = Cocycle::from_edges(3, &[(0, 1, 1)], 0.5).unwrap();
        let cfg = LensMapConfig::new(3, 0.8).unwrap();
        let dists = landmarks.distances_from(&ds, 2);
        match classify(&dists, &dm, &eta, &cfg) {
            Err(Error::MissingEdge { j: 0, k: 1 }) => {}
            other => panic!("expected MissingEdge, got {other:?}"),
        }
    }

    #[test]
    fn unverified_edges_can_be_tolerated_on_request() {
        // Same geometry as the MissingEdge case above; opting out of edge
        // verification uses the stored value and still yields a unit vector.
        let ds = euclidean_line(&[0.0, 1.0, 0.5]);
        let landmarks = LandmarkSet::from_indices(&ds, vec![0, 1]).unwrap();
        let dm = landmarks.distance_matrix(&ds).unwrap();
        let eta = Cocycle::from_edges(3, &[(0, 1, 1)], 0.5).unwrap();
        let cfg = LensMapConfig::new(3, 0.8).unwrap().with_unverified_edges();
        assert!(!cfg.verifies_edges());
        let dists = landmarks.distances_from(&ds, 2);
        let point = classify(&dists, &dm, &eta, &cfg).unwrap();
        // Equidistant overlap: weights (1/2, 1/2), phase zeta^1 on the far
        // landmark relative to chart 0.
        let amp = (0.5f64).sqrt();
        let angle = 2.0 * PI / 3.0;
        let rep = point.rep();
        assert!((rep[0].re - amp).abs() < 1e-12 && rep[0].im.abs() < 1e-12);
        assert!((rep[1].re - amp * angle.cos()).abs() < 1e-12);
        assert!((rep[1].im - amp * angle.sin()).abs() < 1e-12);
    }

    #[test]
    fn config_from_class_follows_the_offset_rule() {
        let pair = PersistencePair { birth: 0.3, death: 1.0 };
        let cfg = LensMapConfig::for_class(3, &pair, DEFAULT_DELTA).unwrap();
        assert!((cfg.epsilon - 0.30001).abs() < 1e-12);
        cfg.check_class(&pair).unwrap();

        // Tight admissible gap: the offset shrinks to half the headroom.
        let pair = PersistencePair { birth: 0.3, death: 0.61 };
        let cfg = LensMapConfig::for_class(3, &pair, DEFAULT_DELTA).unwrap();
        assert!(cfg.epsilon >= 0.3 && 2.0 * cfg.epsilon < 0.61);

        // Essential class: plain offset.
        let pair = PersistencePair { birth: 0.3, death: f64::INFINITY };
        let cfg = LensMapConfig::for_class(3, &pair, DEFAULT_DELTA).unwrap();
        assert!((cfg.epsilon - 0.30001).abs() < 1e-12);

        let pair = PersistencePair { birth: 1.0, death: 1.4 };
        assert!(matches!(
            LensMapConfig::for_class(3, &pair, DEFAULT_DELTA),
            Err(Error::NoAdmissibleClass)
        ));

        let pair = PersistencePair { birth: 0.0, death: 0.5 };
        let cfg = LensMapConfig::for_class(3, &pair, DEFAULT_DELTA).unwrap();
        assert!((cfg.epsilon - DEFAULT_DELTA).abs() < 1e-18);
    }

    /// End-to-end chart independence on a noisy circle: every pair of
    /// admissible charts must classify a point into the same lens class.
    #[test]
    fn chart_choice_does_not_move_the_class() {
        let ds = sample_circle(300, 0.05, 7).unwrap();
        let landmarks = maxmin_landmarks(&ds, 12, &[], 7).unwrap();
        let dm = landmarks.distance_matrix(&ds).unwrap();
        let threshold = dm.enclosing_radius() * 1.000001;
        let complex = build_rips(&dm, 2, threshold).unwrap();
        let result = persistent_cohomology(&complex, 3).unwrap();
        let (idx, pair) = select_class(&result.diagrams[1]).unwrap();
        let eta = &result.cocycles[idx];
        let cfg = LensMapConfig::for_class(3, &pair, DEFAULT_DELTA).unwrap();

        let mut compared = 0usize;
        for x in 0..ds.len() {
            let dists = landmarks.distances_from(&ds, x);
            let charts: Vec<usize> =
                (0..dists.len()).filter(|&l| dists[l] < cfg.epsilon).collect();
            for w in charts.windows(2) {
                let (pa, _) = classify_in_chart(w[0], &dists, &dm, eta, &cfg).unwrap();
                let (pb, _) = classify_in_chart(w[1], &dists, &dm, eta, &cfg).unwrap();
                assert!(lens_distance(&pa, &pb).unwrap() < 1e-9);
                compared += 1;
            }
        }
        assert!(compared > 50, "expected many multi-chart points, saw {compared}");

        // The full cloud is covered at the derived scale.
        let cloud = lens_coordinates(&ds, &landmarks, eta, &cfg).unwrap();
        assert_eq!(cloud.len(), ds.len());
        assert_eq!(cloud.n_landmarks(), 12);
        assert!(cloud.max_partition_deviation() < 1e-12);
    }

    /// Adding a coboundary to the cocycle must not move any pairwise lens
    /// distance: the two clouds differ by a fixed diagonal unitary and
    /// per-point group elements.
    #[test]
    fn cohomologous_cocycles_give_isometric_clouds() {
        let ds = sample_circle(250, 0.05, 11).unwrap();
        let landmarks = maxmin_landmarks(&ds, 10, &[], 11).unwrap();
        let dm = landmarks.distance_matrix(&ds).unwrap();
        let threshold = dm.enclosing_radius() * 1.000001;
        let complex = build_rips(&dm, 2, threshold).unwrap();
        let result = persistent_cohomology(&complex, 3).unwrap();
        let (idx, pair) = select_class(&result.diagrams[1]).unwrap();
        let eta = &result.cocycles[idx];
        let cfg = LensMapConfig::for_class(3, &pair, DEFAULT_DELTA).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let alpha: Vec<u32> = (0..landmarks.len()).map(|_| rng.gen_range(0..3)).collect();
        let shifted = eta.add_coboundary(&alpha).unwrap();

        let cloud_a = lens_coordinates(&ds, &landmarks, eta, &cfg).unwrap();
        let cloud_b = lens_coordinates(&ds, &landmarks, &shifted, &cfg).unwrap();

        for s in 0..150 {
            let i = (s * 7) % cloud_a.len();
            let j = (s * 13 + 41) % cloud_a.len();
            let da = lens_distance(&cloud_a.points()[i], &cloud_a.points()[j]).unwrap();
            let db = lens_distance(&cloud_b.points()[i], &cloud_b.points()[j]).unwrap();
            assert!((da - db).abs() < 1e-9, "pair ({i},{j}): {da} vs {db}");
        }
    }

    #[test]
    fn coverage_failure_lists_the_stray_points() {
        let mut pts: Vec<Vec<f64>> = Vec::new();
        for k in 0..40 {
            let t = 2.0 * PI * k as f64 / 40.0;
            pts.push(vec![libm::cos(t), libm::sin(t)]);
        }
        pts.push(vec![50.0, 50.0]);
        let ds = MetricDataset::new(Metric::Euclidean, pts, 0).unwrap();
        let landmarks = LandmarkSet::from_indices(&ds, (0..40).step_by(4).collect()).unwrap();
        let eta = zero_cocycle(3);
        let cfg = LensMapConfig::new(3, 0.7).unwrap();
        match lens_coordinates(&ds, &landmarks, &eta, &cfg) {
            Err(Error::CoverageFailure { uncovered }) => assert_eq!(uncovered, vec![40]),
            other => panic!("expected CoverageFailure, got {other:?}"),
        }
    }
}
