//! End-to-end orchestration: sample → landmarks → persistence → classifying
//! map → dimensionality reduction → exports, with every stage's output
//! written to the output directory in the documented JSON/CSV formats.

use crate::error::{CliError, Result};
use crate::formats::{
    per_ratio_text, reported_pvar, viz_csv, write_bytes, write_json, CoverageDoc, DatasetDoc,
    EmbeddingDoc, LandmarksDoc, LensCloudDoc, LpcaDoc, PerRatioDoc, PerRatioRowDoc,
    PersistenceDoc, SelectedClassDoc, SummaryDoc, TimingsDoc, VizRowDoc, PVAR_CONVENTION,
};
use crate::par::pmap;
use lenscoords_core::isomap::{compare_per_ratio, isomap, IsomapConfig};
use lenscoords_core::landmarks::{maxmin_landmarks, LandmarkSet};
use lenscoords_core::lens_map::{lens_coordinates_from_rows, LensCloud, LensMapConfig};
use lenscoords_core::lpca::{choose_dim, lpca, DimRule, LpcaResult};
use lenscoords_core::persistence::{
    most_persistent_class, persistent_cohomology, select_class, PersistencePair,
    PersistenceResult, PrimeField,
};
use lenscoords_core::rips::build_rips;
use lenscoords_core::spaces::{
    sample_circle, sample_lens, sample_moore_with_boundary, DistanceMatrix, MetricDataset,
};
use lenscoords_core::viz::domain_point;
use lenscoords_core::Error as CoreError;
use std::fs;
use std::path::PathBuf;
use std::time::Instant;

/// Number of evenly spaced boundary points prepended to disc samples so the
/// landmark set always represents the glued edge of the quotient.
pub const MOORE_BOUNDARY_SEEDS: usize = 10;

/// Target dimension used for the baseline comparison: the baseline embeds
/// into R^4 and the lens cloud is reduced to complex dimension 4. Reducing
/// further (to complex dimension 2) empirically erases the very torsion
/// signal the comparison is about, on every space tried.
pub const COMPARISON_DIM: usize = 4;

/// Default number of probe points the comparison diagrams are computed on.
/// Degree-1 persistence over a clique complex gets expensive quickly; a few
/// hundred probes keep each diagram under a couple of seconds while leaving
/// the dominance ratios stable across seeds.
pub const DEFAULT_CMP_SAMPLE: usize = 200;

/// Filtration cutoff: slightly past the enclosing radius, so classes dying
/// exactly there are still recorded (every simplex at or above it is a cone
/// over some vertex and nothing in degree 1 survives past it).
pub fn rips_threshold(dm: &DistanceMatrix) -> f64 {
    dm.enclosing_radius() * 1.000001
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Circle,
    Moore,
    Lens,
}

impl Space {
    pub fn id(&self) -> &'static str {
        match self {
            Space::Circle => "circle",
            Space::Moore => "moore",
            Space::Lens => "lens",
        }
    }
}

/// How the cover radius is chosen once a class is selected.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EpsilonRule {
    /// `birth + min(delta, (death/2 - birth)/2)` for admissible classes;
    /// fallback classes are capped just under `death / 2` so the transferred
    /// values still form a cocycle on the cover nerve.
    Auto,
    /// A user-supplied radius, taken as-is.
    Fixed(f64),
}

/// How the degree-1 class driving the classifying map is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassRule {
    /// Require `death > 2 * birth`; fail otherwise.
    Strict,
    /// Prefer an admissible class, but fall back to the most persistent
    /// finite one when none exists (losing the chart-independence
    /// guarantee).
    MostPersistent,
}

/// How the reduction target dimension is chosen from the variance profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetDimRule {
    Fixed(usize),
    Threshold(f64),
    Gap(f64),
}

#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub space: Space,
    pub n_points: usize,
    pub n_landmarks: usize,
    pub q: u32,
    pub seed: u64,
    /// Radial noise level; only circle samples consume it.
    pub sigma: f64,
    pub epsilon: EpsilonRule,
    pub delta: f64,
    pub dim_rule: TargetDimRule,
    pub class_rule: ClassRule,
    pub knn: usize,
    /// Number of probe points used for the embedding comparison; clamped to
    /// the covered-point count at run time.
    pub cmp_sample: usize,
    pub out_dir: PathBuf,
}

impl PipelineConfig {
    fn validate(&self) -> Result<()> {
        PrimeField::new(self.q)?;
        if self.q == 2 {
            return Err(CliError::config("q must be an odd prime (q > 2)"));
        }
        if self.n_points == 0 {
            return Err(CliError::config("need a positive number of points"));
        }
        if self.n_landmarks < 2 || self.n_landmarks > self.n_points {
            return Err(CliError::config(
                "need at least 2 landmarks and no more than the number of points",
            ));
        }
        if self.sigma < 0.0 || !self.sigma.is_finite() {
            return Err(CliError::config("sigma must be finite and nonnegative"));
        }
        if self.delta <= 0.0 || !self.delta.is_finite() {
            return Err(CliError::config("delta must be positive and finite"));
        }
        if let EpsilonRule::Fixed(e) = self.epsilon {
            if e <= 0.0 || !e.is_finite() {
                return Err(CliError::config("epsilon must be positive and finite"));
            }
        }
        if let TargetDimRule::Fixed(k) = self.dim_rule {
            if k < 1 || k > self.n_landmarks {
                return Err(CliError::config(
                    "target dimension must be between 1 and the number of landmarks",
                ));
            }
        }
        if self.knn < 1 {
            return Err(CliError::config("knn must be at least 1"));
        }
        if self.cmp_sample < 2 {
            return Err(CliError::config("comparison sample must be at least 2"));
        }
        Ok(())
    }
}

/// Everything `run_pipeline` produced, for callers that want the in-memory
/// objects as well as the files.
pub struct PipelineOutput {
    pub summary: SummaryDoc,
    pub dataset: MetricDataset,
    pub landmarks: LandmarkSet,
    pub persistence_z2: PersistenceResult,
    pub persistence_zq: PersistenceResult,
    pub cloud: LensCloud,
    pub covered_indices: Vec<usize>,
    pub lpca: LpcaResult,
}

struct StageClock {
    timings: TimingsDoc,
    order: usize,
}

impl StageClock {
    fn new() -> Self {
        StageClock { timings: TimingsDoc::default(), order: 0 }
    }

    fn run<R>(&mut self, name: &str, f: impl FnOnce() -> Result<R>) -> Result<R> {
        let t0 = Instant::now();
        let out = f()?;
        self.order += 1;
        self.timings
            .stages
            .insert(format!("{:02}_{name}", self.order), t0.elapsed().as_secs_f64() * 1e3);
        Ok(out)
    }
}

fn sample_space(cfg: &PipelineConfig) -> Result<MetricDataset> {
    Ok(match cfg.space {
        Space::Circle => sample_circle(cfg.n_points, cfg.sigma, cfg.seed)?,
        Space::Moore => {
            sample_moore_with_boundary(cfg.n_points, MOORE_BOUNDARY_SEEDS, cfg.seed)?
        }
        Space::Lens => sample_lens(cfg.n_points, cfg.q, cfg.seed)?,
    })
}

fn pick_landmarks(cfg: &PipelineConfig, ds: &MetricDataset) -> Result<LandmarkSet> {
    let seeds: Vec<usize> = match cfg.space {
        // The evenly spaced boundary points come first in the sample; seeding
        // the greedy selection with them keeps the glued edge represented.
        Space::Moore => (0..MOORE_BOUNDARY_SEEDS.min(cfg.n_landmarks)).collect(),
        _ => Vec::new(),
    };
    Ok(maxmin_landmarks(ds, cfg.n_landmarks, &seeds, cfg.seed)?)
}

/// Select the driving class per the configured rule. Returns the pair index,
/// the pair, whether it clears the admissibility bar, and the rule label.
fn choose_class(
    rule: ClassRule,
    pers: &PersistenceResult,
) -> Result<(usize, PersistencePair, bool, &'static str)> {
    let dgm1 = &pers.diagrams[1];
    match select_class(dgm1) {
        Ok((i, p)) => Ok((i, p, true, "strict")),
        Err(e) => match rule {
            ClassRule::Strict => Err(e.into()),
            ClassRule::MostPersistent => {
                let (i, p) = most_persistent_class(dgm1)?;
                Ok((i, p, false, "most-persistent"))
            }
        },
    }
}

/// Shrink factor applied to the largest scale at which a fallback class's
/// representative still restricts to a genuine cocycle on the cover nerve.
pub const CAP_MARGIN: f64 = 0.05;

/// Build the map configuration for the selected class.
///
/// An admissible class uses the published scale rule. A fallback class (death
/// within twice the birth) caps the scale just under half its death instead:
/// every nerve edge then stays inside the representative's validity range, so
/// the transferred values still form a cocycle and edge verification stays
/// on. The price is that points farther than the capped scale from every
/// landmark drop out of the covered subset. An explicit scale outside the
/// admissible window opts into unverified lookups, which the summary records
/// via the `admissible` flag.
fn map_config(
    rule: EpsilonRule,
    q: u32,
    pair: &PersistencePair,
    delta: f64,
    admissible: bool,
) -> Result<LensMapConfig> {
    let cfg = match rule {
        EpsilonRule::Auto => {
            if admissible {
                LensMapConfig::for_class(q, pair, delta)?
            } else if pair.death.is_finite() {
                LensMapConfig::new(q, (1.0 - CAP_MARGIN) * pair.death / 2.0)?
            } else {
                LensMapConfig::new(q, pair.birth + delta)?.with_unverified_edges()
            }
        }
        EpsilonRule::Fixed(e) => {
            let cfg = LensMapConfig::new(q, e)?;
            if 2.0 * e < pair.death {
                cfg
            } else {
                cfg.with_unverified_edges()
            }
        }
    };
    Ok(cfg)
}

/// Rows of landmark distances for every dataset point, computed in parallel.
fn landmark_rows(ds: &MetricDataset, landmarks: &LandmarkSet) -> Vec<Vec<f64>> {
    let indices: Vec<usize> = (0..ds.len()).collect();
    pmap(&indices, |&i| landmarks.distances_from(ds, i))
}

/// Split rows into the covered subset (some distance `< epsilon`) and the
/// original indices of that subset.
fn covered_subset(rows: &[Vec<f64>], epsilon: f64) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut covered = Vec::with_capacity(rows.len());
    let mut index = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        if row.iter().any(|&d| d < epsilon) {
            covered.push(row.clone());
            index.push(i);
        }
    }
    (covered, index)
}

fn dim_targets(rule: TargetDimRule, profile: &[f64]) -> usize {
    match rule {
        TargetDimRule::Fixed(k) => k,
        TargetDimRule::Threshold(tau) => choose_dim(profile, DimRule::Threshold(tau)),
        TargetDimRule::Gap(gamma) => choose_dim(profile, DimRule::Gap(gamma)),
    }
}

pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutput> {
    cfg.validate()?;
    fs::create_dir_all(&cfg.out_dir).map_err(|source| CliError::Io {
        path: cfg.out_dir.display().to_string(),
        source,
    })?;
    let out = |name: &str| cfg.out_dir.join(name);
    let mut clock = StageClock::new();

    let ds = clock.run("sample", || {
        let ds = sample_space(cfg)?;
        write_json(&out("dataset.json"), &DatasetDoc::from_dataset(&ds))?;
        Ok(ds)
    })?;

    let landmarks = clock.run("landmarks", || {
        let lm = pick_landmarks(cfg, &ds)?;
        write_json(
            &out("landmarks.json"),
            &LandmarksDoc { indices: lm.indices().to_vec(), cover_radius: lm.cover_radius() },
        )?;
        Ok(lm)
    })?;

    let landmark_dm = landmarks.distance_matrix(&ds)?;
    let threshold = rips_threshold(&landmark_dm);
    let complex = clock.run("rips", || Ok(build_rips(&landmark_dm, 2, threshold)?))?;

    let pers_z2 = clock.run("persistence_z2", || {
        let r = persistent_cohomology(&complex, 2)?;
        write_json(&out("persistence_z2.json"), &PersistenceDoc::from_result(&r, threshold))?;
        Ok(r)
    })?;
    let pers_zq = clock.run("persistence_zq", || {
        let r = persistent_cohomology(&complex, cfg.q)?;
        write_json(
            &out(&format!("persistence_z{}.json", cfg.q)),
            &PersistenceDoc::from_result(&r, threshold),
        )?;
        Ok(r)
    })?;

    let (class_index, pair, admissible, rule_label) = choose_class(cfg.class_rule, &pers_zq)?;
    let map_cfg = map_config(cfg.epsilon, cfg.q, &pair, cfg.delta, admissible)?;
    let eta = &pers_zq.cocycles[class_index];

    let (cloud, covered_indices) = clock.run("lens_map", || {
        let rows = landmark_rows(&ds, &landmarks);
        let (covered_rows, covered_indices) = covered_subset(&rows, map_cfg.epsilon);
        if covered_indices.is_empty() {
            return Err(CoreError::CoverageFailure { uncovered: (0..ds.len()).collect() }.into());
        }
        let cloud = lens_coordinates_from_rows(&covered_rows, &landmark_dm, eta, &map_cfg)?;
        write_json(
            &out("lens_cloud.json"),
            &LensCloudDoc::from_cloud(&cloud, covered_indices.clone()),
        )?;
        Ok((cloud, covered_indices))
    })?;

    let cmp_dim = COMPARISON_DIM.min(cfg.n_landmarks);
    let (lp, target_dim) = clock.run("lpca", || {
        let mut dims = vec![1, 2, cmp_dim];
        dims.sort_unstable();
        dims.dedup();
        let mut lp = lpca(cloud.points(), &dims)?;
        let target_dim = dim_targets(cfg.dim_rule, &lp.pvar);
        if !lp.coords.contains_key(&target_dim) {
            dims.push(target_dim);
            dims.sort_unstable();
            lp = lpca(cloud.points(), &dims)?;
        }
        write_json(
            &out("lpca.json"),
            &LpcaDoc::from_result(&lp, cfg.q, covered_indices.clone()),
        )?;
        write_bytes(
            &out("variance_table.txt"),
            variance_table(cfg.space.id(), &lp.pvar).as_bytes(),
        )?;
        Ok((lp, target_dim))
    })?;

    if cfg.q == 3 {
        clock.run("viz", || {
            let p2 = lp
                .coords
                .get(&2)
                .ok_or_else(|| CliError::config("display export needs dimension-2 coordinates"))?;
            let items: Vec<(usize, &lenscoords_core::LensPoint)> =
                covered_indices.iter().copied().zip(p2.iter()).collect();
            let rows = pmap(&items, |&(src, p)| domain_point(p).map(|d| VizRowDoc::new(&d, src)));
            let rows: Vec<VizRowDoc> =
                rows.into_iter().collect::<lenscoords_core::error::Result<_>>()?;
            write_bytes(&out("domain.csv"), viz_csv(&rows).as_bytes())?;
            write_json(&out("domain.json"), &rows)?;
            Ok(())
        })?;
    }

    let per_rows = clock.run("isomap", || {
        // The same probe points are pushed through both embeddings, so the
        // diagrams compare reductions rather than sampling patterns.
        let probe_rows = probe_subsample(covered_indices.len(), cfg.cmp_sample, cfg.seed);
        let src_idx: Vec<usize> = probe_rows.iter().map(|&r| covered_indices[r]).collect();
        let src_dm = DistanceMatrix::from_dataset(&ds, &src_idx)?;
        let iso_cfg = IsomapConfig { k_neighbors: cfg.knn, target_dim: COMPARISON_DIM };
        let embedding = isomap(&src_dm, &iso_cfg)?;
        let iso_dm = DistanceMatrix::from_euclidean_rows(&embedding)?;
        write_json(
            &out("isomap.json"),
            &EmbeddingDoc {
                k_neighbors: cfg.knn,
                target_dim: COMPARISON_DIM,
                source_index: src_idx,
                points: embedding,
            },
        )?;
        let pk = lp.coords.get(&cmp_dim).ok_or_else(|| {
            CliError::config("comparison needs the reduced cloud at its own dimension")
        })?;
        let probe_cloud: Vec<lenscoords_core::LensPoint> =
            probe_rows.iter().map(|&r| pk[r].clone()).collect();
        let lens_dm = DistanceMatrix::from_lens_points(&probe_cloud)?;
        let rows = compare_per_ratio(&iso_dm, &lens_dm, &[2, cfg.q])?;
        let rows: Vec<PerRatioRowDoc> = rows.iter().map(PerRatioRowDoc::from_row).collect();
        write_json(
            &out("per_ratio.json"),
            &PerRatioDoc {
                k_neighbors: cfg.knn,
                target_dim: COMPARISON_DIM,
                sample: probe_rows.len(),
                rows: rows.clone(),
            },
        )?;
        write_bytes(
            &out("per_ratio.txt"),
            per_ratio_text(cfg.space.id(), &rows).as_bytes(),
        )?;
        Ok(rows)
    })?;

    let summary = SummaryDoc {
        space: cfg.space.id().to_string(),
        q: cfg.q,
        n_points: cfg.n_points,
        n_landmarks: cfg.n_landmarks,
        seed: cfg.seed,
        sigma: cfg.sigma,
        epsilon: map_cfg.epsilon,
        delta: cfg.delta,
        rips_threshold: threshold,
        selected_class: SelectedClassDoc {
            index: class_index,
            birth: pair.birth,
            death: pair.death.is_finite().then_some(pair.death),
            admissible,
            rule: rule_label.to_string(),
        },
        coverage: CoverageDoc { covered: covered_indices.len(), total: ds.len() },
        max_partition_deviation: cloud.max_partition_deviation(),
        target_dim,
        pvar: reported_pvar(&lp.pvar),
        pvar_convention: PVAR_CONVENTION.to_string(),
        per_ratios: per_rows,
    };
    write_json(&out("summary.json"), &summary)?;
    write_json(&out("timings.json"), &clock.timings)?;

    Ok(PipelineOutput {
        summary,
        dataset: ds,
        landmarks,
        persistence_z2: pers_z2,
        persistence_zq: pers_zq,
        cloud,
        covered_indices,
        lpca: lp,
    })
}

/// Row positions (into the covered subset) of a uniform probe subsample of
/// size `min(count, n)`, ascending; deterministic in the seed.
pub fn probe_subsample(n: usize, count: usize, seed: u64) -> Vec<usize> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    // Offset the stream so probes never mirror the sampling draws.
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut rows: Vec<usize> = (0..n).collect();
    rows.shuffle(&mut rng);
    rows.truncate(count.min(n));
    rows.sort_unstable();
    rows
}

/// One row in the layout of the published cumulative-variance table: columns
/// `Dim 1..5` list the reported profile entries 1..5 (see
/// [`PVAR_CONVENTION`]); shorter profiles produce fewer columns.
pub fn variance_table(label: &str, pvar: &[f64]) -> String {
    let reported = reported_pvar(pvar);
    let cols = reported.len().saturating_sub(1).min(5);
    let mut head = format!("{:<10}", "space");
    let mut row = format!("{label:<10}");
    for (j, &share) in reported.iter().enumerate().skip(1).take(cols) {
        head.push_str(&format!("{:>9}", format!("Dim {j}")));
        row.push_str(&format!("{:>9.4}", share));
    }
    format!("{head}\n{row}\n# Dim k lists pvar[k] of the summary profile\n")
}
