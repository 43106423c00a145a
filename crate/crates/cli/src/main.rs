//! `lenscoords` — build lens-space coordinates for point clouds and measure
//! how well they preserve topology against an Isomap baseline.
//!
//! Subcommands correspond to pipeline stages (`sample`, `landmarks`,
//! `persistence`, `lens-map`, `lpca`, `viz`, `isomap`) plus `pipeline`,
//! which runs everything and writes a summary. Stages communicate through
//! JSON files, so any stage can be replayed or swapped out.

use clap::{Args, Parser, Subcommand};
use lenscoords_cli::error::{CliError, Result};
use lenscoords_cli::formats::{
    per_ratio_text, read_json, viz_csv, write_bytes, write_json, DatasetDoc, EmbeddingDoc,
    LandmarksDoc, LensCloudDoc, LpcaDoc, PerRatioDoc, PerRatioRowDoc, PersistenceDoc, VizRowDoc,
};
use lenscoords_cli::pipeline::{
    map_config, probe_subsample, rips_threshold, run_pipeline, ClassRule, EpsilonRule,
    PipelineConfig, Space, TargetDimRule, COMPARISON_DIM, DEFAULT_CMP_SAMPLE,
    MOORE_BOUNDARY_SEEDS,
};
use lenscoords_core::isomap::{compare_per_ratio, isomap, IsomapConfig};
use lenscoords_core::landmarks::{maxmin_landmarks, LandmarkSet};
use lenscoords_core::lens_map::{lens_coordinates, LensMapConfig};
use lenscoords_core::lpca::{choose_dim, lpca, DimRule};
use lenscoords_core::persistence::{most_persistent_class, persistent_cohomology, select_class};
use lenscoords_core::rips::build_rips;
use lenscoords_core::spaces::{
    sample_circle, sample_lens, sample_moore_with_boundary, DistanceMatrix,
};
use lenscoords_core::viz::domain_point;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "lenscoords", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one of the built-in spaces into a dataset file.
    Sample(SampleArgs),
    /// Pick landmarks for a dataset by greedy maxmin.
    Landmarks(LandmarksArgs),
    /// Run persistent cohomology on the landmark filtration.
    Persistence(PersistenceArgs),
    /// Map every dataset point into a lens space via a selected class.
    LensMap(LensMapArgs),
    /// Reduce a lens cloud dimension by backward-induction projections.
    Lpca(LpcaArgs),
    /// Export a dimension-2 order-3 cloud into the display ball.
    Viz(VizArgs),
    /// Compare topology preservation against the Isomap baseline.
    Isomap(IsomapArgs),
    /// Run every stage and write a summary.
    Pipeline(PipelineArgs),
}

fn parse_space(s: &str) -> std::result::Result<Space, String> {
    match s {
        "circle" => Ok(Space::Circle),
        "moore" => Ok(Space::Moore),
        "lens" => Ok(Space::Lens),
        other => Err(format!("unknown space {other:?} (expected circle, moore, or lens)")),
    }
}

fn parse_epsilon(s: &str) -> std::result::Result<EpsilonRule, String> {
    if s == "auto" {
        return Ok(EpsilonRule::Auto);
    }
    s.parse::<f64>()
        .map(EpsilonRule::Fixed)
        .map_err(|_| format!("expected \"auto\" or a number, got {s:?}"))
}

fn parse_class_rule(s: &str) -> std::result::Result<ClassRule, String> {
    match s {
        "strict" => Ok(ClassRule::Strict),
        "most-persistent" => Ok(ClassRule::MostPersistent),
        other => Err(format!(
            "unknown class rule {other:?} (expected strict or most-persistent)"
        )),
    }
}

/// Resolve the `--target-dim` / `--tau` / `--gamma` trio into one rule.
fn dim_rule(target_dim: usize, tau: Option<f64>, gamma: Option<f64>) -> Result<TargetDimRule> {
    match (tau, gamma) {
        (Some(_), Some(_)) => Err(CliError::config(
            "--tau and --gamma are mutually exclusive dimension rules",
        )),
        (Some(t), None) => Ok(TargetDimRule::Threshold(t)),
        (None, Some(g)) => Ok(TargetDimRule::Gap(g)),
        (None, None) => Ok(TargetDimRule::Fixed(target_dim)),
    }
}

#[derive(Args)]
struct SampleArgs {
    /// Space to sample: circle, moore, or lens.
    #[arg(long, value_parser = parse_space)]
    space: Space,
    /// Number of sample points.
    #[arg(long, default_value_t = 2000)]
    points: usize,
    /// Radial noise level (circle only).
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    /// Quotient order for lens samples.
    #[arg(long, default_value_t = 3)]
    q: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output dataset file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LandmarksArgs {
    /// Input dataset file.
    #[arg(long)]
    dataset: PathBuf,
    /// Number of landmarks to select.
    #[arg(long)]
    landmarks: usize,
    /// Seed the selection with this many initial dataset indices (defaults
    /// to 10 for disc-quotient datasets, whose samples start with evenly
    /// spaced boundary points, and 0 otherwise).
    #[arg(long)]
    boundary_seeds: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output landmarks file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PersistenceArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Landmarks file restricting the filtration.
    #[arg(long)]
    landmarks_file: PathBuf,
    /// Coefficient field order (prime).
    #[arg(long, default_value_t = 3)]
    q: u32,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LensMapArgs {
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    landmarks_file: PathBuf,
    /// Persistence file providing the degree-1 diagram and representatives.
    #[arg(long)]
    persistence: PathBuf,
    /// Cover radius: "auto" derives it from the selected class.
    #[arg(long, default_value = "auto", value_parser = parse_epsilon)]
    epsilon: EpsilonRule,
    /// Scale slack used by the auto radius.
    #[arg(long, default_value_t = lenscoords_core::lens_map::DEFAULT_DELTA)]
    delta: f64,
    /// Class selection: "strict" requires death > 2*birth, "most-persistent"
    /// falls back to the longest finite bar when nothing qualifies.
    #[arg(long, default_value = "strict", value_parser = parse_class_rule)]
    class_rule: ClassRule,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct LpcaArgs {
    /// Input lens cloud file.
    #[arg(long)]
    cloud: PathBuf,
    /// Fixed target dimension (used when neither --tau nor --gamma is set).
    #[arg(long, default_value_t = 2)]
    target_dim: usize,
    /// Pick the smallest dimension whose variance share reaches this value.
    #[arg(long)]
    tau: Option<f64>,
    /// Pick the dimension after which the variance gain drops below this.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VizArgs {
    /// Reduction file holding dimension-2 coordinates.
    #[arg(long)]
    lpca: PathBuf,
    /// Output directory for domain.csv and domain.json.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct IsomapArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// Reduction file providing the lens side of the comparison.
    #[arg(long)]
    lpca: PathBuf,
    /// Neighborhood size for the baseline graph.
    #[arg(long, default_value_t = 8)]
    knn: usize,
    /// Coefficient field compared alongside 2.
    #[arg(long, default_value_t = 3)]
    q: u32,
    /// Number of probe points the comparison diagrams are computed on.
    #[arg(long, default_value_t = DEFAULT_CMP_SAMPLE)]
    sample: usize,
    /// Seed for the probe draw.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory for isomap.json, per_ratio.json, per_ratio.txt.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long, value_parser = parse_space)]
    space: Space,
    #[arg(long, default_value_t = 2000)]
    points: usize,
    #[arg(long, default_value_t = 10)]
    landmarks: usize,
    #[arg(long, default_value_t = 3)]
    q: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Radial noise level (circle only).
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    #[arg(long, default_value = "auto", value_parser = parse_epsilon)]
    epsilon: EpsilonRule,
    #[arg(long, default_value_t = lenscoords_core::lens_map::DEFAULT_DELTA)]
    delta: f64,
    #[arg(long, default_value_t = 2)]
    target_dim: usize,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 8)]
    knn: usize,
    #[arg(long, default_value = "strict", value_parser = parse_class_rule)]
    class_rule: ClassRule,
    /// Number of probe points the embedding comparison is computed on.
    #[arg(long, default_value_t = DEFAULT_CMP_SAMPLE)]
    cmp_sample: usize,
    /// Output directory for all artifacts.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Sample(a) => cmd_sample(a),
        Command::Landmarks(a) => cmd_landmarks(a),
        Command::Persistence(a) => cmd_persistence(a),
        Command::LensMap(a) => cmd_lens_map(a),
        Command::Lpca(a) => cmd_lpca(a),
        Command::Viz(a) => cmd_viz(a),
        Command::Isomap(a) => cmd_isomap(a),
        Command::Pipeline(a) => cmd_pipeline(a),
    }
}

fn cmd_sample(a: SampleArgs) -> Result<()> {
    let ds = match a.space {
        Space::Circle => sample_circle(a.points, a.sigma, a.seed)?,
        Space::Moore => sample_moore_with_boundary(a.points, MOORE_BOUNDARY_SEEDS, a.seed)?,
        Space::Lens => sample_lens(a.points, a.q, a.seed)?,
    };
    write_json(&a.out, &DatasetDoc::from_dataset(&ds))
}

fn cmd_landmarks(a: LandmarksArgs) -> Result<()> {
    let doc: DatasetDoc = read_json(&a.dataset)?;
    let is_moore = doc.metric_id == "moore";
    let ds = doc.into_dataset()?;
    let n_seeds = a
        .boundary_seeds
        .unwrap_or(if is_moore { MOORE_BOUNDARY_SEEDS.min(a.landmarks) } else { 0 });
    let seeds: Vec<usize> = (0..n_seeds).collect();
    let lm = maxmin_landmarks(&ds, a.landmarks, &seeds, a.seed)?;
    write_json(
        &a.out,
        &LandmarksDoc { indices: lm.indices().to_vec(), cover_radius: lm.cover_radius() },
    )
}

fn load_landmarks(
    dataset: &Path,
    landmarks_file: &Path,
) -> Result<(lenscoords_core::spaces::MetricDataset, LandmarkSet)> {
    let ds = read_json::<DatasetDoc>(dataset)?.into_dataset()?;
    let doc: LandmarksDoc = read_json(landmarks_file)?;
    let lm = LandmarkSet::from_indices(&ds, doc.indices)?;
    Ok((ds, lm))
}

fn cmd_persistence(a: PersistenceArgs) -> Result<()> {
    let (ds, lm) = load_landmarks(&a.dataset, &a.landmarks_file)?;
    let dm = lm.distance_matrix(&ds)?;
    let threshold = rips_threshold(&dm);
    let complex = build_rips(&dm, 2, threshold)?;
    let result = persistent_cohomology(&complex, a.q)?;
    write_json(&a.out, &PersistenceDoc::from_result(&result, threshold))
}

fn cmd_lens_map(a: LensMapArgs) -> Result<()> {
    let (ds, lm) = load_landmarks(&a.dataset, &a.landmarks_file)?;
    let pers: PersistenceDoc = read_json(&a.persistence)?;
    if pers.diagrams.len() < 2 {
        return Err(CliError::config("persistence file has no degree-1 diagram"));
    }
    let dgm1 = pers.diagrams[1].clone().into_diagram();
    let (index, pair, admissible) = match select_class(&dgm1) {
        Ok((i, p)) => (i, p, true),
        Err(e) => match a.class_rule {
            ClassRule::Strict => return Err(e.into()),
            ClassRule::MostPersistent => {
                let (i, p) = most_persistent_class(&dgm1)?;
                (i, p, false)
            }
        },
    };
    let eta = pers
        .cocycles
        .get(index)
        .cloned()
        .ok_or_else(|| CliError::config("persistence file lacks the selected representative"))?
        .into_cocycle()?;
    let cfg = match a.epsilon {
        EpsilonRule::Auto => {
            if admissible {
                LensMapConfig::for_class(pers.q, &pair, a.delta)?
            } else {
                LensMapConfig::new(pers.q, pair.birth + a.delta)?.with_unverified_edges()
            }
        }
        EpsilonRule::Fixed(e) => {
            let cfg = LensMapConfig::new(pers.q, e)?;
            if admissible && cfg.check_class(&pair).is_ok() {
                cfg
            } else {
                cfg.with_unverified_edges()
            }
        }
    };
    // Unlike `pipeline`, this stage maps the whole dataset or fails: points
    // outside every landmark ball produce a coverage failure (exit 3).
    let cloud = lens_coordinates(&ds, &lm, &eta, &cfg)?;
    let source_index: Vec<usize> = (0..cloud.len()).collect();
    write_json(&a.out, &LensCloudDoc::from_cloud(&cloud, source_index))
}

fn cmd_lpca(a: LpcaArgs) -> Result<()> {
    let doc: LensCloudDoc = read_json(&a.cloud)?;
    let points = doc.lens_points()?;
    let rule = dim_rule(a.target_dim, a.tau, a.gamma)?;
    let mut result = lpca(&points, &[1, 2])?;
    let chosen = match rule {
        TargetDimRule::Fixed(k) => k,
        TargetDimRule::Threshold(t) => choose_dim(&result.pvar, DimRule::Threshold(t)),
        TargetDimRule::Gap(g) => choose_dim(&result.pvar, DimRule::Gap(g)),
    };
    if !result.coords.contains_key(&chosen) {
        result = lpca(&points, &[1, 2, chosen])?;
    }
    write_json(&a.out, &LpcaDoc::from_result(&result, doc.q, doc.source_index))
}

fn cmd_viz(a: VizArgs) -> Result<()> {
    let doc: LpcaDoc = read_json(&a.lpca)?;
    let points = doc.coords_at(2)?;
    if doc.source_index.len() != points.len() {
        return Err(CliError::config("reduction file has inconsistent source indices"));
    }
    let rows: Vec<VizRowDoc> = points
        .iter()
        .zip(&doc.source_index)
        .map(|(p, &src)| domain_point(p).map(|d| VizRowDoc::new(&d, src)))
        .collect::<lenscoords_core::error::Result<_>>()?;
    fs::create_dir_all(&a.out).map_err(|source| CliError::Io {
        path: a.out.display().to_string(),
        source,
    })?;
    write_bytes(&a.out.join("domain.csv"), viz_csv(&rows).as_bytes())?;
    write_json(&a.out.join("domain.json"), &rows)
}

fn cmd_isomap(a: IsomapArgs) -> Result<()> {
    let dataset_doc: DatasetDoc = read_json(&a.dataset)?;
    let metric_id = dataset_doc.metric_id.clone();
    let ds = dataset_doc.into_dataset()?;
    let reduction: LpcaDoc = read_json(&a.lpca)?;
    // The variance profile spans every dimension of the unreduced cloud.
    let cmp_dim = COMPARISON_DIM.min(reduction.pvar.len().max(1));
    let pk = reduction.coords_at(cmp_dim)?;
    if reduction.source_index.len() != pk.len() {
        return Err(CliError::config("reduction file has inconsistent source indices"));
    }

    // The same probe points go through both embeddings.
    let probe_rows = probe_subsample(pk.len(), a.sample, a.seed);
    let src_idx: Vec<usize> = probe_rows.iter().map(|&r| reduction.source_index[r]).collect();
    if src_idx.iter().any(|&i| i >= ds.len()) {
        return Err(CliError::config("reduction file indexes past the dataset"));
    }
    let src_dm = DistanceMatrix::from_dataset(&ds, &src_idx)?;
    let iso_cfg = IsomapConfig { k_neighbors: a.knn, target_dim: COMPARISON_DIM };
    let embedding = isomap(&src_dm, &iso_cfg)?;
    let iso_dm = DistanceMatrix::from_euclidean_rows(&embedding)?;

    let lens_pts: Vec<lenscoords_core::LensPoint> =
        probe_rows.iter().map(|&r| pk[r].clone()).collect();
    let lens_dm = DistanceMatrix::from_lens_points(&lens_pts)?;
    let rows = compare_per_ratio(&iso_dm, &lens_dm, &[2, a.q])?;
    let rows: Vec<PerRatioRowDoc> = rows.iter().map(PerRatioRowDoc::from_row).collect();

    fs::create_dir_all(&a.out).map_err(|source| CliError::Io {
        path: a.out.display().to_string(),
        source,
    })?;
    write_json(
        &a.out.join("isomap.json"),
        &EmbeddingDoc {
            k_neighbors: a.knn,
            target_dim: COMPARISON_DIM,
            source_index: src_idx,
            points: embedding,
        },
    )?;
    write_json(
        &a.out.join("per_ratio.json"),
        &PerRatioDoc {
            k_neighbors: a.knn,
            target_dim: COMPARISON_DIM,
            sample: probe_rows.len(),
            rows: rows.clone(),
        },
    )?;
    write_bytes(&a.out.join("per_ratio.txt"), per_ratio_text(&metric_id, &rows).as_bytes())
}

fn cmd_pipeline(a: PipelineArgs) -> Result<()> {
    let cfg = PipelineConfig {
        space: a.space,
        n_points: a.points,
        n_landmarks: a.landmarks,
        q: a.q,
        seed: a.seed,
        sigma: a.sigma,
        epsilon: a.epsilon,
        delta: a.delta,
        dim_rule: dim_rule(a.target_dim, a.tau, a.gamma)?,
        class_rule: a.class_rule,
        knn: a.knn,
        out_dir: a.out,
    };
    let output = run_pipeline(&cfg)?;
    let s = &output.summary;
    println!(
        "space={} q={} covered={}/{} epsilon={:.6} class=({:.4}, {}) rule={} target_dim={}",
        s.space,
        s.q,
        s.coverage.covered,
        s.coverage.total,
        s.epsilon,
        s.selected_class.birth,
        s.selected_class.death.map_or("inf".to_string(), |d| format!("{d:.4}")),
        s.selected_class.rule,
        s.target_dim,
    );
    Ok(())
}
