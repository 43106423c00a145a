//! On-disk JSON documents exchanged between subcommands.
//!
//! Every subcommand communicates through these shapes, so a pipeline can be
//! replayed stage by stage from files. Serialization is deterministic:
//! struct fields keep declaration order, maps are sorted, and floats use the
//! shortest round-trip decimal form. Infinite values (essential classes,
//! unbounded dominance ratios) are stored as `null`.

use crate::error::{CliError, Result};
use lenscoords_core::isomap::PerRatioRow;
use lenscoords_core::lens_map::LensCloud;
use lenscoords_core::lens_space::LensPoint;
use lenscoords_core::lpca::LpcaResult;
use lenscoords_core::persistence::{Cocycle, PersistenceDiagram, PersistencePair, PersistenceResult};
use lenscoords_core::spaces::{Metric, MetricDataset};
use lenscoords_core::viz::DomainPoint;
use lenscoords_core::C64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::Path;

/// How the reported variance table relates to the raw profile. Stored next
/// to every emitted profile so the table can be read without guessing.
pub const PVAR_CONVENTION: &str = "pvar[i] is the cumulative variance share \
through lens dimension i+2; the raw profile additionally starts with the \
structural zero at dimension 1 and the share at dimension 2, which the \
reported table omits";

// ---------------------------------------------------------------------------
// dataset

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetDoc {
    pub metric_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u32>,
    pub seed: u64,
    pub points: Vec<Vec<f64>>,
}

impl DatasetDoc {
    pub fn from_dataset(ds: &MetricDataset) -> Self {
        let q = match ds.metric() {
            Metric::Lens { q } => Some(q),
            _ => None,
        };
        DatasetDoc {
            metric_id: ds.metric().id().to_string(),
            q,
            seed: ds.seed(),
            points: ds.points().to_vec(),
        }
    }

    pub fn into_dataset(self) -> Result<MetricDataset> {
        let metric = match self.metric_id.as_str() {
            "euclidean" => Metric::Euclidean,
            "moore" => Metric::Moore,
            "lens" => Metric::Lens {
                q: self
                    .q
                    .ok_or_else(|| CliError::config("lens dataset is missing its modulus q"))?,
            },
            other => {
                return Err(CliError::config(format!("unknown metric_id {other:?}")));
            }
        };
        Ok(MetricDataset::new(metric, self.points, self.seed)?)
    }
}

// ---------------------------------------------------------------------------
// landmarks

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LandmarksDoc {
    pub indices: Vec<usize>,
    pub cover_radius: f64,
}

// ---------------------------------------------------------------------------
// persistence

/// One diagram: dimension plus `(birth, death)` pairs, `null` death meaning
/// the class never dies inside the filtration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DiagramDoc {
    pub dim: usize,
    pub pairs: Vec<(f64, Option<f64>)>,
}

impl DiagramDoc {
    pub fn from_diagram(d: &PersistenceDiagram) -> Self {
        DiagramDoc {
            dim: d.dim,
            pairs: d
                .pairs
                .iter()
                .map(|p| (p.birth, p.death.is_finite().then_some(p.death)))
                .collect(),
        }
    }

    pub fn into_diagram(self) -> PersistenceDiagram {
        PersistenceDiagram {
            dim: self.dim,
            pairs: self
                .pairs
                .into_iter()
                .map(|(birth, death)| PersistencePair {
                    birth,
                    death: death.unwrap_or(f64::INFINITY),
                })
                .collect(),
        }
    }
}

/// Degree-1 representative: its coefficient field, the explicit edge values
/// `(j, k, value)` with `j < k`, and the scale below which it is a cocycle
/// (`null` meaning every scale).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CocycleDoc {
    pub q: u32,
    pub edges: Vec<(u32, u32, u32)>,
    pub valid_below: Option<f64>,
}

impl CocycleDoc {
    pub fn from_cocycle(c: &Cocycle) -> Self {
        CocycleDoc {
            q: c.q(),
            edges: c.entries().map(|(&(j, k), &v)| (j, k, v)).collect(),
            valid_below: c.valid_below().is_finite().then(|| c.valid_below()),
        }
    }

    pub fn into_cocycle(self) -> Result<Cocycle> {
        Ok(Cocycle::from_edges(
            self.q,
            &self.edges,
            self.valid_below.unwrap_or(f64::INFINITY),
        )?)
    }
}

/// Output of one reduction run: diagrams for dimensions 0 and 1 plus one
/// representative per degree-1 pair, aligned index-for-index with
/// `diagrams[1].pairs`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PersistenceDoc {
    pub q: u32,
    pub threshold: f64,
    pub diagrams: Vec<DiagramDoc>,
    pub cocycles: Vec<CocycleDoc>,
}

impl PersistenceDoc {
    pub fn from_result(r: &PersistenceResult, threshold: f64) -> Self {
        PersistenceDoc {
            q: r.q,
            threshold,
            diagrams: r.diagrams.iter().map(DiagramDoc::from_diagram).collect(),
            cocycles: r.cocycles.iter().map(CocycleDoc::from_cocycle).collect(),
        }
    }
}

// ---------------------------------------------------------------------------
// lens cloud

fn complex_pairs(rep: &[C64]) -> Vec<[f64; 2]> {
    rep.iter().map(|z| [z.re, z.im]).collect()
}

fn point_from_pairs(pairs: &[[f64; 2]], q: u32) -> Result<LensPoint> {
    let rep = pairs.iter().map(|&[re, im]| C64::new(re, im)).collect();
    Ok(LensPoint::new(rep, q)?)
}

/// Image of (part of) a dataset under the classifying map. `points[i]` lists
/// the `n` homogeneous coordinates of one lens point as `[re, im]` pairs;
/// `source_index[i]` is the dataset index it came from, since points outside
/// every landmark ball are not mapped.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LensCloudDoc {
    pub q: u32,
    pub n: usize,
    pub points: Vec<Vec<[f64; 2]>>,
    pub source_index: Vec<usize>,
}

impl LensCloudDoc {
    pub fn from_cloud(cloud: &LensCloud, source_index: Vec<usize>) -> Self {
        debug_assert_eq!(cloud.len(), source_index.len());
        LensCloudDoc {
            q: cloud.q(),
            n: cloud.n_landmarks(),
            points: cloud.points().iter().map(|p| complex_pairs(p.rep())).collect(),
            source_index,
        }
    }

    pub fn lens_points(&self) -> Result<Vec<LensPoint>> {
        if self.points.len() != self.source_index.len() {
            return Err(CliError::config(
                "lens cloud points and source_index lengths differ",
            ));
        }
        self.points
            .iter()
            .map(|pairs| {
                if pairs.len() != self.n {
                    return Err(CliError::config(
                        "lens cloud point does not match the declared dimension",
                    ));
                }
                point_from_pairs(pairs, self.q)
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// dimensionality reduction

/// Principal directions and distortion profile, plus the projected clouds
/// requested at specific dimensions (JSON object keys are the dimensions).
/// `var` and `pvar` are the raw profiles: entry `k-1` belongs to dimension
/// `k`, so `pvar[0] = 0` and the last entry is 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LpcaDoc {
    pub components: Vec<Vec<[f64; 2]>>,
    pub var: Vec<f64>,
    pub pvar: Vec<f64>,
    pub coords: BTreeMap<usize, Vec<Vec<[f64; 2]>>>,
    pub skipped: usize,
    pub q: u32,
    pub source_index: Vec<usize>,
    pub convention: String,
}

impl LpcaDoc {
    pub fn from_result(r: &LpcaResult, q: u32, source_index: Vec<usize>) -> Self {
        LpcaDoc {
            components: r.components.iter().map(|c| complex_pairs(c)).collect(),
            var: r.var.clone(),
            pvar: r.pvar.clone(),
            coords: r
                .coords
                .iter()
                .map(|(&k, pts)| (k, pts.iter().map(|p| complex_pairs(p.rep())).collect()))
                .collect(),
            skipped: r.skipped,
            q,
            source_index,
            convention: PVAR_CONVENTION.to_string(),
        }
    }

    /// The projected cloud at dimension `k`, if it was materialized.
    pub fn coords_at(&self, k: usize) -> Result<Vec<LensPoint>> {
        let pts = self.coords.get(&k).ok_or_else(|| {
            CliError::config(format!("no dimension-{k} coordinates in this file"))
        })?;
        pts.iter().map(|pairs| point_from_pairs(pairs, self.q)).collect()
    }
}

/// The profile entries a summary table lists: everything past the structural
/// first entries, i.e. `reported[i] = pvar(i + 2)` in 1-indexed profile terms.
pub fn reported_pvar(pvar: &[f64]) -> Vec<f64> {
    if pvar.len() < 2 {
        return Vec::new();
    }
    pvar[1..].to_vec()
}

// ---------------------------------------------------------------------------
// display-domain export

/// One row of the display-domain export; mirrors the CSV columns.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VizRowDoc {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub source_index: usize,
}

impl VizRowDoc {
    pub fn new(p: &DomainPoint, source_index: usize) -> Self {
        VizRowDoc { x: p.x, y: p.y, z: p.z, source_index }
    }
}

/// The CSV mirror of a list of display rows: header plus one line per row.
pub fn viz_csv(rows: &[VizRowDoc]) -> String {
    let mut out = String::from("x,y,z,source_index\n");
    for r in rows {
        out.push_str(&format!("{},{},{},{}\n", r.x, r.y, r.z, r.source_index));
    }
    out
}

// ---------------------------------------------------------------------------
// embedding comparison

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PerRatioRowDoc {
    pub q: u32,
    /// `null` when only one finite bar exists (unbounded dominance).
    pub isomap: Option<f64>,
    pub lens: Option<f64>,
}

impl PerRatioRowDoc {
    pub fn from_row(r: &PerRatioRow) -> Self {
        PerRatioRowDoc {
            q: r.q,
            isomap: r.isomap.is_finite().then_some(r.isomap),
            lens: r.lens.is_finite().then_some(r.lens),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerRatioDoc {
    pub k_neighbors: usize,
    pub target_dim: usize,
    /// Number of probe points the diagrams were computed on.
    pub sample: usize,
    pub rows: Vec<PerRatioRowDoc>,
}

fn ratio_cell(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.4}"),
        None => "inf".to_string(),
    }
}

/// Aligned-text rendering of the dominance-ratio comparison: one column per
/// coefficient field, one row per embedding.
pub fn per_ratio_text(label: &str, rows: &[PerRatioRowDoc]) -> String {
    let mut out = String::new();
    out.push_str(&format!("per1/per2 on {label}\n"));
    out.push_str(&format!("{:<8}", ""));
    for r in rows {
        out.push_str(&format!("{:>10}", format!("Z{}", r.q)));
    }
    out.push('\n');
    out.push_str(&format!("{:<8}", "Isomap"));
    for r in rows {
        out.push_str(&format!("{:>10}", ratio_cell(r.isomap)));
    }
    out.push('\n');
    out.push_str(&format!("{:<8}", "LC"));
    for r in rows {
        out.push_str(&format!("{:>10}", ratio_cell(r.lens)));
    }
    out.push('\n');
    out
}

/// Standalone embedding output (the baseline itself, not the comparison).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingDoc {
    pub k_neighbors: usize,
    pub target_dim: usize,
    /// Dataset index of each embedded point, ascending.
    pub source_index: Vec<usize>,
    pub points: Vec<Vec<f64>>,
}

// ---------------------------------------------------------------------------
// pipeline summary

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectedClassDoc {
    pub index: usize,
    pub birth: f64,
    pub death: Option<f64>,
    /// Whether the class clears the `death > 2 * birth` bar on its own.
    pub admissible: bool,
    /// `"strict"` or `"most-persistent"` — the rule that picked it.
    pub rule: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoverageDoc {
    pub covered: usize,
    pub total: usize,
}

/// Machine-readable end-of-run report. Deterministic for a fixed config:
/// wall-clock timings deliberately live in a separate file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SummaryDoc {
    pub space: String,
    pub q: u32,
    pub n_points: usize,
    pub n_landmarks: usize,
    pub seed: u64,
    pub sigma: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub rips_threshold: f64,
    pub selected_class: SelectedClassDoc,
    pub coverage: CoverageDoc,
    pub max_partition_deviation: f64,
    pub target_dim: usize,
    pub pvar: Vec<f64>,
    pub pvar_convention: String,
    pub per_ratios: Vec<PerRatioRowDoc>,
}

/// Wall-clock stage timings in milliseconds, keyed by stage name.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TimingsDoc {
    pub stages: BTreeMap<String, f64>,
}

// ---------------------------------------------------------------------------
// file helpers

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut body = serde_json::to_vec_pretty(value).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })?;
    body.push(b'\n');
    write_bytes(path, &body)
}

pub fn write_bytes(path: &Path, body: &[u8]) -> Result<()> {
    let mut file = fs::File::create(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    file.write_all(body).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let body = fs::read(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_slice(&body).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_doc_round_trips() {
        let ds = lenscoords_core::spaces::sample_circle(10, 0.05, 7).unwrap();
        let doc = DatasetDoc::from_dataset(&ds);
        assert_eq!(doc.metric_id, "euclidean");
        assert_eq!(doc.q, None);
        let back = doc.into_dataset().unwrap();
        assert_eq!(back, ds);

        let lens = lenscoords_core::spaces::sample_lens(5, 3, 1).unwrap();
        let doc = DatasetDoc::from_dataset(&lens);
        assert_eq!(doc.q, Some(3));
        assert_eq!(doc.into_dataset().unwrap(), lens);
    }

    #[test]
    fn diagram_doc_encodes_essential_classes_as_null() {
        let dgm = PersistenceDiagram {
            dim: 1,
            pairs: vec![
                PersistencePair { birth: 0.5, death: f64::INFINITY },
                PersistencePair { birth: 0.25, death: 1.0 },
            ],
        };
        let doc = DiagramDoc::from_diagram(&dgm);
        assert_eq!(doc.pairs, vec![(0.5, None), (0.25, Some(1.0))]);
        let back = doc.into_diagram();
        assert_eq!(back.pairs[0].death, f64::INFINITY);
        assert_eq!(back.pairs[1].death, 1.0);
    }

    #[test]
    fn cocycle_doc_round_trips_including_scale() {
        let c = Cocycle::from_edges(3, &[(0, 1, 2), (1, 2, 1)], 0.75).unwrap();
        let doc = CocycleDoc::from_cocycle(&c);
        assert_eq!(doc.valid_below, Some(0.75));
        let back = doc.into_cocycle().unwrap();
        assert_eq!(back.value(0, 1), 2);
        assert_eq!(back.value(1, 0), 1); // inverse orientation
        assert_eq!(back.valid_below(), 0.75);

        let everywhere = Cocycle::from_edges(3, &[], f64::INFINITY).unwrap();
        let doc = CocycleDoc::from_cocycle(&everywhere);
        assert_eq!(doc.valid_below, None);
        assert_eq!(doc.into_cocycle().unwrap().valid_below(), f64::INFINITY);
    }

    #[test]
    fn reported_profile_drops_the_structural_entries() {
        assert_eq!(reported_pvar(&[0.0, 0.4, 0.8, 1.0]), vec![0.4, 0.8, 1.0]);
        assert!(reported_pvar(&[0.0]).is_empty());
    }

    #[test]
    fn viz_csv_is_header_plus_rows() {
        assert_eq!(viz_csv(&[]), "x,y,z,source_index\n");
        let rows = vec![VizRowDoc { x: 0.5, y: -0.25, z: 0.0, source_index: 3 }];
        assert_eq!(viz_csv(&rows), "x,y,z,source_index\n0.5,-0.25,0,3\n");
    }

    #[test]
    fn ratio_table_layout_matches_the_published_shape() {
        let rows = vec![
            PerRatioRowDoc { q: 2, isomap: Some(1.0105), lens: Some(1.7171) },
            PerRatioRowDoc { q: 3, isomap: Some(1.0105), lens: None },
        ];
        let text = per_ratio_text("moore", &rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[1].contains("Z2") && lines[1].contains("Z3"));
        assert!(lines[2].starts_with("Isomap") && lines[2].contains("1.0105"));
        assert!(lines[3].starts_with("LC") && lines[3].contains("inf"));
    }
}
