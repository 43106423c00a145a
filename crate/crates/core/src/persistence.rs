//! Persistent cohomology of a filtered complex over a prime field `Z/q`,
//! with representative degree-1 cocycles.
//!
//! The reduction processes simplices in filtration order and maintains, per
//! dimension, a set of "live" cochains that are cocycles on everything seen
//! so far. A new simplex either births a cocycle (its boundary evaluates to
//! zero on all live cochains one dimension down) or kills the youngest live
//! cochain whose evaluation is nonzero, after using that cochain to cancel
//! the evaluation on all the others. This is the standard cohomological twin
//! of boundary-matrix reduction and produces the same barcode; running it on
//! the cochain side is what makes explicit representative cocycles cheap.
//!
//! Diagrams keep only pairs with `birth < death` (plus essential classes with
//! infinite death): zero-length bars carry no information at any scale and
//! would otherwise clutter multiset comparisons. Every reported degree-1
//! pair, finite or not, comes with its representative [`Cocycle`].

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lens_space::check_prime;
use crate::rips::FilteredComplex;

/// Arithmetic in `Z/q` for prime `q`, on canonical representatives `0..q`.
#[derive(Debug, Clone, Copy)]
pub struct PrimeField {
    q: u32,
}

impl PrimeField {
    pub fn new(q: u32) -> Result<Self> {
        check_prime(q)?;
        Ok(PrimeField { q })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        (a + b) % self.q
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        (a + self.q - b) % self.q
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.q as u64) as u32
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        (self.q - a) % self.q
    }

    /// Multiplicative inverse by Fermat's little theorem; `a` nonzero mod q.
    pub fn inv(&self, a: u32) -> u32 {
        debug_assert!(!a.is_multiple_of(self.q));
        let mut acc: u64 = 1;
        let mut base = (a % self.q) as u64;
        let mut e = self.q - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.q as u64;
            }
            base = base * base % self.q as u64;
            e >>= 1;
        }
        acc as u32
    }
}

/// One bar: `death` is `f64::INFINITY` for essential classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistencePair {
    pub birth: f64,
    pub death: f64,
}

impl PersistencePair {
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram {
    pub dim: usize,
    pub pairs: Vec<PersistencePair>,
}

/// A representative degree-1 cocycle: values in `Z/q` on ordered vertex pairs
/// `(j, k)` with `j < k`, antisymmetric by convention (`value(k, j) =
/// -value(j, k)`), zero on unstored pairs. The cocycle condition
/// `value(a,b) + value(b,c) = value(a,c)` holds on every triangle of the
/// source filtration with diameter strictly below `valid_below`.
#[derive(Debug, Clone, PartialEq)]
pub struct Cocycle {
    q: u32,
    edges: BTreeMap<(u32, u32), u32>,
    valid_below: f64,
}

impl Cocycle {
    /// Assemble from explicit `(j, k, value)` entries; `j > k` entries are
    /// folded in antisymmetrically, duplicates are rejected.
    pub fn from_edges(q: u32, entries: &[(u32, u32, u32)], valid_below: f64) -> Result<Self> {
        let field = PrimeField::new(q)?;
        let mut edges = BTreeMap::new();
        for &(j, k, v) in entries {
            if j == k {
                return Err(Error::InvalidParameter("cocycle edge with equal endpoints"));
            }
            let (key, val) = if j < k { ((j, k), v % q) } else { ((k, j), field.neg(v % q)) };
            if val == 0 {
                continue;
            }
            if edges.insert(key, val).is_some() {
                return Err(Error::InvalidParameter("duplicate cocycle edge"));
            }
        }
        Ok(Cocycle {
            q,
            edges,
            valid_below,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn valid_below(&self) -> f64 {
        self.valid_below
    }

    /// Stored entries `((j, k), value)` with `j < k` and nonzero value.
    pub fn entries(&self) -> impl Iterator<Item = (&(u32, u32), &u32)> {
        self.edges.iter()
    }

    /// Antisymmetric lookup; unstored pairs (and the diagonal) read as zero.
    pub fn value(&self, j: usize, k: usize) -> u32 {
        if j == k {
            return 0;
        }
        let (a, b) = (j.min(k) as u32, j.max(k) as u32);
        let v = self.edges.get(&(a, b)).copied().unwrap_or(0);
        if j < k {
            v
        } else {
            (self.q - v) % self.q
        }
    }

    /// The cohomologous cocycle `self + d(alpha)` for a 0-cochain `alpha`
    /// (one value per vertex): `(d alpha)(j, k) = alpha_k - alpha_j`. Values
    /// are materialized on every vertex pair where the result is nonzero, so
    /// lookups on any edge of the original complex stay correct.
    pub fn add_coboundary(&self, alpha: &[u32]) -> Result<Self> {
        let field = PrimeField::new(self.q)?;
        let n = alpha.len() as u32;
        for &(j, k) in self.edges.keys() {
            if j >= n || k >= n {
                return Err(Error::InvalidParameter("alpha shorter than vertex range"));
            }
        }
        let mut edges = BTreeMap::new();
        for j in 0..n {
            for k in (j + 1)..n {
                let base = self.edges.get(&(j, k)).copied().unwrap_or(0);
                let v = field.add(base, field.sub(alpha[k as usize] % self.q, alpha[j as usize] % self.q));
                if v != 0 {
                    edges.insert((j, k), v);
                }
            }
        }
        Ok(Cocycle {
            q: self.q,
            edges,
            valid_below: self.valid_below,
        })
    }
}

/// Diagrams for dimensions `0..max_dim` of the input complex, plus a
/// representative cocycle per degree-1 pair, aligned index-for-index with
/// `diagrams[1].pairs` (empty when the complex has `max_dim < 2`).
#[derive(Debug, Clone)]
pub struct PersistenceResult {
    pub q: u32,
    pub diagrams: Vec<PersistenceDiagram>,
    pub cocycles: Vec<Cocycle>,
}

struct LiveCochain {
    birth_order: u32,
    birth_diam: f64,
    /// Sorted `(simplex index within its dimension, coefficient)`.
    support: Vec<(u32, u32)>,
}

/// `target += factor * other` over `Z/q`, both supports sorted.
fn axpy(target: &mut Vec<(u32, u32)>, other: &[(u32, u32)], factor: u32, field: &PrimeField) {
    if factor == 0 {
        return;
    }
    let mut merged = Vec::with_capacity(target.len() + other.len());
    let (mut a, mut b) = (0usize, 0usize);
    while a < target.len() || b < other.len() {
        let take_a = b == other.len()
            || (a < target.len() && target[a].0 <= other[b].0);
        if take_a && b < other.len() && a < target.len() && target[a].0 == other[b].0 {
            let v = field.add(target[a].1, field.mul(factor, other[b].1));
            if v != 0 {
                merged.push((target[a].0, v));
            }
            a += 1;
            b += 1;
        } else if take_a {
            merged.push(target[a]);
            a += 1;
        } else {
            let v = field.mul(factor, other[b].1);
            if v != 0 {
                merged.push((other[b].0, v));
            }
            b += 1;
        }
    }
    *target = merged;
}

fn support_value(support: &[(u32, u32)], idx: u32) -> u32 {
    match support.binary_search_by_key(&idx, |e| e.0) {
        Ok(pos) => support[pos].1,
        Err(_) => 0,
    }
}

/// Run the reduction. The complex must be in filtration order with all faces
/// present (as produced by [`crate::rips::build_rips`]); this is re-checked
/// here and `InvalidComplex` is returned otherwise.
pub fn persistent_cohomology(complex: &FilteredComplex, q: u32) -> Result<PersistenceResult> {
    let field = PrimeField::new(q)?;
    let max_dim = complex.max_dim;

    // Per-dimension registries: index of each simplex within its dimension.
    let mut index_of: Vec<BTreeMap<Vec<u32>, u32>> = (0..=max_dim).map(|_| BTreeMap::new()).collect();
    let mut edge_verts: Vec<(u32, u32)> = Vec::new();

    // Live cocycles per dimension 0..max_dim (cochains of dimension max_dim
    // could never die and are not reported, so they are never created).
    let mut live: Vec<Vec<LiveCochain>> = (0..max_dim).map(|_| Vec::new()).collect();

    let mut diagrams: Vec<PersistenceDiagram> = (0..max_dim)
        .map(|dim| PersistenceDiagram { dim, pairs: Vec::new() })
        .collect();
    let mut cocycles: Vec<Cocycle> = Vec::new();

    let snapshot = |lc: &LiveCochain, valid_below: f64, edge_verts: &[(u32, u32)]| -> Cocycle {
        let mut edges = BTreeMap::new();
        for &(edge_idx, coeff) in &lc.support {
            let (a, b) = edge_verts[edge_idx as usize];
            edges.insert((a, b), coeff);
        }
        Cocycle {
            q,
            edges,
            valid_below,
        }
    };

    let mut prev_key: Option<(f64, usize, Vec<u32>)> = None;
    let mut facet_buf: Vec<(u32, bool)> = Vec::new();

    for (order, s) in complex.simplices.iter().enumerate() {
        let dim = s.dim();
        if dim > max_dim {
            return Err(Error::InvalidComplex("simplex above max_dim"));
        }
        for w in s.vertices.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidComplex("vertices not strictly ascending"));
            }
        }
        if *s.vertices.last().unwrap() as usize >= complex.n_vertices {
            return Err(Error::InvalidComplex("vertex id out of range"));
        }
        let key = (s.diameter, dim, s.vertices.clone());
        if let Some(pk) = &prev_key {
            if (pk.0, pk.1, &pk.2) > (key.0, key.1, &key.2) {
                return Err(Error::InvalidComplex("not sorted in filtration order"));
            }
        }
        prev_key = Some(key);

        if dim == 0 {
            let idx = index_of[0].len() as u32;
            index_of[0].insert(s.vertices.clone(), idx);
            live[0].push(LiveCochain {
                birth_order: order as u32,
                birth_diam: s.diameter,
                support: alloc::vec![(idx, 1)],
            });
            continue;
        }

        // Signed facet indices: boundary of [v0..vd] is sum_i (-1)^i of the
        // tuple with v_i dropped.
        facet_buf.clear();
        for drop in 0..s.vertices.len() {
            let mut facet: Vec<u32> = Vec::with_capacity(dim);
            facet.extend(s.vertices.iter().enumerate().filter(|(p, _)| *p != drop).map(|(_, v)| *v));
            let Some(&fi) = index_of[dim - 1].get(&facet) else {
                return Err(Error::InvalidComplex("missing facet"));
            };
            facet_buf.push((fi, drop % 2 == 1));
        }

        // Evaluate every live cochain one dimension down on this boundary.
        let mut hits: Vec<(usize, u32)> = Vec::new();
        for (li, lc) in live[dim - 1].iter().enumerate() {
            let mut c = 0u32;
            for &(fi, negative) in &facet_buf {
                let v = support_value(&lc.support, fi);
                c = if negative { field.sub(c, v) } else { field.add(c, v) };
            }
            if c != 0 {
                hits.push((li, c));
            }
        }

        if hits.is_empty() {
            if dim < max_dim {
                let idx = index_of[dim].len() as u32;
                index_of[dim].insert(s.vertices.clone(), idx);
                if dim == 1 {
                    edge_verts.push((s.vertices[0], s.vertices[1]));
                }
                live[dim].push(LiveCochain {
                    birth_order: order as u32,
                    birth_diam: s.diameter,
                    support: alloc::vec![(idx, 1)],
                });
            }
            continue;
        }

        // The youngest nonzero evaluation dies; cancel it from the rest.
        let (&(victim_pos, victim_c), _) = hits
            .iter()
            .map(|h| (h, live[dim - 1][h.0].birth_order))
            .max_by_key(|&(_, b)| b)
            .expect("nonempty");
        let inv_c = field.inv(victim_c);
        let victim_support = core::mem::take(&mut live[dim - 1][victim_pos].support);
        for &(li, c) in &hits {
            if li == victim_pos {
                continue;
            }
            // alpha_i -= (c_i / c_victim) * alpha_victim
            let factor = field.neg(field.mul(c, inv_c));
            axpy(&mut live[dim - 1][li].support, &victim_support, factor, &field);
        }
        let victim = &live[dim - 1][victim_pos];
        let (birth, death) = (victim.birth_diam, s.diameter);
        if death > birth {
            diagrams[dim - 1].pairs.push(PersistencePair { birth, death });
            if dim - 1 == 1 {
                let lc = LiveCochain {
                    birth_order: victim.birth_order,
                    birth_diam: birth,
                    support: victim_support,
                };
                cocycles.push(snapshot(&lc, death, &edge_verts));
            }
        }
        live[dim - 1].swap_remove(victim_pos);

        if dim < max_dim {
            let idx = index_of[dim].len() as u32;
            index_of[dim].insert(s.vertices.clone(), idx);
            if dim == 1 {
                edge_verts.push((s.vertices[0], s.vertices[1]));
            }
        }
    }

    // Whatever is still alive is essential.
    for dim in 0..max_dim {
        let mut essentials: Vec<&LiveCochain> = live[dim].iter().collect();
        essentials.sort_by(|a, b| {
            a.birth_diam
                .total_cmp(&b.birth_diam)
                .then(a.birth_order.cmp(&b.birth_order))
        });
        for lc in essentials {
            diagrams[dim].pairs.push(PersistencePair {
                birth: lc.birth_diam,
                death: f64::INFINITY,
            });
            if dim == 1 {
                cocycles.push(snapshot(lc, complex.max_diameter, &edge_verts));
            }
        }
    }

    Ok(PersistenceResult {
        q,
        diagrams,
        cocycles,
    })
}

/// Count cocycle-condition violations over all triangles of `complex` with
/// diameter strictly below the cocycle's validity scale.
pub fn verify_cocycle(complex: &FilteredComplex, cocycle: &Cocycle) -> usize {
    let q = cocycle.q;
    let mut violations = 0;
    for s in &complex.simplices {
        if s.dim() != 2 || s.diameter >= cocycle.valid_below {
            continue;
        }
        let (a, b, c) = (
            s.vertices[0] as usize,
            s.vertices[1] as usize,
            s.vertices[2] as usize,
        );
        let lhs = (cocycle.value(a, b) + cocycle.value(b, c)) % q;
        if lhs != cocycle.value(a, c) {
            violations += 1;
        }
    }
    violations
}

/// Pick the class to build coordinates from: maximal persistence among pairs
/// with `death > 2 * birth` (essential classes count as infinitely
/// persistent). Returns the index into `dgm.pairs` and the pair itself.
pub fn select_class(dgm: &PersistenceDiagram) -> Result<(usize, PersistencePair)> {
    let mut best: Option<(usize, PersistencePair)> = None;
    for (i, p) in dgm.pairs.iter().enumerate() {
        if p.death > 2.0 * p.birth {
            let better = match &best {
                None => true,
                Some((_, bp)) => p.persistence() > bp.persistence(),
            };
            if better {
                best = Some((i, *p));
            }
        }
    }
    best.ok_or(Error::NoAdmissibleClass)
}

/// The finite pair of largest persistence, regardless of whether its death
/// exceeds twice its birth. Fallback selection for datasets whose dominant
/// class never clears that bar (coarse landmark sets on higher-dimensional
/// spaces); the classifying map built from it loses its chart-independence
/// guarantee but remains usable as a heuristic.
pub fn most_persistent_class(dgm: &PersistenceDiagram) -> Result<(usize, PersistencePair)> {
    dgm.pairs
        .iter()
        .enumerate()
        .filter(|(_, p)| p.death.is_finite())
        .max_by(|(_, a), (_, b)| a.persistence().total_cmp(&b.persistence()))
        .map(|(i, p)| (i, *p))
        .ok_or(Error::EmptyDiagram)
}

/// Ratio of the largest to the second-largest persistence among finite
/// pairs; `+inf` when only one finite pair exists, an error when none does.
pub fn per_ratio(dgm: &PersistenceDiagram) -> Result<f64> {
    let mut pers: Vec<f64> = dgm
        .pairs
        .iter()
        .filter(|p| p.death.is_finite())
        .map(|p| p.persistence())
        .collect();
    if pers.is_empty() {
        return Err(Error::EmptyDiagram);
    }
    pers.sort_by(|a, b| b.total_cmp(a));
    if pers.len() == 1 {
        return Ok(f64::INFINITY);
    }
    Ok(pers[0] / pers[1])
}
