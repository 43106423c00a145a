//! Principal-component analysis inside a lens space.
//!
//! A cloud on the unit sphere of `C^n`, read modulo the scalar action of the
//! `q`-th roots of unity, is compressed by backward induction: the direction
//! `v_n` along which the cloud carries least variance is found as the bottom
//! eigenvector of the covariance matrix, every point is projected off it and
//! renormalized, and the step repeats inside the orthogonal complement until
//! a single direction `v_1` remains. The first `k` directions then give a
//! quotient-respecting projection `P_k` onto a `(2k-1)`-sphere mod the same
//! group, together with a profile measuring how much each stage distorts.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lens_space::LensPoint;
use crate::linalg::{
    adjoint_apply, fix_phase, hermitian_eig, inner, norm, orthonormal_complement,
    project_offspan, CMatrix, C64,
};

/// Norm below which a projected point is treated as lying in the removed
/// directions and cannot be renormalized.
pub const PROJECTION_TOL: f64 = 1e-12;

/// Project one lens point off the unit direction `u`.
///
/// Returns the renormalized image together with its distance to the original
/// class, `atan2(|<v,u>|, ||v - <v,u>u||)`. Among all classes orthogonal to
/// `u` the image is the closest one, so the distance is the geodesic error
/// committed by this reduction step at this point.
pub fn lens_project(u: &[C64], v: &LensPoint) -> Result<(LensPoint, f64)> {
    if u.len() != v.dim() {
        return Err(Error::LengthMismatch { left: u.len(), right: v.dim() });
    }
    if (norm(u) - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnit);
    }
    let c = inner(v.rep(), u)?;
    let w = project_offspan(u, v.rep())?;
    let h = norm(&w);
    if h < PROJECTION_TOL {
        return Err(Error::DegenerateProjection);
    }
    let point = LensPoint::from_unnormalized(w, v.q())?;
    Ok((point, libm::atan2(c.norm(), h)))
}

/// Bottom covariance eigenvector of a cloud of lens points.
///
/// The covariance `(1/N) sum y y*` ignores the phases of the representatives,
/// so the result is independent of which representative each class supplied.
pub fn last_lens_comp(points: &[LensPoint]) -> Result<Vec<C64>> {
    let first = points.first().ok_or(Error::EmptyCloud)?;
    let n = first.dim();
    let mut cov = CMatrix::zeros(n);
    let w = 1.0 / points.len() as f64;
    for p in points {
        if p.q() != first.q() {
            return Err(Error::ModulusMismatch { left: first.q(), right: p.q() });
        }
        cov.add_outer(p.rep(), w)?;
    }
    let eig = hermitian_eig(&cov)?;
    Ok(eig.vectors.into_iter().next().expect("n >= 1"))
}

/// Ordered orthonormal directions and distortion profile of a reduced cloud.
#[derive(Debug, Clone)]
pub struct LpcaResult {
    /// Directions `v_1 .. v_n`; `P_k` projects onto the span of the first `k`.
    pub components: Vec<Vec<C64>>,
    /// `var[k-1]` accumulates the mean squared stage distortions through
    /// dimension `k`; `var[0] = 0`.
    pub var: Vec<f64>,
    /// `var` normalized by its final entry; identically saturated at 1 when
    /// the cloud carries no variance at all.
    pub pvar: Vec<f64>,
    /// Requested projections: dimension `k` maps to `P_k` of every input
    /// point, in input order.
    pub coords: BTreeMap<usize, Vec<LensPoint>>,
    /// Points skipped from covariance or profile stages because their
    /// projection fell below [`PROJECTION_TOL`].
    pub skipped: usize,
}

/// Backward-induction principal components of a lens-space cloud.
///
/// `coord_dims` lists the dimensions `k` for which the projected cloud
/// `P_k(Y)` should be materialized (duplicates are merged).
pub fn lpca(points: &[LensPoint], coord_dims: &[usize]) -> Result<LpcaResult> {
    let first = points.first().ok_or(Error::EmptyCloud)?;
    let q = first.q();
    let n = first.dim();
    if n < 2 {
        return Err(Error::InvalidParameter("ambient dimension must be at least 2"));
    }
    for p in points {
        if p.dim() != n {
            return Err(Error::LengthMismatch { left: n, right: p.dim() });
        }
        if p.q() != q {
            return Err(Error::ModulusMismatch { left: q, right: p.q() });
        }
    }
    for &k in coord_dims {
        if k < 1 || k > n {
            return Err(Error::InvalidParameter("requested dimension out of range"));
        }
    }

    let mut skipped = 0usize;
    // Components accumulated from the back: [v_n, v_{n-1}, ..].
    let mut rev = Vec::with_capacity(n);
    let mut v_n = last_lens_comp(points)?;
    fix_phase(&mut v_n);
    rev.push(v_n);

    for k in (2..n).rev() {
        let basis = orthonormal_complement(&rev, n, k)?;
        let mut projected = Vec::with_capacity(points.len());
        for p in points {
            let w = adjoint_apply(&basis, p.rep())?;
            if norm(&w) < PROJECTION_TOL {
                skipped += 1;
                continue;
            }
            projected.push(LensPoint::from_unnormalized(w, q)?);
        }
        if projected.is_empty() {
            return Err(Error::EmptyCloud);
        }
        let small = last_lens_comp(&projected)?;
        // Lift the k-dimensional direction back to ambient coordinates.
        let mut v = alloc::vec![C64::new(0.0, 0.0); n];
        for (j, col) in basis.iter().enumerate() {
            for (vi, ci) in v.iter_mut().zip(col) {
                *vi += small[j] * ci;
            }
        }
        fix_phase(&mut v);
        rev.push(v);
    }

    let mut v_1 = orthonormal_complement(&rev, n, 1)?.pop().expect("one vector");
    fix_phase(&mut v_1);
    rev.push(v_1);
    rev.reverse();
    let components = rev;

    let profile = variance_profile(points, &components)?;
    skipped += profile.skipped;

    let mut coords = BTreeMap::new();
    for &k in coord_dims {
        if coords.contains_key(&k) {
            continue;
        }
        let cols = &components[..k];
        let mut stage = Vec::with_capacity(points.len());
        for p in points {
            let w = adjoint_apply(cols, p.rep())?;
            if norm(&w) < PROJECTION_TOL {
                return Err(Error::DegenerateProjection);
            }
            stage.push(LensPoint::from_unnormalized(w, q)?);
        }
        coords.insert(k, stage);
    }

    Ok(LpcaResult {
        components,
        var: profile.var,
        pvar: profile.pvar,
        coords,
        skipped,
    })
}

/// Distortion profile of a component sequence on a cloud.
#[derive(Debug, Clone)]
pub struct VarianceProfile {
    pub var: Vec<f64>,
    pub pvar: Vec<f64>,
    pub skipped: usize,
}

/// Accumulated mean squared variance angles of the projections `P_k`.
///
/// Stage `l` rewrites each point in the basis `v_1 .. v_l`, renormalizes,
/// and measures its angle to the sub-lens of classes with no `v_{l-1}`
/// component: `atan2(|w_{l-1}|, ||other coordinates||)`. That angle is large
/// exactly when the point carries weight along `v_{l-1}`, so the stage sum
/// is the variance attributed to component `l-1` as seen in the
/// `l`-dimensional reduction. Accumulated from stage 2 upward and averaged
/// over the cloud, `var[k-1]` is the variance carried by the leading `k-1`
/// components and the normalized profile satisfies
/// `pvar(1) = 0 <= ... <= pvar(n) = 1`.
pub fn variance_profile(points: &[LensPoint], components: &[Vec<C64>]) -> Result<VarianceProfile> {
    let first = points.first().ok_or(Error::EmptyCloud)?;
    let n = components.len();
    if n == 0 || first.dim() != n {
        return Err(Error::LengthMismatch { left: first.dim(), right: n });
    }
    let mut skipped = 0usize;
    let mut var = alloc::vec![0.0f64; n];
    for l in 2..=n {
        let cols = &components[..l];
        let mut sum = 0.0f64;
        let mut count = 0usize;
        for p in points {
            let mut w = adjoint_apply(cols, p.rep())?;
            if norm(&w) < PROJECTION_TOL {
                skipped += 1;
                continue;
            }
            // Angle along the second-to-last coordinate of C^l.
            let along = w[l - 2].norm();
            w[l - 2] = C64::new(0.0, 0.0);
            let rest = norm(&w);
            let loss = libm::atan2(along, rest);
            sum += loss * loss;
            count += 1;
        }
        let stage = if count > 0 { sum / count as f64 } else { 0.0 };
        var[l - 1] = var[l - 2] + stage;
    }
    let total = var[n - 1];
    let pvar = if total > 1e-24 {
        var.iter().map(|v| v / total).collect()
    } else {
        // Defensive: a cloud with no measurable variance at any stage
        // reports a saturated profile instead of dividing by zero.
        let mut p = alloc::vec![1.0f64; n];
        p[0] = 0.0;
        p
    };
    Ok(VarianceProfile { var, pvar, skipped })
}

/// Rule for picking a target dimension from a 1-indexed profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DimRule {
    /// Smallest `k` whose profile value reaches the threshold.
    Threshold(f64),
    /// Smallest `k` after which the profile gain drops below the gap.
    Gap(f64),
}

/// Apply a dimension-selection rule to a profile; falls back to the full
/// length when no index qualifies.
pub fn choose_dim(profile: &[f64], rule: DimRule) -> usize {
    let n = profile.len();
    match rule {
        DimRule::Threshold(tau) => {
            for (i, &p) in profile.iter().enumerate() {
                if p >= tau {
                    return i + 1;
                }
            }
            n
        }
        DimRule::Gap(gamma) => {
            for i in 0..n.saturating_sub(1) {
                if profile[i + 1] - profile[i] < gamma {
                    return i + 1;
                }
            }
            n
        }
    }
}
