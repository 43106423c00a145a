//! Small dense complex linear algebra, self-contained and deterministic.
//!
//! Conventions used throughout the crate:
//! * the Hermitian inner product `inner(x, y) = sum_k x_k * conj(y_k)` is
//!   linear in its first slot;
//! * eigenvalues come back in ascending order;
//! * every eigenvector is phase-normalized so that its largest-modulus entry
//!   is real and positive (first such entry on exact ties), which makes the
//!   decomposition reproducible bit for bit.
//!
//! Matrices here stay small (landmark counts, so at most a few hundred), so a
//! cyclic Jacobi iteration is plenty and avoids pulling a LAPACK binding into
//! a `no_std` crate.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub type C64 = num_complex::Complex64;

/// `sum_k x_k * conj(y_k)`; linear in `x`, conjugate-linear in `y`.
pub fn inner(x: &[C64], y: &[C64]) -> Result<C64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(x.iter().zip(y).map(|(a, b)| a * b.conj()).sum())
}

/// Real part of the Hermitian inner product.
pub fn real_inner(x: &[C64], y: &[C64]) -> Result<f64> {
    Ok(inner(x, y)?.re)
}

/// Euclidean norm of a complex vector.
pub fn norm(x: &[C64]) -> f64 {
    libm::sqrt(x.iter().map(|z| z.norm_sqr()).sum())
}

/// Component of `v` orthogonal to the unit vector `u`: `v - inner(v, u) * u`.
pub fn project_offspan(u: &[C64], v: &[C64]) -> Result<Vec<C64>> {
    let c = inner(v, u)?;
    Ok(v.iter().zip(u).map(|(a, b)| a - c * b).collect())
}

/// `adjoint_apply(cols, y)[j] = inner(y, cols[j])`, i.e. `V^* y` for the
/// matrix `V` whose columns are `cols`.
pub fn adjoint_apply(cols: &[Vec<C64>], y: &[C64]) -> Result<Vec<C64>> {
    cols.iter().map(|c| inner(y, c)).collect()
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let n = rows.len();
        let mut m = CMatrix::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NonSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            m.data[i * n..(i + 1) * n].copy_from_slice(row);
        }
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.n + j] = v;
    }

    /// `self += w * y * y^*` (rank-one Hermitian update).
    pub fn add_outer(&mut self, y: &[C64], w: f64) -> Result<()> {
        if y.len() != self.n {
            return Err(Error::LengthMismatch {
                left: y.len(),
                right: self.n,
            });
        }
        for i in 0..self.n {
            for j in 0..self.n {
                let v = y[i] * y[j].conj() * w;
                self.data[i * self.n + j] += v;
            }
        }
        Ok(())
    }

    pub fn mul_vec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.n {
            return Err(Error::LengthMismatch {
                left: v.len(),
                right: self.n,
            });
        }
        Ok((0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.get(i, j) * v[j])
                    .sum()
            })
            .collect())
    }

    fn frobenius(&self) -> f64 {
        libm::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }
}

/// Result of [`hermitian_eig`]: `values` ascending, `vectors[k]` the unit
/// eigenvector for `values[k]` under the fixed phase convention.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<C64>>,
}

const MAX_SWEEPS: usize = 60;

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations. The input is symmetrized as `(A + A^*)/2` first, so mild
/// asymmetry from accumulated roundoff is tolerated; residuals
/// `||A v - lambda v||` come out near machine precision.
pub fn hermitian_eig(a: &CMatrix) -> Result<HermitianEig> {
    let n = a.n;
    if n == 0 {
        return Err(Error::InvalidParameter("empty matrix"));
    }
    // Work copy, forced exactly Hermitian.
    let mut m = CMatrix::zeros(n);
    for i in 0..n {
        m.set(i, i, C64::new(a.get(i, i).re, 0.0));
        for j in (i + 1)..n {
            let v = (a.get(i, j) + a.get(j, i).conj()) * 0.5;
            m.set(i, j, v);
            m.set(j, i, v.conj());
        }
    }
    let mut v = CMatrix::zeros(n);
    for i in 0..n {
        v.set(i, i, C64::new(1.0, 0.0));
    }

    let scale = m.frobenius().max(1e-300);
    let tol = scale * 1e-14;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| m.get(p, q).norm())
            .sum();
        if off <= tol {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                let r = apq.norm();
                if r <= scale * 1e-280 {
                    continue;
                }
                let phase = apq / r;
                let theta = (m.get(q, q).re - m.get(p, p).re) / (2.0 * r);
                let t = if theta.abs() > 1e150 {
                    1.0 / (2.0 * theta)
                } else {
                    let sg = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sg / (theta.abs() + libm::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = phase * (t * c);
                // Diagonal and the annihilated pair.
                let h = t * r;
                m.set(p, p, C64::new(m.get(p, p).re - h, 0.0));
                m.set(q, q, C64::new(m.get(q, q).re + h, 0.0));
                m.set(p, q, C64::new(0.0, 0.0));
                m.set(q, p, C64::new(0.0, 0.0));
                // Remaining rows/columns.
                for j in 0..n {
                    if j == p || j == q {
                        continue;
                    }
                    let ajp = m.get(j, p);
                    let ajq = m.get(j, q);
                    let njp = ajp * c - ajq * s.conj();
                    let njq = ajp * s + ajq * c;
                    m.set(j, p, njp);
                    m.set(p, j, njp.conj());
                    m.set(j, q, njq);
                    m.set(q, j, njq.conj());
                }
                // Accumulate eigenvectors: V <- V * G.
                for j in 0..n {
                    let vjp = v.get(j, p);
                    let vjq = v.get(j, q);
                    v.set(j, p, vjp * c - vjq * s.conj());
                    v.set(j, q, vjp * s + vjq * c);
                }
            }
        }
    }
    if !converged {
        // One last check: the final sweep may have finished the job.
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| m.get(p, q).norm())
            .sum();
        if off > tol {
            return Err(Error::NoConvergence);
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m.get(i, i)
            .re
            .partial_cmp(&m.get(j, j).re)
            .expect("eigenvalues are finite")
            .then(i.cmp(&j))
    });
    let values: Vec<f64> = order.iter().map(|&i| m.get(i, i).re).collect();
    let vectors: Vec<Vec<C64>> = order
        .iter()
        .map(|&col| {
            let mut vec_col: Vec<C64> = (0..n).map(|row| v.get(row, col)).collect();
            fix_phase(&mut vec_col);
            vec_col
        })
        .collect();
    Ok(HermitianEig { values, vectors })
}

/// Rotate a vector by a global phase so its largest-modulus entry (first one
/// on exact ties) becomes real and positive.
pub fn fix_phase(v: &mut [C64]) {
    let mut best = 0usize;
    let mut best_norm = 0.0f64;
    for (k, z) in v.iter().enumerate() {
        let nz = z.norm_sqr();
        if nz > best_norm {
            best_norm = nz;
            best = k;
        }
    }
    if best_norm <= 0.0 {
        return;
    }
    let ph = v[best] / libm::sqrt(best_norm);
    for z in v.iter_mut() {
        *z *= ph.conj();
    }
    // Kill the leftover imaginary dust on the anchor entry.
    v[best] = C64::new(v[best].re, 0.0);
}

/// Orthonormal basis (`count` vectors) of the orthogonal complement of the
/// span of `span` in `C^n`, grown greedily from the standard basis by
/// modified Gram-Schmidt with one re-orthogonalization pass. `span` must be
/// orthonormal for the result to be one as well.
pub fn orthonormal_complement(span: &[Vec<C64>], n: usize, count: usize) -> Result<Vec<Vec<C64>>> {
    for s in span {
        if s.len() != n {
            return Err(Error::LengthMismatch {
                left: s.len(),
                right: n,
            });
        }
    }
    if span.len() + count > n {
        return Err(Error::InvalidParameter("complement larger than ambient"));
    }
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(count);
    for i in 0..n {
        if basis.len() == count {
            break;
        }
        let mut r = vec![C64::new(0.0, 0.0); n];
        r[i] = C64::new(1.0, 0.0);
        for _pass in 0..2 {
            for b in span.iter().chain(basis.iter()) {
                let c = inner(&r, b)?;
                for (rk, bk) in r.iter_mut().zip(b) {
                    *rk -= c * bk;
                }
            }
        }
        let nr = norm(&r);
        if nr > 1e-8 {
            for z in r.iter_mut() {
                *z /= nr;
            }
            basis.push(r);
        }
    }
    if basis.len() < count {
        return Err(Error::InvalidParameter(
            "standard basis exhausted before complement was complete",
        ));
    }
    Ok(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn inner_conventions() {
        // conj lands on the second argument
        let x = [c(1.0, 0.0), c(0.0, 0.0)];
        let y = [c(0.0, 1.0), c(0.0, 0.0)];
        assert_eq!(real_inner(&x, &y).unwrap(), 0.0);
        assert_eq!(inner(&x, &y).unwrap(), c(0.0, -1.0));
        assert!(real_inner(&x, &[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn real_inner_modulus_identity() {
        // |<x,y>|^2 = Re<x,y>^2 + Re<ix,y>^2
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let x: Vec<C64> = (0..5).map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
            let y: Vec<C64> = (0..5).map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
            let ix: Vec<C64> = x.iter().map(|z| z * c(0.0, 1.0)).collect();
            let lhs = inner(&x, &y).unwrap().norm_sqr();
            let a = real_inner(&x, &y).unwrap();
            let b = real_inner(&ix, &y).unwrap();
            assert!((lhs - (a * a + b * b)).abs() < 1e-12);
        }
    }

    #[test]
    fn project_offspan_examples() {
        let u = [c(1.0, 0.0), c(0.0, 0.0)];
        let v = [c(3.0, 0.0), c(0.0, 4.0)];
        let w = project_offspan(&u, &v).unwrap();
        assert_eq!(w, vec![c(0.0, 0.0), c(0.0, 4.0)]);
        // projecting u off itself gives zero
        let z = project_offspan(&u, &u).unwrap();
        assert!(norm(&z) < 1e-15);
    }

    #[test]
    fn project_offspan_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let mut u: Vec<C64> = (0..6).map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
            let nu = norm(&u);
            for z in u.iter_mut() {
                *z /= nu;
            }
            let v: Vec<C64> = (0..6).map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
            let w = project_offspan(&u, &v).unwrap();
            assert!(inner(&w, &u).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn eig_two_by_two() {
        // [[1, i], [-i, 1]] has eigenvalues 0 and 2 with eigenvectors
        // (1, i)/sqrt(2) and (1, -i)/sqrt(2) once phases are fixed.
        let a = CMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 1.0)],
            vec![c(0.0, -1.0), c(1.0, 0.0)],
        ])
        .unwrap();
        let eig = hermitian_eig(&a).unwrap();
        assert!((eig.values[0] - 0.0).abs() < 1e-12);
        assert!((eig.values[1] - 2.0).abs() < 1e-12);
        let s = 1.0 / 2f64.sqrt();
        for (got, want) in eig.vectors[0].iter().zip([c(s, 0.0), c(0.0, s)]) {
            assert!((got - want).norm() < 1e-12);
        }
        for (got, want) in eig.vectors[1].iter().zip([c(s, 0.0), c(0.0, -s)]) {
            assert!((got - want).norm() < 1e-12);
        }
    }

    #[test]
    fn eig_identity_is_standard_basis() {
        let mut a = CMatrix::zeros(3);
        for i in 0..3 {
            a.set(i, i, c(1.0, 0.0));
        }
        let eig = hermitian_eig(&a).unwrap();
        for i in 0..3 {
            assert_eq!(eig.values[i], 1.0);
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((eig.vectors[i][j] - c(want, 0.0)).norm() < 1e-14);
            }
        }
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        let mut a = CMatrix::zeros(n);
        for i in 0..n {
            a.set(i, i, c(rng.gen::<f64>() - 0.5, 0.0));
            for j in (i + 1)..n {
                let z = c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                a.set(i, j, z);
                a.set(j, i, z.conj());
            }
        }
        a
    }

    #[test]
    fn eig_residuals_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for n in [1usize, 2, 3, 5, 8, 13, 21] {
            let a = random_hermitian(n, &mut rng);
            let eig = hermitian_eig(&a).unwrap();
            let fro = a.frobenius().max(1.0);
            for k in 0..n {
                let av = a.mul_vec(&eig.vectors[k]).unwrap();
                let resid: f64 = av
                    .iter()
                    .zip(&eig.vectors[k])
                    .map(|(l, r)| (l - r * eig.values[k]).norm_sqr())
                    .sum::<f64>()
                    .sqrt();
                assert!(resid < 1e-10 * fro, "residual {resid} at n={n}, k={k}");
                assert!((norm(&eig.vectors[k]) - 1.0).abs() < 1e-12);
                for l in (k + 1)..n {
                    assert!(inner(&eig.vectors[k], &eig.vectors[l]).unwrap().norm() < 1e-10);
                }
                if k > 0 {
                    assert!(eig.values[k] >= eig.values[k - 1]);
                }
            }
        }
    }

    #[test]
    fn eig_rejects_bad_shapes() {
        assert!(CMatrix::from_rows(&[vec![c(1.0, 0.0), c(0.0, 0.0)]]).is_err());
        assert!(hermitian_eig(&CMatrix::zeros(0)).is_err());
    }

    #[test]
    fn complement_of_span() {
        let e3 = vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let basis = orthonormal_complement(core::slice::from_ref(&e3), 3, 2).unwrap();
        assert_eq!(basis.len(), 2);
        for b in &basis {
            assert!(inner(b, &e3).unwrap().norm() < 1e-12);
            assert!((norm(b) - 1.0).abs() < 1e-12);
        }
        assert!(inner(&basis[0], &basis[1]).unwrap().norm() < 1e-12);
    }

    #[test]
    fn complement_of_random_span() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 7;
        // Build an orthonormal random span of size 3 via the eig of a random
        // Hermitian matrix (its eigenvectors are orthonormal).
        let eig = hermitian_eig(&random_hermitian(n, &mut rng)).unwrap();
        let span: Vec<Vec<C64>> = eig.vectors[0..3].to_vec();
        let basis = orthonormal_complement(&span, n, n - 3).unwrap();
        assert_eq!(basis.len(), n - 3);
        for b in &basis {
            for s in &span {
                assert!(inner(b, s).unwrap().norm() < 1e-10);
            }
        }
        for i in 0..basis.len() {
            for j in (i + 1)..basis.len() {
                assert!(inner(&basis[i], &basis[j]).unwrap().norm() < 1e-10);
            }
            assert!((norm(&basis[i]) - 1.0).abs() < 1e-12);
        }
    }
}
