//! Points of the lens space `L_q^n = S^(2n-1) / Z_q` and the quotient metric.
//!
//! A point is stored as a unit representative in `C^n`; two representatives
//! name the same point iff they differ by a power of `zeta = exp(2*pi*i/q)`.
//! The distance between classes is the smallest spherical distance between
//! orbits, which only needs a sweep over the `q` relative rotations:
//!
//! `d([x],[y]) = min_g acos( Re( zeta^{-g} * inner(x, y) ) )`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::{norm, C64};

/// How far from unit norm a representative may be before construction fails.
pub const UNIT_TOL: f64 = 1e-12;

/// A point of `L_q^n`, carried by an explicit unit representative. `q` rides
/// along so that mixing points from different lens spaces is a checked error
/// instead of silent nonsense.
#[derive(Debug, Clone, PartialEq)]
pub struct LensPoint {
    rep: Vec<C64>,
    q: u32,
}

impl LensPoint {
    /// Wrap a representative, requiring `|| rep || = 1` within [`UNIT_TOL`]
    /// and a prime `q >= 2`.
    pub fn new(rep: Vec<C64>, q: u32) -> Result<Self> {
        check_prime(q)?;
        if rep.is_empty() {
            return Err(Error::EmptyCloud);
        }
        if (norm(&rep) - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit);
        }
        Ok(LensPoint { rep, q })
    }

    /// Wrap after normalizing; rejects (near-)zero vectors.
    pub fn from_unnormalized(mut rep: Vec<C64>, q: u32) -> Result<Self> {
        check_prime(q)?;
        if rep.is_empty() {
            return Err(Error::EmptyCloud);
        }
        let n = norm(&rep);
        if n < 1e-12 {
            return Err(Error::NotUnit);
        }
        for z in rep.iter_mut() {
            *z /= n;
        }
        Ok(LensPoint { rep, q })
    }

    pub fn rep(&self) -> &[C64] {
        &self.rep
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// Complex dimension of the ambient `C^n`.
    pub fn dim(&self) -> usize {
        self.rep.len()
    }
}

pub(crate) fn check_prime(q: u32) -> Result<()> {
    if q < 2 {
        return Err(Error::NotPrime(q));
    }
    let mut d = 2u32;
    while d * d <= q {
        if q.is_multiple_of(d) {
            return Err(Error::NotPrime(q));
        }
        d += 1;
    }
    Ok(())
}

/// Quotient metric on `L_q^n`. Both points must share `q` and ambient
/// dimension. The result lies in `[0, pi]`.
///
/// Instead of `min_g acos(Re(zeta^{-g} * inner(x, y)))` verbatim, each
/// candidate angle is evaluated as `2 * atan2(||x - w*y||, ||x + w*y||)`
/// with `w = zeta^{-g}` — the same quantity, but accurate to absolute
/// machine precision near 0 and pi, where `acos` loses eight digits.
/// Class-equality tests at the 1e-9 scale depend on this.
pub fn lens_distance(a: &LensPoint, b: &LensPoint) -> Result<f64> {
    if a.q != b.q {
        return Err(Error::ModulusMismatch {
            left: a.q,
            right: b.q,
        });
    }
    if a.rep.len() != b.rep.len() {
        return Err(Error::LengthMismatch {
            left: a.rep.len(),
            right: b.rep.len(),
        });
    }
    let mut best = f64::INFINITY;
    for g in 0..a.q {
        let ang = -2.0 * PI * g as f64 / a.q as f64;
        let w = C64::new(libm::cos(ang), libm::sin(ang));
        let mut diff = 0.0;
        let mut sum = 0.0;
        for (x, y) in a.rep.iter().zip(&b.rep) {
            let wy = w * y;
            diff += (x - wy).norm_sqr();
            sum += (x + wy).norm_sqr();
        }
        let d = 2.0 * libm::atan2(libm::sqrt(diff), libm::sqrt(sum));
        if d < best {
            best = d;
        }
    }
    Ok(best)
}
