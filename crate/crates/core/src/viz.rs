//! Flattening of the order-3 lens space into a solid ball for 3-D figures.
//!
//! The space of classes `[z : w]`, `|z|^2 + |w|^2 = 1` under the diagonal
//! action of the cube roots of unity, is displayed inside `R^3`: rotate `z`
//! into the wedge `arg in [0, 2pi/3)` using the group element determined by
//! `arg(z)`, keep that complex number as the planar part, and unroll the
//! residual phase of `w` into a bounded height. Points of one orbit land on
//! the same output, so scatter plots of the map are honest pictures of the
//! quotient.

use crate::error::{Error, Result};
use crate::lens_space::LensPoint;
use crate::linalg::C64;

use core::f64::consts::PI;

/// A point of the solid display region: planar modulus at most 1, height
/// bounded by `pi/3 * sqrt(1 - x^2 - y^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

const WEDGE: f64 = 2.0 * PI / 3.0;

fn arg_two_pi(v: C64) -> f64 {
    let a = libm::atan2(v.im, v.re);
    if a < 0.0 {
        a + 2.0 * PI
    } else {
        a
    }
}

/// Map one unit pair `(z, w)` into the display ball.
///
/// `k = floor(arg(z) / (2pi/3))` picks the group element that rotates `z`
/// into the wedge; the height is `(arg(w) - pi/3) * sqrt(1 - |z|^2)` with
/// `arg(w)` reduced to `[0, 2pi/3)`. Joint rotation of `(z, w)` by a cube
/// root of unity leaves the output unchanged.
pub fn fundamental_domain_map(z: C64, w: C64) -> Result<DomainPoint> {
    let total = z.norm_sqr() + w.norm_sqr();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnit);
    }
    let k = (libm::floor(arg_two_pi(z) / WEDGE) as i64).rem_euclid(3);
    let ang = -WEDGE * k as f64;
    let planar = z * C64::new(libm::cos(ang), libm::sin(ang));

    let aw = arg_two_pi(w);
    let reduced = aw - WEDGE * libm::floor(aw / WEDGE);
    let scale = libm::sqrt(libm::fmax(0.0, 1.0 - z.norm_sqr()));
    let height = if scale > 0.0 { (reduced - PI / 3.0) * scale } else { 0.0 };

    Ok(DomainPoint { x: planar.re, y: planar.im, z: height })
}

/// [`fundamental_domain_map`] applied to a lens point, which must live in
/// the two-dimensional order-3 quotient.
pub fn domain_point(p: &LensPoint) -> Result<DomainPoint> {
    if p.q() != 3 {
        return Err(Error::InvalidParameter("display map is defined for modulus 3"));
    }
    if p.dim() != 2 {
        return Err(Error::InvalidParameter("display map needs exactly two coordinates"));
    }
    fundamental_domain_map(p.rep()[0], p.rep()[1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_pair(rng: &mut ChaCha8Rng) -> (C64, C64) {
        loop {
            let z = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            let w = C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            let n = libm::sqrt(z.norm_sqr() + w.norm_sqr());
            if n > 1e-3 {
                return (z / n, w / n);
            }
        }
    }

    fn polar(r: f64, a: f64) -> C64 {
        C64::new(r * libm::cos(a), r * libm::sin(a))
    }

    #[test]
    fn wedge_phase_of_w_gives_zero_height() {
        let z = polar(0.3, 0.1);
        let r = libm::sqrt(1.0 - 0.09);
        let w = polar(r, PI / 3.0);
        let p = fundamental_domain_map(z, w).unwrap();
        assert!((p.x - z.re).abs() < 1e-15);
        assert!((p.y - z.im).abs() < 1e-15);
        assert!(p.z.abs() < 1e-12);
    }

    #[test]
    fn full_planar_modulus_pins_height_to_zero() {
        let z = polar(1.0, 2.0);
        let p = fundamental_domain_map(z, C64::new(0.0, 0.0)).unwrap();
        assert_eq!(p.z, 0.0);
        assert!((p.x - libm::cos(2.0)).abs() < 1e-15);
        assert!((p.y - libm::sin(2.0)).abs() < 1e-15);
    }

    #[test]
    fn out_of_wedge_argument_is_rotated_back() {
        let a = WEDGE + 0.2;
        let z = polar(0.5, a);
        let r = libm::sqrt(1.0 - 0.25);
        let p = fundamental_domain_map(z, polar(r, 0.7)).unwrap();
        let back = polar(0.5, 0.2);
        assert!((p.x - back.re).abs() < 1e-12);
        assert!((p.y - back.im).abs() < 1e-12);
    }

    #[test]
    fn orbit_members_land_on_the_same_point() {
        let zeta = polar(1.0, WEDGE);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..300 {
            let (z, w) = unit_pair(&mut rng);
            let base = fundamental_domain_map(z, w).unwrap();
            let mut g = C64::new(1.0, 0.0);
            for _ in 0..2 {
                g *= zeta;
                let p = fundamental_domain_map(z * g, w * g).unwrap();
                assert!((p.x - base.x).abs() < 1e-9);
                assert!((p.y - base.y).abs() < 1e-9);
                assert!((p.z - base.z).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn image_stays_inside_the_solid_region() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..500 {
            let (z, w) = unit_pair(&mut rng);
            let p = fundamental_domain_map(z, w).unwrap();
            let planar = libm::sqrt(p.x * p.x + p.y * p.y);
            assert!(planar <= 1.0 + 1e-12);
            let bound = PI / 3.0 * libm::sqrt(libm::fmax(0.0, 1.0 - z.norm_sqr()));
            assert!(p.z.abs() <= bound + 1e-12);
            let ang = libm::atan2(p.y, p.x);
            assert!(planar < 1e-12 || (-1e-9..WEDGE + 1e-9).contains(&ang));
        }
    }

    #[test]
    fn input_validation() {
        assert!(matches!(
            fundamental_domain_map(C64::new(1.0, 0.0), C64::new(1.0, 0.0)),
            Err(Error::NotUnit)
        ));
        let p5 = LensPoint::new(
            Vec::from([C64::new(1.0, 0.0), C64::new(0.0, 0.0)]),
            5,
        )
        .unwrap();
        assert!(domain_point(&p5).is_err());
        let p3 = LensPoint::new(
            Vec::from([C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]),
            3,
        )
        .unwrap();
        assert!(domain_point(&p3).is_err());
        let ok = LensPoint::new(
            Vec::from([C64::new(0.6, 0.0), C64::new(0.0, 0.8)]),
            3,
        )
        .unwrap();
        domain_point(&ok).unwrap();
    }
}
