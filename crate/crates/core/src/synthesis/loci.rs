use std::f64::consts::TAU;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::bloch::BlochPoint;
use crate::params::NormalizedParams;

/// A great circle supporting singular arcs, with the singular control
/// realized on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularLocus {
    pub label: String,
    pub u1: f64,
    pub u2: f64,
    pub normal: [f64; 3],
    pub points: Vec<BlochPoint>,
}

fn great_circle(normal: Vector3<f64>, n: usize) -> Vec<BlochPoint> {
    let nz = normal.normalize();
    // any vector not parallel to the normal seeds the basis
    let seed = if nz[0].abs() < 0.9 { Vector3::x() } else { Vector3::y() };
    let e1 = (seed - nz * nz.dot(&seed)).normalize();
    let e2 = nz.cross(&e1);
    (0..n)
        .map(|i| {
            let (s, c) = (TAU * i as f64 / n as f64).sin_cos();
            BlochPoint::from_vec_unchecked(&(c * e1 + s * e2))
        })
        .collect()
}

/// C0 (equator, u ≡ 0), C1± (±tanα cosβ·x2 = x3, u1 ≡ 0, u2 ≡ ±1) and
/// C2± (±tanα sinβ·x1 = −x3, u1 ≡ ±1, u2 ≡ 0).
pub fn singular_loci(p: &NormalizedParams, n_samples: usize) -> Vec<SingularLocus> {
    let ta = p.alpha.tan();
    let (sb, cb) = p.beta.sin_cos();
    let mk = |label: &str, u1: f64, u2: f64, n: Vector3<f64>| SingularLocus {
        label: label.to_string(),
        u1,
        u2,
        normal: [n[0], n[1], n[2]],
        points: great_circle(n, n_samples),
    };
    vec![
        mk("C0", 0.0, 0.0, Vector3::z()),
        mk("C1+", 0.0, 1.0, Vector3::new(0.0, ta * cb, -1.0)),
        mk("C1-", 0.0, -1.0, Vector3::new(0.0, -ta * cb, -1.0)),
        mk("C2+", 1.0, 0.0, Vector3::new(ta * sb, 0.0, 1.0)),
        mk("C2-", -1.0, 0.0, Vector3::new(-ta * sb, 0.0, 1.0)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::Control;
    use crate::dynamics::axis;

    #[test]
    fn equator_and_planes() {
        let p = NormalizedParams::new(std::f64::consts::PI / 5.0, std::f64::consts::PI / 6.0).unwrap();
        let loci = singular_loci(&p, 64);
        assert_eq!(loci.len(), 5);
        for x in &loci[0].points {
            assert!(x.x3.abs() < 1e-15);
            assert!((x.norm() - 1.0).abs() < 1e-15);
        }
        // each circle is invariant under the flow of its singular control
        for l in &loci {
            let w = axis(Control { u1: l.u1, u2: l.u2 }, &p);
            let n = Vector3::from(l.normal).normalize();
            assert!(w.normalize().cross(&n).norm() < 1e-14, "{}", l.label);
            for x in &l.points {
                assert!(x.to_vec().dot(&n).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn collapse_for_small_alpha() {
        let p = NormalizedParams::new(1e-9, 0.5).unwrap();
        for l in singular_loci(&p, 16) {
            for x in &l.points {
                assert!(x.x3.abs() < 1e-8);
            }
        }
    }
}
