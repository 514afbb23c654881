use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 3]", from = "[f64; 3]")]
pub struct BlochPoint {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl From<BlochPoint> for [f64; 3] {
    fn from(p: BlochPoint) -> Self {
        [p.x1, p.x2, p.x3]
    }
}

impl From<[f64; 3]> for BlochPoint {
    fn from(a: [f64; 3]) -> Self {
        Self { x1: a[0], x2: a[1], x3: a[2] }
    }
}

impl BlochPoint {
    pub const N: BlochPoint = BlochPoint { x1: 0.0, x2: 0.0, x3: 1.0 };
    pub const S: BlochPoint = BlochPoint { x1: 0.0, x2: 0.0, x3: -1.0 };

    /// Checked constructor; rejects points further than 1e-12 from the sphere.
    pub fn new(x1: f64, x2: f64, x3: f64) -> Result<Self> {
        let r = (x1 * x1 + x2 * x2 + x3 * x3).sqrt();
        if (r - 1.0).abs() > 1e-12 || !r.is_finite() {
            return Err(Error::NotOnSphere(r));
        }
        Ok(Self { x1, x2, x3 })
    }

    /// Projects any nonzero vector onto the sphere.
    pub fn normalized(x1: f64, x2: f64, x3: f64) -> Result<Self> {
        let r = (x1 * x1 + x2 * x2 + x3 * x3).sqrt();
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::NotOnSphere(r));
        }
        Ok(Self { x1: x1 / r, x2: x2 / r, x3: x3 / r })
    }

    pub(crate) fn from_vec_unchecked(v: &Vector3<f64>) -> Self {
        let n = v.norm();
        Self { x1: v[0] / n, x2: v[1] / n, x3: v[2] / n }
    }

    pub fn to_vec(self) -> Vector3<f64> {
        Vector3::new(self.x1, self.x2, self.x3)
    }

    pub fn norm(&self) -> f64 {
        self.to_vec().norm()
    }

    /// Great-circle distance, robust near 0 and pi.
    pub fn angle_to(&self, other: &BlochPoint) -> f64 {
        let a = self.to_vec();
        let b = other.to_vec();
        a.cross(&b).norm().atan2(a.dot(&b))
    }

    /// Angular distance to the south pole.
    pub fn miss_angle(&self) -> f64 {
        self.x1.hypot(self.x2).atan2(-self.x3)
    }

    pub fn dist(&self, other: &BlochPoint) -> f64 {
        (self.to_vec() - other.to_vec()).norm()
    }
}

/// Maps normalized amplitudes (ψ1, ψ2) to the Bloch sphere, with
/// x3 = |ψ1|² − |ψ2|² so that state one lands on N.
pub fn hopf_project(psi1: Complex64, psi2: Complex64) -> Result<BlochPoint> {
    let w = psi1.norm_sqr() + psi2.norm_sqr();
    if (w - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(w));
    }
    let c = psi1 * psi2.conj();
    let v = Vector3::new(2.0 * c.re, 2.0 * c.im, psi1.norm_sqr() - psi2.norm_sqr());
    Ok(BlochPoint::from_vec_unchecked(&v))
}
