use std::fmt::Write as _;

use nalgebra::{Matrix2, Vector2, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bloch::BlochPoint;
use crate::control::Bang;
use crate::dynamics::{bang_axis, fmt17};
use crate::error::{Error, Result};
use crate::params::NormalizedParams;
use crate::switching::s_max;

use super::ExtremalFamily;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchCurveSample {
    pub k: usize,
    pub s: f64,
    pub point: BlochPoint,
    pub incoming: Bang,
    pub outgoing: Bang,
    pub tangent: [f64; 3],
}

/// C_k(s) = M̄^{k−1}(s)·e^{sX}·N.
pub fn curve_point(k: usize, s: f64, family: Bang, p: &NormalizedParams) -> Result<BlochPoint> {
    if k == 0 {
        return Err(Error::InvalidArgument("curve index starts at 1".into()));
    }
    let fam = ExtremalFamily::new(family, s, p)?;
    let mut x = fam.first * BlochPoint::N.to_vec();
    for _ in 1..k {
        x = fam.mbar * x;
    }
    Ok(BlochPoint::from_vec_unchecked(&x))
}

/// Samples C_k on `s_grid` with a finite-difference tangent of step
/// 1e-4·s_max (one-sided second-order at the ends of [0, s_max]).
pub fn switching_curve(
    k: usize,
    s_grid: &[f64],
    family: Bang,
    p: &NormalizedParams,
) -> Result<Vec<SwitchCurveSample>> {
    let smax = s_max(family, p);
    let h = 1e-4 * smax;
    s_grid
        .par_iter()
        .map(|&s| {
            let c = |s: f64| curve_point(k, s.clamp(0.0, smax), family, p).map(|x| x.to_vec());
            let x = c(s)?;
            let d = if s - h < 0.0 {
                (-3.0 * x + 4.0 * c(s + h)? - c(s + 2.0 * h)?) / (2.0 * h)
            } else if s + h > smax {
                (3.0 * x - 4.0 * c(s - h)? + c(s - 2.0 * h)?) / (2.0 * h)
            } else {
                (c(s + h)? - c(s - h)?) / (2.0 * h)
            };
            let tangent = d - x * x.dot(&d);
            Ok(SwitchCurveSample {
                k,
                s,
                point: BlochPoint::from_vec_unchecked(&x),
                incoming: family,
                outgoing: family.next(),
                tangent: [tangent[0], tangent[1], tangent[2]],
            })
        })
        .collect()
}

/// `n` evenly spaced parameters covering [0, s_max].
pub fn s_grid(family: Bang, n: usize, p: &NormalizedParams) -> Vec<f64> {
    let smax = s_max(family, p);
    match n {
        0 => vec![],
        1 => vec![0.0],
        _ => (0..n).map(|i| smax * i as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Refraction {
    pub c1: f64,
    pub c2: f64,
    pub residual: f64,
    pub locally_optimal: bool,
}

/// Coefficients below this fraction of the larger one count as zero.
const SNAP: f64 = 1e-8;

/// Decomposes the tangent as `c1·Y1 + c2·Y2` (incoming, outgoing fields) by
/// least squares; locally optimal iff `c1·c2 < 0`.
pub fn refraction_test(sample: &SwitchCurveSample, p: &NormalizedParams) -> Result<Refraction> {
    let x = sample.point.to_vec();
    let y1 = bang_axis(sample.incoming, p).cross(&x);
    let y2 = bang_axis(sample.outgoing, p).cross(&x);
    if y1.cross(&y2).norm() <= 1e-10 * y1.norm() * y2.norm() || y1.norm() == 0.0 {
        return Err(Error::DegenerateFields);
    }
    let t = Vector3::from(sample.tangent);
    let g = Matrix2::new(y1.dot(&y1), y1.dot(&y2), y1.dot(&y2), y2.dot(&y2));
    let c = g
        .try_inverse()
        .ok_or(Error::DegenerateFields)?
        * Vector2::new(y1.dot(&t), y2.dot(&t));
    let residual = (t - c[0] * y1 - c[1] * y2).norm();
    let scale = c[0].abs().max(c[1].abs());
    let snap = |v: f64| if v.abs() <= SNAP * scale { 0.0 } else { v };
    let (c1, c2) = (snap(c[0]), snap(c[1]));
    Ok(Refraction { c1, c2, residual, locally_optimal: c1 * c2 < 0.0 })
}

pub fn curves_csv(rows: &[(SwitchCurveSample, Option<Refraction>)]) -> String {
    let mut out = String::from("k,s,x1,x2,x3,c1,c2,locally_optimal\n");
    for (smp, r) in rows {
        let (c1, c2, ok) = match r {
            Some(r) => (fmt17(r.c1), fmt17(r.c2), r.locally_optimal.to_string()),
            None => ("NaN".into(), "NaN".into(), "false".into()),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            smp.k,
            fmt17(smp.s),
            fmt17(smp.point.x1),
            fmt17(smp.point.x2),
            fmt17(smp.point.x3),
            c1,
            c2,
            ok
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_curve_starts_at_north() {
        let p = NormalizedParams::symmetric(0.25).unwrap();
        assert!(curve_point(1, 0.0, Bang::PP, &p).unwrap().dist(&BlochPoint::N) < 1e-15);
        assert!(curve_point(0, 0.0, Bang::PP, &p).is_err());
    }

    #[test]
    fn tangent_is_tangent() {
        let p = NormalizedParams::symmetric(0.25).unwrap();
        let grid = s_grid(Bang::PP, 9, &p);
        for smp in switching_curve(2, &grid, Bang::PP, &p).unwrap() {
            let t = Vector3::from(smp.tangent);
            assert!(t.dot(&smp.point.to_vec()).abs() < 1e-14);
        }
    }

    #[test]
    fn curve_along_incoming_field_is_not_optimal() {
        let p = NormalizedParams::symmetric(0.25).unwrap();
        let x = curve_point(1, 0.7, Bang::PP, &p).unwrap();
        let y1 = bang_axis(Bang::PP, &p).cross(&x.to_vec());
        let smp = SwitchCurveSample {
            k: 1,
            s: 0.7,
            point: x,
            incoming: Bang::PP,
            outgoing: Bang::PM,
            tangent: [y1[0], y1[1], y1[2]],
        };
        let r = refraction_test(&smp, &p).unwrap();
        assert!((r.c1 - 1.0).abs() < 1e-12);
        assert_eq!(r.c2, 0.0);
        assert!(!r.locally_optimal);
    }
}
