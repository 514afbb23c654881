//! Generators of the normalized system and their exact flows.

use std::fmt::Write as _;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::bloch::BlochPoint;
use crate::control::{Bang, Control, ControlSchedule};
use crate::error::{Error, Result};
use crate::params::NormalizedParams;

/// Skew matrix `[w]×` with `[w]× x = w × x`.
pub fn skew(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w[2], w[1], w[2], 0.0, -w[0], -w[1], w[0], 0.0)
}

/// Inverse of [`skew`] (antisymmetric part only).
pub fn unskew(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    )
}

/// Rotation by angle `|w|·t` about `w` (Rodrigues).
pub fn rotation(w: &Vector3<f64>, t: f64) -> Matrix3<f64> {
    let n = w.norm();
    let th = n * t;
    if n == 0.0 || th == 0.0 {
        return Matrix3::identity();
    }
    let k = skew(&(w / n));
    let (s, c) = th.sin_cos();
    Matrix3::identity() + k * s + k * k * (1.0 - c)
}

/// Rotation about the x1-axis written the way the monodromy identities use it:
/// `[[1,0,0],[0,cos a, sin a],[0,-sin a, cos a]]`.
pub fn rot_x1(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, s, 0.0, -s, c)
}

/// Rotation vector of X_u: `k·(sinα sinβ u1, −sinα cosβ u2, cosα)`.
pub fn axis(u: Control, p: &NormalizedParams) -> Vector3<f64> {
    let (sa, ca) = p.alpha.sin_cos();
    let (sb, cb) = p.beta.sin_cos();
    p.k * Vector3::new(sa * sb * u.u1, -sa * cb * u.u2, ca)
}

pub fn bang_axis(b: Bang, p: &NormalizedParams) -> Vector3<f64> {
    axis(b.control(), p)
}

/// X_u = F + u1·G1 + u2·G2.
pub fn generator(u: Control, p: &NormalizedParams) -> Matrix3<f64> {
    skew(&axis(u, p))
}

/// The drift F and the two control fields G1, G2.
pub fn fields(p: &NormalizedParams) -> (Matrix3<f64>, Matrix3<f64>, Matrix3<f64>) {
    let (sa, ca) = p.alpha.sin_cos();
    let (sb, cb) = p.beta.sin_cos();
    (
        skew(&Vector3::new(0.0, 0.0, p.k * ca)),
        skew(&Vector3::new(p.k * sa * sb, 0.0, 0.0)),
        skew(&Vector3::new(0.0, -p.k * sa * cb, 0.0)),
    )
}

/// exp(t·X_u).
pub fn propagator(u: Control, t: f64, p: &NormalizedParams) -> Matrix3<f64> {
    rotation(&axis(u, p), t)
}

pub fn bang_propagator(b: Bang, t: f64, p: &NormalizedParams) -> Matrix3<f64> {
    rotation(&bang_axis(b, p), t)
}

/// exp(t·X_u)·x, renormalized. Negative `t` runs the flow backwards.
pub fn flow(x: &BlochPoint, u: Control, t: f64, p: &NormalizedParams) -> BlochPoint {
    BlochPoint::from_vec_unchecked(&(propagator(u, t, p) * x.to_vec()))
}

pub fn apply(m: &Matrix3<f64>, x: &BlochPoint) -> BlochPoint {
    BlochPoint::from_vec_unchecked(&(m * x.to_vec()))
}

/// Product of the arc propagators, last arc leftmost.
pub fn schedule_propagator(sched: &ControlSchedule, p: &NormalizedParams) -> Matrix3<f64> {
    sched
        .arcs()
        .iter()
        .fold(Matrix3::identity(), |acc, a| propagator(a.control, a.duration, p) * acc)
}

/// Endpoint of a schedule from `x0`, renormalizing after each arc.
pub fn endpoint(x0: &BlochPoint, sched: &ControlSchedule, p: &NormalizedParams) -> BlochPoint {
    sched.arcs().iter().fold(*x0, |x, a| flow(&x, a.control, a.duration, p))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub u: Control,
    pub x: BlochPoint,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    pub fn final_state(&self) -> BlochPoint {
        self.samples.last().map(|s| s.x).unwrap_or(BlochPoint::N)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,u1,u2,x1,x2,x3\n");
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt17(s.t),
                fmt17(s.u.u1),
                fmt17(s.u.u2),
                fmt17(s.x.x1),
                fmt17(s.x.x2),
                fmt17(s.x.x3)
            );
        }
        out
    }
}

/// 17 significant digits, round-trip exact.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Samples every `dt` inside each arc plus the exact arc end.
pub fn simulate(
    x0: &BlochPoint,
    sched: &ControlSchedule,
    p: &NormalizedParams,
    dt: f64,
) -> Result<Trajectory> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidStep(dt));
    }
    let arcs = sched.arcs();
    let first = arcs.first().ok_or(Error::EmptySchedule)?;
    let mut samples = vec![Sample { t: 0.0, u: first.control, x: *x0 }];
    let mut t0 = 0.0;
    let mut x = *x0;
    for a in arcs {
        if a.duration == 0.0 {
            continue;
        }
        let w = axis(a.control, p);
        let mut j = 1usize;
        loop {
            let tau = j as f64 * dt;
            if tau >= a.duration - 1e-12 * a.duration.max(1.0) {
                break;
            }
            let xt = BlochPoint::from_vec_unchecked(&(rotation(&w, tau) * x.to_vec()));
            samples.push(Sample { t: t0 + tau, u: a.control, x: xt });
            j += 1;
        }
        x = BlochPoint::from_vec_unchecked(&(rotation(&w, a.duration) * x.to_vec()));
        t0 += a.duration;
        samples.push(Sample { t: t0, u: a.control, x });
    }
    Ok(Trajectory { samples })
}

/// Classical RK4 for `x' = X(t)·x`; used only as an independent check of the
/// closed-form flows and for continuous (non-bang) control laws.
pub fn rk4<F>(x0: Vector3<f64>, t0: f64, t1: f64, h: f64, mut gen: F) -> Vector3<f64>
where
    F: FnMut(f64) -> Matrix3<f64>,
{
    let n = ((t1 - t0) / h).abs().ceil().max(1.0) as usize;
    let h = (t1 - t0) / n as f64;
    let mut x = x0;
    let mut t = t0;
    for _ in 0..n {
        let k1 = gen(t) * x;
        let k2 = gen(t + 0.5 * h) * (x + 0.5 * h * k1);
        let k3 = gen(t + 0.5 * h) * (x + 0.5 * h * k2);
        let k4 = gen(t + h) * (x + h * k3);
        x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn p() -> NormalizedParams {
        NormalizedParams::new(0.25, FRAC_PI_4).unwrap()
    }

    #[test]
    fn drift_only() {
        let g = generator(Control::ZERO, &p());
        let ca = 0.25f64.cos();
        assert!((g - skew(&Vector3::new(0.0, 0.0, ca))).norm() < 1e-16);
        let x = flow(&BlochPoint::N, Control::ZERO, 3.7, &p());
        assert!(x.dist(&BlochPoint::N) < 1e-15);
    }

    #[test]
    fn bang_axis_is_unit() {
        for b in Bang::ALL {
            for beta in [0.1, 0.5, FRAC_PI_4] {
                let q = NormalizedParams::new(0.6, beta).unwrap();
                assert!((bang_axis(b, &q).norm() - 1.0).abs() < 1e-15);
            }
        }
        let w = unskew(&generator(Bang::PP.control(), &p()));
        let (sa, ca) = 0.25f64.sin_cos();
        let s = FRAC_PI_4.sin();
        assert!((w - Vector3::new(sa * s, -sa * s, ca)).norm() < 1e-16);
    }

    #[test]
    fn linearity() {
        let u = Control::new(0.3, -0.8).unwrap();
        let (f, g1, g2) = fields(&p());
        assert!((generator(u, &p()) + generator(u.neg(), &p()) - 2.0 * f).norm() < 1e-15);
        assert!((generator(u, &p()) - (f + 0.3 * g1 - 0.8 * g2)).norm() < 1e-15);
    }

    #[test]
    fn flow_matches_rk4() {
        let g = generator(Bang::PP.control(), &p());
        let x = rk4(Vector3::new(0.0, 0.0, 1.0), 0.0, 0.5, 1e-5, |_| g);
        let y = flow(&BlochPoint::N, Bang::PP.control(), 0.5, &p());
        assert!((x - y.to_vec()).norm() < 1e-9);
    }

    #[test]
    fn simulate_samples() {
        let sched = ControlSchedule::new().with_arc(Bang::PP.control(), FRAC_PI_2).unwrap();
        let tr = simulate(&BlochPoint::N, &sched, &p(), 0.1).unwrap();
        let end = flow(&BlochPoint::N, Bang::PP.control(), FRAC_PI_2, &p());
        assert_eq!(tr.final_state(), end);
        assert_eq!(tr.last().unwrap().t, FRAC_PI_2);
        assert_eq!(tr.samples.len(), 17);

        let zero = ControlSchedule::new().with_arc(Control::ZERO, 0.0).unwrap();
        let tr = simulate(&BlochPoint::N, &zero, &p(), 0.1).unwrap();
        assert_eq!(tr.samples.len(), 1);
        assert_eq!(tr.samples[0].t, 0.0);

        let e = simulate(&BlochPoint::N, &ControlSchedule::new(), &p(), 0.1).unwrap_err();
        assert_eq!(e, Error::EmptySchedule);
        assert!(simulate(&BlochPoint::N, &sched, &p(), 0.0).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let sched = ControlSchedule::new().with_arc(Bang::MP.control(), 0.3).unwrap();
        let tr = simulate(&BlochPoint::N, &sched, &p(), 0.1).unwrap();
        let csv = tr.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,u1,u2,x1,x2,x3"));
        for (line, s) in lines.zip(&tr.samples) {
            let v: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
            assert_eq!(v, vec![s.t, s.u.u1, s.u.u2, s.x.x1, s.x.x2, s.x.x3]);
        }
    }
}
