use std::f64::consts::TAU;
use std::fmt::Write as _;

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adjoint::extremal_from_theta;
use crate::bloch::BlochPoint;
use crate::dynamics::fmt17;
use crate::error::{Error, Result};
use crate::params::NormalizedParams;
use crate::sphere::closed_polyline_self_intersections;
use crate::switching::theta_of_alpha;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontSample {
    pub theta: f64,
    pub endpoint: BlochPoint,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Front {
    pub time: f64,
    pub samples: Vec<FrontSample>,
    /// Crossing segment pairs `(i, j)`: segment i joins samples i and i+1 (cyclically).
    pub self_intersections: Vec<(usize, usize)>,
}

impl Front {
    pub fn has_self_intersection(&self) -> bool {
        !self.self_intersections.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("theta,x1,x2,x3\n");
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                fmt17(s.theta),
                fmt17(s.endpoint.x1),
                fmt17(s.endpoint.x2),
                fmt17(s.endpoint.x3)
            );
        }
        out
    }
}

/// Endpoints at time `t` of the extremals with λ(0) = (cos θ, sin θ, 0) on a
/// uniform θ grid, plus the self-intersections of the closed polyline.
pub fn extremal_front(t: f64, n_samples: usize, p: &NormalizedParams) -> Result<Front> {
    if n_samples < 8 {
        return Err(Error::InvalidArgument(format!("need at least 8 samples, got {n_samples}")));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidDuration(t));
    }
    let samples: Vec<FrontSample> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let theta = TAU * i as f64 / n_samples as f64;
            let endpoint = if t == 0.0 {
                BlochPoint::N
            } else {
                extremal_from_theta(theta, t, p)?.endpoint(p)
            };
            Ok(FrontSample { theta, endpoint })
        })
        .collect::<Result<_>>()?;
    let pts: Vec<Vector3<f64>> = samples.iter().map(|s| s.endpoint.to_vec()).collect();
    let self_intersections = closed_polyline_self_intersections(&pts);
    Ok(Front { time: t, samples, self_intersections })
}

/// The extremal that passes closest to S on its first approach.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinFlip {
    pub time: f64,
    pub theta: f64,
    pub miss_angle: f64,
}

/// Estimates the spin-flip time: over a θ grid, each extremal's first local
/// minimum of the distance to S inside the 3α disk is located (step 0.01,
/// then golden-section refinement), and the closest approach wins.
pub fn spin_flip_time(p: &NormalizedParams, n_theta: usize) -> Result<SpinFlip> {
    if n_theta < 8 {
        return Err(Error::InvalidArgument(format!("need at least 8 samples, got {n_theta}")));
    }
    let radius = 3.0 * p.alpha;
    let horizon = 4.0 * (std::f64::consts::PI / (4.0 * theta_of_alpha(p.alpha).abs()) + 2.0) * std::f64::consts::PI / p.k;
    let h = 0.01 / p.k;
    let best: Vec<Option<SpinFlip>> = (0..n_theta)
        .into_par_iter()
        .map(|i| {
            let theta = TAU * i as f64 / n_theta as f64;
            let ex = extremal_from_theta(theta, horizon, p)?;
            let miss = |t: f64| ex.point_at(t, p).miss_angle();
            let n = (horizon / h) as usize;
            let (mut m0, mut m1) = (miss(0.0), miss(h));
            for j in 2..=n {
                let m2 = miss(j as f64 * h);
                if m1 <= m0 && m1 <= m2 && m1 <= radius {
                    let (t, m) = golden_min(&miss, (j - 2) as f64 * h, j as f64 * h);
                    return Ok(Some(SpinFlip { time: t, theta, miss_angle: m }));
                }
                m0 = m1;
                m1 = m2;
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;
    best.into_iter()
        .flatten()
        .min_by(|a, b| a.miss_angle.total_cmp(&b.miss_angle))
        .ok_or(Error::NoConvergence(f64::NAN))
}

fn golden_min<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-12 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}
