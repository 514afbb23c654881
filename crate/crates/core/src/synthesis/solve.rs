use std::f64::consts::TAU;

use nalgebra::{Matrix2, Matrix3x2, Vector2, Vector3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bloch::BlochPoint;
use crate::control::{Bang, ControlSchedule};
use crate::dynamics::{bang_axis, bang_propagator};
use crate::error::{Error, Result};
use crate::params::NormalizedParams;
use crate::switching::{interbang_duration, s_max};

use super::{ExtremalFamily, ExtremalSpec};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisOptions {
    /// Accepted endpoint error (Euclidean).
    pub tol: f64,
    /// Radius of the excluded disk around S; `None` means 3α.
    pub exclusion: Option<f64>,
    /// First-arc durations sampled per family during the coarse march.
    pub s_samples: usize,
    /// Time step of the coarse march.
    pub t_step: f64,
    /// Position of the s-samples inside their cells, in [0, 1).
    pub grid_offset: f64,
    /// Hard cap on the time horizon.
    pub max_time: f64,
    pub max_iter: usize,
}

impl Default for SynthesisOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            exclusion: None,
            s_samples: 48,
            t_step: 0.05,
            grid_offset: 0.5,
            max_time: 1e4,
            max_iter: 80,
        }
    }
}

impl SynthesisOptions {
    pub fn exclusion_radius(&self, p: &NormalizedParams) -> f64 {
        self.exclusion.unwrap_or(3.0 * p.alpha)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthesisResult {
    pub spec: ExtremalSpec,
    pub v: f64,
    pub total_time: f64,
    pub physical_time: Option<f64>,
    pub switch_times: Vec<f64>,
    pub final_state: BlochPoint,
    pub residual: f64,
    pub schedule: ControlSchedule,
}

impl SynthesisResult {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "family": self.spec.family.name(),
            "s": self.spec.s,
            "n": self.spec.n,
            "phase": self.spec.phase,
            "leftover": self.spec.leftover,
            "total_time": self.total_time,
            "physical_time": self.physical_time,
            "switch_times": self.switch_times,
            "final_state": [self.final_state.x1, self.final_state.x2, self.final_state.x3],
            "residual": self.residual,
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    family: Bang,
    s: f64,
    t: f64,
    residual: f64,
    first_arc: bool,
}

/// Time along the first arc of `family` at which `target` is met, if it is.
fn first_arc_hit(target: &Vector3<f64>, family: Bang, p: &NormalizedParams, tol: f64) -> Option<Candidate> {
    let w = bang_axis(family, p);
    let speed = w.norm();
    let wh = w / speed;
    let n = Vector3::z();
    let np = n - wh * wh.dot(&n);
    let tp = target - wh * wh.dot(target);
    let phi = wh.dot(&np.cross(&tp)).atan2(np.dot(&tp)).rem_euclid(TAU);
    let t = phi / speed;
    if t > s_max(family, p) {
        return None;
    }
    let x = bang_propagator(family, t, p) * n;
    let residual = (x - target).norm();
    (residual <= tol).then_some(Candidate { family, s: s_max(family, p), t, residual, first_arc: true })
}

/// Walks an extremal forward in steps of `h`, crossing arc boundaries exactly.
struct March<'a> {
    fam: &'a ExtremalFamily,
    p: &'a NormalizedParams,
    x: Vector3<f64>,
    arc: usize,
    left: f64,
}

impl<'a> March<'a> {
    fn new(fam: &'a ExtremalFamily, p: &'a NormalizedParams) -> Self {
        Self { fam, p, x: Vector3::z(), arc: 0, left: fam.s }
    }

    fn bang(&self) -> Bang {
        self.fam.family.advance(self.arc)
    }

    fn step(&mut self, mut h: f64) {
        while h > 0.0 {
            if self.left <= 0.0 {
                self.arc += 1;
                self.left = self.fam.v;
            }
            let d = h.min(self.left);
            self.x = bang_propagator(self.bang(), d, self.p) * self.x;
            self.left -= d;
            h -= d;
        }
    }
}

fn residual_at(family: Bang, s: f64, t: f64, target: &Vector3<f64>, p: &NormalizedParams) -> Result<Vector3<f64>> {
    let fam = ExtremalFamily::new(family, s, p)?;
    Ok(fam.point(t, p).to_vec() - target)
}

/// Levenberg–Marquardt on (s, τ) ↦ Ξ(s + τ, s) − target, τ ≥ 0 being the
/// time after the first switch. Points on the first arc do not depend on s,
/// so they are left to `first_arc_hit`.
fn refine(
    family: Bang,
    s0: f64,
    t0: f64,
    target: &Vector3<f64>,
    p: &NormalizedParams,
    opts: &SynthesisOptions,
) -> Option<Candidate> {
    let smax = s_max(family, p);
    let at = |s: f64, tau: f64| residual_at(family, s, s + tau, target, p).ok();
    let (mut s, mut tau) = (s0, (t0 - s0).max(0.0));
    let mut r = at(s, tau)?;
    let mut mu = 1e-6;
    for _ in 0..opts.max_iter {
        if r.norm() <= opts.tol {
            break;
        }
        let hs = 1e-7 * smax;
        let ht = 1e-7;
        let (sa, sb) = if s - hs < 0.0 { (s, s + hs) } else if s + hs > smax { (s - hs, s) } else { (s - hs, s + hs) };
        let ds = (at(sb, tau)? - at(sa, tau)?) / (sb - sa);
        let ta = (tau - ht).max(0.0);
        let dt = (at(s, tau + ht)? - at(s, ta)?) / (tau + ht - ta);
        let j = Matrix3x2::from_columns(&[ds, dt]);
        let jtj = j.transpose() * j;
        let g = j.transpose() * r;
        let mut improved = false;
        for _ in 0..12 {
            let a = jtj + Matrix2::from_diagonal(&Vector2::new(jtj[(0, 0)], jtj[(1, 1)])) * mu
                + Matrix2::identity() * 1e-300;
            let Some(step) = a.try_inverse().map(|ai| -(ai * g)) else {
                mu *= 10.0;
                continue;
            };
            let sn = (s + step[0]).clamp(0.0, smax);
            let tn = (tau + step[1]).max(0.0);
            if let Some(rn) = at(sn, tn) {
                if rn.norm() < r.norm() {
                    s = sn;
                    tau = tn;
                    r = rn;
                    mu = (mu * 0.1).max(1e-12);
                    improved = true;
                    break;
                }
            }
            mu *= 10.0;
        }
        if !improved {
            break;
        }
    }
    Some(Candidate { family, s, t: s + tau, residual: r.norm(), first_arc: false })
}

fn stays_outside(fam: &ExtremalFamily, t: f64, radius: f64, p: &NormalizedParams) -> bool {
    let mut m = March::new(fam, p);
    let h = 0.01;
    let steps = (t / h).floor() as usize;
    for _ in 0..steps {
        m.step(h);
        if BlochPoint::from_vec_unchecked(&m.x).miss_angle() < radius * (1.0 - 1e-9) {
            return false;
        }
    }
    true
}

/// Finds the extremal of the synthesis that reaches `target` first.
pub fn solve_synthesis(target: &BlochPoint, p: &NormalizedParams, tol: f64) -> Result<SynthesisResult> {
    solve_synthesis_with(target, p, &SynthesisOptions { tol, ..Default::default() })
}

pub fn solve_synthesis_with(
    target: &BlochPoint,
    p: &NormalizedParams,
    opts: &SynthesisOptions,
) -> Result<SynthesisResult> {
    let target = BlochPoint::new(target.x1, target.x2, target.x3)?;
    let radius = opts.exclusion_radius(p);
    let distance = target.miss_angle();
    if distance <= radius {
        return Err(Error::TargetInCutLocusNeighborhood { distance, radius });
    }
    let tv = target.to_vec();

    let mut cands: Vec<Candidate> = Bang::ALL
        .iter()
        .filter_map(|&f| first_arc_hit(&tv, f, p, opts.tol.max(1e-12)))
        .collect();

    let per_family: Vec<Vec<Candidate>> = Bang::ALL
        .par_iter()
        .map(|&family| search_family(family, &tv, p, opts, radius))
        .collect::<Result<_>>()?;
    cands.extend(per_family.into_iter().flatten());

    let best_residual = cands.iter().map(|c| c.residual).fold(f64::INFINITY, f64::min);
    let mut ok: Vec<Candidate> = cands.into_iter().filter(|c| c.residual <= opts.tol).collect();
    // earliest arrival; ties go to first-arc hits, then family order, then s
    ok.sort_by(|a, b| {
        let dt = a.t - b.t;
        if dt.abs() > 1e-9 {
            return dt.partial_cmp(&0.0).unwrap();
        }
        b.first_arc
            .cmp(&a.first_arc)
            .then(a.family.cmp(&b.family))
            .then(a.s.partial_cmp(&b.s).unwrap())
    });
    let c = ok.first().copied().ok_or(Error::NoConvergence(best_residual))?;

    let v = interbang_duration(c.s, c.family, p)?;
    let fam = ExtremalFamily::with_v(c.family, c.s, v, p);
    let final_state = fam.point(c.t, p);
    Ok(SynthesisResult {
        spec: ExtremalSpec::locate(c.family, c.s, v, c.t),
        v,
        total_time: c.t,
        physical_time: None,
        switch_times: fam.switch_times(c.t),
        final_state,
        residual: (final_state.to_vec() - tv).norm(),
        schedule: fam.schedule(c.t),
    })
}

fn search_family(
    family: Bang,
    tv: &Vector3<f64>,
    p: &NormalizedParams,
    opts: &SynthesisOptions,
    radius: f64,
) -> Result<Vec<Candidate>> {
    let smax = s_max(family, p);
    let ns = opts.s_samples.max(2);
    let h = opts.t_step;
    // coarse distance table, each row marched until the exclusion disk
    let rows: Vec<(f64, Vec<f64>)> = (0..ns)
        .map(|j| {
            let s = (smax * (j as f64 + opts.grid_offset) / (ns - 1) as f64).min(smax);
            let fam = ExtremalFamily::new(family, s, p)?;
            let mut m = March::new(&fam, p);
            let mut d = vec![(m.x - tv).norm()];
            let mut t = 0.0;
            while t < opts.max_time {
                m.step(h);
                t += h;
                d.push((m.x - tv).norm());
                if BlochPoint::from_vec_unchecked(&m.x).miss_angle() < radius {
                    break;
                }
            }
            Ok((s, d))
        })
        .collect::<Result<_>>()?;

    let at = |j: isize, i: isize| -> f64 {
        if j < 0 || j as usize >= rows.len() || i < 0 {
            return f64::INFINITY;
        }
        rows[j as usize].1.get(i as usize).copied().unwrap_or(f64::INFINITY)
    };
    let mut seeds = Vec::new();
    for (j, (s, d)) in rows.iter().enumerate() {
        for (i, &dv) in d.iter().enumerate() {
            if dv > 0.5 {
                continue;
            }
            let (ji, ii) = (j as isize, i as isize);
            let is_min = (-1..=1).all(|a| (-1..=1).all(|b| (a == 0 && b == 0) || at(ji + a, ii + b) >= dv));
            if is_min {
                seeds.push((dv, *s, i as f64 * h));
            }
        }
    }
    seeds.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    seeds.truncate(16);

    let mut out = Vec::new();
    for (_, s0, t0) in seeds {
        if let Some(c) = refine(family, s0, t0, tv, p, opts) {
            if c.residual <= opts.tol {
                let v = interbang_duration(c.s, family, p)?;
                let fam = ExtremalFamily::with_v(family, c.s, v, p);
                if stays_outside(&fam, c.t, radius, p) {
                    out.push(c);
                }
            } else {
                out.push(c);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::flow;

    #[test]
    fn point_on_first_arc() {
        let p = NormalizedParams::symmetric(0.25).unwrap();
        let target = flow(&BlochPoint::N, Bang::PP.control(), 0.5, &p);
        let r = solve_synthesis(&target, &p, 1e-10).unwrap();
        assert_eq!(r.spec.family, Bang::PP);
        assert_eq!(r.spec.n, 0);
        assert_eq!(r.spec.phase, 0);
        assert!(r.spec.s >= 0.5);
        assert!((r.total_time - 0.5).abs() < 1e-9);
        assert!(r.switch_times.is_empty());
    }

    #[test]
    fn south_pole_excluded() {
        let p = NormalizedParams::symmetric(0.25).unwrap();
        let e = solve_synthesis(&BlochPoint::S, &p, 1e-10).unwrap_err();
        assert_eq!(e.kind(), "TargetInCutLocusNeighborhood");
    }
}
