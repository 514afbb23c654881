//! Brute-force checks independent of the closed-form synthesis: a
//! reachable-set sweep over the four bang controls, and a scan of the
//! structure of generated extremals.

use std::f64::consts::TAU;

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::adjoint::extremal_from_theta;
use crate::bloch::BlochPoint;
use crate::control::Bang;
use crate::dynamics::{bang_axis, bang_propagator};
use crate::error::{Error, Result};
use crate::params::NormalizedParams;
use crate::switching::s_max;

/// Only bang controls are enumerated; singular and abnormal arcs are assumed
/// absent from optimal trajectories.
pub const BANG_ONLY_ASSUMPTION: &str =
    "reachable sets enumerate the four bang controls only (no singular or abnormal optimal arcs from N)";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub target: BlochPoint,
    /// Great-circle distance from N over the maximal speed.
    pub t_lower: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub dt: f64,
    pub eps: f64,
    pub frontier_peak: usize,
}

impl OracleResult {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "target": [self.target.x1, self.target.x2, self.target.x3],
            "t_lower": self.t_lower,
            "t_lo": self.t_lo,
            "t_hi": self.t_hi,
            "dt": self.dt,
            "eps": self.eps,
            "frontier_peak": self.frontier_peak,
            "assumption": BANG_ONLY_ASSUMPTION,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    pub dt: f64,
    pub eps: f64,
    pub max_steps: usize,
    /// Pruning cell size as a fraction of `eps`.
    pub cell_fraction: f64,
}

impl OracleOptions {
    pub fn new(dt: f64, eps: f64) -> Self {
        Self { dt, eps, max_steps: 100_000, cell_fraction: 0.25 }
    }
}

pub fn min_time_bracket(target: &BlochPoint, p: &NormalizedParams, dt: f64, eps: f64) -> Result<OracleResult> {
    Ok(min_time_brackets(&[*target], p, &OracleOptions::new(dt, eps))?[0])
}

/// One forward sweep serving several targets; fails if any target is not
/// reached within the step budget.
///
/// The frontier is the exact-time reachable set of the four bang controls,
/// sampled every `dt`. Points sharing a cell of size `cell_fraction·eps` are
/// merged, the earliest generated one surviving, so the result is
/// deterministic. `t_hi` is always attained by a genuine bang-bang
/// trajectory; `t_lo` is only a lower bound when pruning loses nothing,
/// which needs the cell to be small against the motion per step.
pub fn min_time_brackets(
    targets: &[BlochPoint],
    p: &NormalizedParams,
    opts: &OracleOptions,
) -> Result<Vec<OracleResult>> {
    let (dt, eps) = (opts.dt, opts.eps);
    if !(dt > 0.0) || !(eps > 0.0) || !(opts.cell_fraction > 0.0) {
        return Err(Error::InvalidArgument(format!("dt and eps must be positive (dt={dt}, eps={eps})")));
    }
    let targets: Vec<BlochPoint> = targets
        .iter()
        .map(|t| BlochPoint::new(t.x1, t.x2, t.x3))
        .collect::<Result<_>>()?;
    let steps: Vec<Matrix3<f64>> = Bang::ALL.iter().map(|&b| bang_propagator(b, dt, p)).collect();
    let cell = eps * opts.cell_fraction;
    let key = |x: &Vector3<f64>| -> u64 {
        let q = |c: f64| (((c + 1.5) / cell).floor() as u64) & 0x1f_ffff;
        q(x[0]) | (q(x[1]) << 21) | (q(x[2]) << 42)
    };
    let hit = |front: &[Vector3<f64>], t: &BlochPoint| {
        let tv = t.to_vec();
        front.par_iter().any(|x| x.cross(&tv).norm().atan2(x.dot(&tv)) <= eps)
    };

    let mut hit_step: Vec<Option<usize>> = vec![None; targets.len()];
    let mut front = vec![Vector3::z()];
    let mut seen: FxHashSet<u64> = FxHashSet::default();
    let mut peak = 1usize;
    let mut m = 0usize;
    loop {
        for (i, t) in targets.iter().enumerate() {
            if hit_step[i].is_none() && hit(&front, t) {
                hit_step[i] = Some(m);
            }
        }
        if hit_step.iter().all(Option::is_some) {
            break;
        }
        if m >= opts.max_steps {
            return Err(Error::BudgetExceeded(opts.max_steps));
        }
        let expanded: Vec<Vector3<f64>> = front
            .par_iter()
            .flat_map_iter(|x| steps.iter().map(move |r| (r * x).normalize()))
            .collect();
        seen.clear();
        front = expanded.into_iter().filter(|x| seen.insert(key(x))).collect();
        peak = peak.max(front.len());
        m += 1;
    }

    let speed = bang_axis(Bang::PP, p).norm();
    Ok(targets
        .iter()
        .zip(hit_step)
        .map(|(t, h)| {
            let m = h.expect("every target was hit");
            OracleResult {
                target: *t,
                t_lower: BlochPoint::N.angle_to(t) / speed,
                t_lo: m.saturating_sub(1) as f64 * dt,
                t_hi: m as f64 * dt,
                dt,
                eps,
                frontier_peak: peak,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BbReport {
    pub n_theta: usize,
    pub horizon: f64,
    pub first_switch_ok: bool,
    pub alternation_ok: bool,
    pub equal_gaps_ok: bool,
    /// Largest `s − s_max(family)` seen (≤ 0 when all pass).
    pub worst_first_switch_excess: f64,
    pub worst_gap_deviation: f64,
    pub passed: bool,
}

/// Generates extremals on a θ grid and checks that the first arc is at most
/// s_max, that switching indices alternate, and that interior gaps agree.
pub fn verify_bb_structure(p: &NormalizedParams, n_theta: usize, horizon: f64) -> Result<BbReport> {
    if n_theta < 4 {
        return Err(Error::InvalidArgument(format!("n_theta must be at least 4, got {n_theta}")));
    }
    let per: Vec<(f64, bool, f64)> = (0..n_theta)
        .into_par_iter()
        .map(|i| {
            let theta = TAU * i as f64 / n_theta as f64;
            let ex = extremal_from_theta(theta, horizon, p)?;
            let excess = ex.switch_times.first().map_or(f64::NEG_INFINITY, |&s| s - s_max(ex.family(), p));
            let alternates = ex.switch_indices.windows(2).all(|w| w[0] != w[1]);
            let gaps = ex.gaps();
            let dev = match gaps.first() {
                Some(&g0) => gaps.iter().map(|g| (g - g0).abs()).fold(0.0, f64::max),
                None => 0.0,
            };
            Ok((excess, alternates, dev))
        })
        .collect::<Result<_>>()?;
    let worst_first_switch_excess = per.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max);
    let worst_gap_deviation = per.iter().map(|r| r.2).fold(0.0, f64::max);
    let first_switch_ok = worst_first_switch_excess <= 1e-10;
    let alternation_ok = per.iter().all(|r| r.1);
    let equal_gaps_ok = worst_gap_deviation <= 1e-8;
    Ok(BbReport {
        n_theta,
        horizon,
        first_switch_ok,
        alternation_ok,
        equal_gaps_ok,
        worst_first_switch_excess,
        worst_gap_deviation,
        passed: first_switch_ok && alternation_ok && equal_gaps_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn north_is_immediate() {
        let p = NormalizedParams::symmetric(0.25).unwrap();
        let r = min_time_bracket(&BlochPoint::N, &p, 0.01, 0.02).unwrap();
        assert_eq!((r.t_lo, r.t_hi, r.t_lower), (0.0, 0.0, 0.0));
    }

    #[test]
    fn budget() {
        let p = NormalizedParams::symmetric(0.25).unwrap();
        let e = min_time_brackets(&[BlochPoint::S], &p, &OracleOptions { max_steps: 3, ..OracleOptions::new(0.05, 0.05) });
        assert_eq!(e.unwrap_err(), Error::BudgetExceeded(3));
    }
}
