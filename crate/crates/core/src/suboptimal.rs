//! Saturated (S1) and de-rated exact (S2) cycle strategies, the
//! circle-bounded optimal law, and transfer-time comparison.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bloch::BlochPoint;
use crate::control::{Bang, Control, ControlSchedule};
use crate::dynamics::{endpoint, rk4, skew};
use crate::error::{Error, Result};
use crate::params::{rescale_time, NormalizedParams, PhysicalParams};
use crate::switching::theta_of_alpha;
use crate::trig::bisect;

/// Order of the bangs inside one cycle: +− → −− → −+ → ++.
pub const CYCLE: [Bang; 4] = [Bang::PM, Bang::MM, Bang::MP, Bang::PP];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    S1,
    S2,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "s1" => Ok(Strategy::S1),
            "s2" => Ok(Strategy::S2),
            _ => Err(Error::InvalidArgument(format!("unknown strategy '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyReport {
    pub strategy: Strategy,
    pub alpha: f64,
    pub n: usize,
    pub gamma: Option<f64>,
    /// Reduced α for S2.
    pub alpha_bar: Option<f64>,
    pub arc_duration: f64,
    pub transfer_time_normalized: f64,
    pub transfer_time_physical: Option<f64>,
    pub schedule: ControlSchedule,
    pub final_state: BlochPoint,
    pub miss_angle: f64,
}

impl StrategyReport {
    pub fn to_json(&self) -> serde_json::Value {
        let mut v = json!({
            "strategy": match self.strategy { Strategy::S1 => "s1", Strategy::S2 => "s2" },
            "alpha": self.alpha,
            "n": self.n,
            "arc_duration": self.arc_duration,
            "transfer_time_normalized": self.transfer_time_normalized,
            "final_state": [self.final_state.x1, self.final_state.x2, self.final_state.x3],
            "miss_angle": self.miss_angle,
        });
        if let Some(g) = self.gamma {
            v["gamma"] = json!(g);
        }
        if let Some(t) = self.transfer_time_physical {
            v["transfer_time_physical"] = json!(t);
        }
        v
    }

    /// Attaches the physical transfer time for the given parameters.
    pub fn with_physical(mut self, p: &PhysicalParams) -> Self {
        self.transfer_time_physical = Some(rescale_time(self.transfer_time_normalized, p));
        self
    }
}

/// Physical parameters with E = 1 and equal bounds that normalize to `alpha`.
pub fn unit_energy_params(alpha: f64) -> Result<PhysicalParams> {
    PhysicalParams::symmetric(1.0, alpha.tan() / 2f64.sqrt())
}

fn cycles(n: usize, start: usize, gamma: f64, d: f64) -> ControlSchedule {
    let mut s = ControlSchedule::new();
    for _ in 0..n {
        for j in 0..4 {
            let (u1, u2) = CYCLE[(start + j) % 4].signs();
            s.push(Control { u1: gamma * u1, u2: gamma * u2 }, d).expect("valid arc");
        }
    }
    s
}

pub fn s1_cycle_count(alpha: f64) -> usize {
    (PI / (4.0 * 2f64.sqrt() * alpha)).ceil() as usize
}

/// n saturated cycles with arcs of exactly π/2.
pub fn s1_schedule(alpha: f64) -> Result<StrategyReport> {
    s1_schedule_rotated(alpha, 0)
}

/// S1 starting at a cyclic permutation of the cycle.
pub fn s1_schedule_rotated(alpha: f64, start: usize) -> Result<StrategyReport> {
    let p = NormalizedParams::symmetric(alpha)?;
    let n = s1_cycle_count(alpha);
    let schedule = cycles(n, start, 1.0, FRAC_PI_2);
    let final_state = endpoint(&BlochPoint::N, &schedule, &p);
    Ok(StrategyReport {
        strategy: Strategy::S1,
        alpha,
        n,
        gamma: None,
        alpha_bar: None,
        arc_duration: FRAC_PI_2,
        transfer_time_normalized: schedule.total_duration(),
        transfer_time_physical: Some(rescale_time(schedule.total_duration(), &unit_energy_params(alpha)?)),
        final_state,
        miss_angle: final_state.miss_angle(),
        schedule,
    })
}

/// n de-rated cycles that land exactly on S. Controls are scaled by
/// γ = tan ᾱ / tan α so the arcs are those of the system at ᾱ, slowed by
/// cos ᾱ / cos α.
pub fn s2_schedule(alpha: f64) -> Result<StrategyReport> {
    let p = NormalizedParams::symmetric(alpha)?;
    let n = (PI / (4.0 * theta_of_alpha(alpha).abs())).ceil() as usize;
    let g = |b: f64| 4.0 * n as f64 * theta_of_alpha(b).abs() - PI;
    let lo = alpha * 1e-12;
    let (glo, ghi) = (g(lo), g(alpha));
    if !(glo < 0.0 && ghi >= 0.0) {
        return Err(Error::SolveFailed);
    }
    let alpha_bar = if ghi == 0.0 { alpha } else { bisect(&g, lo, alpha, glo, 1e-14 * alpha) };
    let gamma = (alpha_bar.tan() / alpha.tan()).min(1.0);
    let (sb, cb) = alpha_bar.sin_cos();
    let d = (-sb * sb / (1.0 + cb * cb)).acos() * cb / alpha.cos();
    let schedule = cycles(n, 0, gamma, d);
    let final_state = endpoint(&BlochPoint::N, &schedule, &p);
    Ok(StrategyReport {
        strategy: Strategy::S2,
        alpha,
        n,
        gamma: Some(gamma),
        alpha_bar: Some(alpha_bar),
        arc_duration: d,
        transfer_time_normalized: schedule.total_duration(),
        transfer_time_physical: Some(rescale_time(schedule.total_duration(), &unit_energy_params(alpha)?)),
        final_state,
        miss_angle: final_state.miss_angle(),
        schedule,
    })
}

pub fn strategy_report(strategy: Strategy, alpha: f64) -> Result<StrategyReport> {
    match strategy {
        Strategy::S1 => s1_schedule(alpha),
        Strategy::S2 => s2_schedule(alpha),
    }
}

/// Fields of constant amplitude M rotating at ω_r = 2E:
/// Ω1 = M sin(ω_r t + φ), Ω2 = M cos(ω_r t + φ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleLaw {
    pub e: f64,
    pub m: f64,
    pub omega_r: f64,
    pub phase: f64,
    /// Transfer time π/(2M), physical units.
    pub t_c: f64,
}

impl CircleLaw {
    pub fn fields(&self, t: f64) -> (f64, f64) {
        let (s, c) = (self.omega_r * t + self.phase).sin_cos();
        (self.m * s, self.m * c)
    }

    pub fn control(&self, t: f64) -> Control {
        let (s, c) = (self.omega_r * t + self.phase).sin_cos();
        Control { u1: s, u2: c }
    }

    /// Generator in physical time: rotation vector (2Ω1, −2Ω2, 2E).
    pub fn generator(&self, t: f64) -> Matrix3<f64> {
        let (o1, o2) = self.fields(t);
        skew(&nalgebra::Vector3::new(2.0 * o1, -2.0 * o2, 2.0 * self.e))
    }

    /// RK4 integration from N over [0, t_c].
    pub fn simulate(&self, h: f64) -> BlochPoint {
        let x = rk4(BlochPoint::N.to_vec(), 0.0, self.t_c, h, |t| self.generator(t));
        BlochPoint::from_vec_unchecked(&x)
    }
}

pub fn circle_optimal(p: &PhysicalParams, phase: f64) -> Result<CircleLaw> {
    if (p.m1 - p.m2).abs() > 1e-12 * p.m1.max(p.m2) || !(p.m1 > 0.0) {
        return Err(Error::InvalidArgument("circle law needs M1 = M2 > 0".into()));
    }
    Ok(CircleLaw { e: p.e, m: p.m1, omega_r: 2.0 * p.e, phase, t_c: PI / (2.0 * p.m1) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub alpha: f64,
    pub strategy: Strategy,
    pub m: f64,
    pub t_s: f64,
    pub t_c: f64,
    pub ratio: f64,
}

impl Comparison {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "alpha": self.alpha,
            "strategy": match self.strategy { Strategy::S1 => "s1", Strategy::S2 => "s2" },
            "M": self.m,
            "t_s": self.t_s,
            "t_c": self.t_c,
            "ratio": self.ratio,
            "pi_over_4": FRAC_PI_4,
        })
    }
}

/// T_S / T_C with E = 1 and M = tan α / √2, T_S from the S1 schedule.
pub fn compare(alpha: f64) -> Result<Comparison> {
    compare_with(alpha, Strategy::S1)
}

pub fn compare_with(alpha: f64, strategy: Strategy) -> Result<Comparison> {
    let phys = unit_energy_params(alpha)?;
    let r = strategy_report(strategy, alpha)?;
    let t_s = rescale_time(r.transfer_time_normalized, &phys);
    let t_c = PI / (2.0 * phys.m1);
    Ok(Comparison { alpha, strategy, m: phys.m1, t_s, t_c, ratio: t_s / t_c })
}
