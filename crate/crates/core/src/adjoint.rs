//! Switching functions along bang-bang extremals.

use std::fmt::Write as _;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::bloch::BlochPoint;
use crate::control::{Bang, Control, ControlSchedule};
use crate::dynamics::{self, fmt17};
use crate::error::{Error, Result};
use crate::params::NormalizedParams;
use crate::trig::TrigForm;

/// Tolerance under which a switching function counts as exactly zero when
/// choosing the initial control.
const ZERO_TOL: f64 = 1e-12;
/// Relative tolerance for rejecting tangential zeros.
const TANGENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchingState {
    pub phi0: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub lambda0: f64,
}

impl SwitchingState {
    pub fn phi(&self) -> Vector3<f64> {
        Vector3::new(self.phi0, self.phi1, self.phi2)
    }

    fn with_phi(&self, v: Vector3<f64>) -> Self {
        Self { phi0: v[0], phi1: v[1], phi2: v[2], lambda0: self.lambda0 }
    }

    /// `φ0 + |φ1| + |φ2| + λ0`, zero along bang-bang extremals.
    pub fn hamiltonian_defect(&self) -> f64 {
        self.phi0 + self.phi1.abs() + self.phi2.abs() + self.lambda0
    }

    /// Deviation of the conserved ellipsoid from 1.
    pub fn ellipsoid_defect(&self, p: &NormalizedParams) -> f64 {
        let (sa, ca) = p.alpha.sin_cos();
        let (sb, cb) = p.beta.sin_cos();
        let k2 = p.k * p.k;
        self.phi0 * self.phi0 / (k2 * ca * ca)
            + self.phi1 * self.phi1 / (k2 * sa * sa * sb * sb)
            + self.phi2 * self.phi2 / (k2 * sa * sa * cb * cb)
            - 1.0
    }
}

/// λ(0) = (cos θ, sin θ, 0).
pub fn initial_switching(theta: f64, p: &NormalizedParams) -> SwitchingState {
    let (sa, _) = p.alpha.sin_cos();
    let (sb, cb) = p.beta.sin_cos();
    let (st, ct) = theta.sin_cos();
    let phi1 = -p.k * sa * sb * st;
    let phi2 = -p.k * sa * cb * ct;
    SwitchingState { phi0: 0.0, phi1, phi2, lambda0: -(phi1.abs() + phi2.abs()) }
}

/// `(a1, a2, a3)` with `a1·a2 + a1·a3 + a2·a3 = 1`.
pub fn p_coefficients(p: &NormalizedParams) -> (f64, f64, f64) {
    let (sa, ca) = p.alpha.sin_cos();
    let (sb, cb) = p.beta.sin_cos();
    let ta = sa / ca;
    (ca * cb / sb, ca * sb / cb, ca * ta * ta * sb * cb)
}

/// Matrix driving `(φ0, φ1, φ2)' = P(u)·(φ0, φ1, φ2)`.
pub fn p_matrix(u: Control, p: &NormalizedParams) -> Matrix3<f64> {
    let (a1, a2, a3) = p_coefficients(p);
    let (u1, u2) = (u.u1, u.u2);
    p.k * Matrix3::new(
        0.0, u2 * a1, -u1 * a2, //
        -u2 * a3, 0.0, a2, //
        u1 * a3, -a1, 0.0,
    )
}

/// Columns of Q(u) block-diagonalize P(u) into a unit rotation about the first axis.
pub fn q_matrix(b: Bang, p: &NormalizedParams) -> Matrix3<f64> {
    let (a1, a2, a3) = p_coefficients(p);
    let (u1, u2) = b.signs();
    let s = a1 + a3;
    Matrix3::new(
        a2 / (u2 * a3), -u2 * a1 / s, -u1 / s, //
        u1 * a2 / (u2 * a1), -u1 * u2 * a3 / s, 1.0 / s, //
        1.0, 1.0, 0.0,
    )
}

pub fn q_inverse(b: Bang, p: &NormalizedParams) -> Matrix3<f64> {
    let (a1, a2, a3) = p_coefficients(p);
    let (u1, u2) = b.signs();
    Matrix3::new(
        u2 * a1 * a3, u1 * u2 * a1 * a3, a1 * a3, //
        -u2 * a1 * a3, -u1 * u2 * a1 * a3, a2 * (a1 + a3), //
        -u1 * a3, a1, 0.0,
    )
}

fn block_rotation(t: f64) -> Matrix3<f64> {
    let (s, c) = t.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

/// Exact propagation along a bang: `Q·R(t)·Q⁻¹·φ`.
pub fn propagate_switching(s0: &SwitchingState, b: Bang, t: f64, p: &NormalizedParams) -> SwitchingState {
    let m = q_matrix(b, p) * block_rotation(p.k * t) * q_inverse(b, p);
    s0.with_phi(m * s0.phi())
}

/// Each φ_i along a bang as a trigonometric polynomial in the angle `k·t`.
pub fn switching_forms(s0: &SwitchingState, b: Bang, p: &NormalizedParams) -> [TrigForm; 3] {
    let q = q_matrix(b, p);
    let c = q_inverse(b, p) * s0.phi();
    std::array::from_fn(|i| {
        TrigForm::new(
            q[(i, 1)] * c[1] + q[(i, 2)] * c[2],
            -q[(i, 1)] * c[2] + q[(i, 2)] * c[1],
            q[(i, 0)] * c[0],
        )
    })
}

/// Time until the next sign change of `u_i·φ_i`, and which `i` it is.
pub fn next_switching_time(s0: &SwitchingState, b: Bang, p: &NormalizedParams) -> Result<(f64, u8)> {
    let forms = switching_forms(s0, b, p);
    let (u1, u2) = b.signs();
    let mut best: Option<(f64, u8)> = None;
    for (i, u) in [(1u8, u1), (2u8, u2)] {
        let f = forms[i as usize];
        let g = TrigForm::new(u * f.a, u * f.b, u * f.c);
        if let Some(t) = g.first_down_crossing(TANGENT_TOL) {
            if best.map_or(true, |(bt, _)| t < bt) {
                best = Some((t, i));
            }
        }
    }
    best.map(|(t, i)| (t / p.k, i)).ok_or(Error::NoSwitching)
}

/// Bang selected by the maximum principle at the start of an arc. A vanishing
/// φ_i takes the sign of its derivative.
pub fn initial_control(s0: &SwitchingState, p: &NormalizedParams) -> Result<Bang> {
    let (sa, _) = p.alpha.sin_cos();
    let (sb, cb) = p.beta.sin_cos();
    let z1 = s0.phi1.abs() <= ZERO_TOL * p.k * sa * sb;
    let z2 = s0.phi2.abs() <= ZERO_TOL * p.k * sa * cb;
    let (a1, a2, a3) = p_coefficients(p);
    let (u1, u2) = match (z1, z2) {
        (true, true) => return Err(Error::DegenerateCovector),
        (false, false) => (s0.phi1.signum(), s0.phi2.signum()),
        (true, false) => {
            let u2 = s0.phi2.signum();
            ((-u2 * a3 * s0.phi0 + a2 * s0.phi2).signum(), u2)
        }
        (false, true) => {
            let u1 = s0.phi1.signum();
            (u1, (u1 * a3 * s0.phi0 - a1 * s0.phi1).signum())
        }
    };
    Ok(Bang::from_signs(u1, u2))
}

/// Margin of the non-connection inequality `1 − λ0² − sin²α cos²β > sin²α sin²β`.
pub fn non_connection_margin(theta: f64, p: &NormalizedParams) -> f64 {
    let s = initial_switching(theta, p);
    let l0 = s.lambda0 / p.k;
    let (sa, _) = p.alpha.sin_cos();
    let (sb, cb) = p.beta.sin_cos();
    (1.0 - l0 * l0 - sa * sa * cb * cb) - sa * sa * sb * sb
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceEvent {
    None,
    Swi1,
    Swi2,
}

impl TraceEvent {
    pub fn name(self) -> &'static str {
        match self {
            TraceEvent::None => "none",
            TraceEvent::Swi1 => "swi1",
            TraceEvent::Swi2 => "swi2",
        }
    }

    fn from_index(i: u8) -> Self {
        if i == 1 {
            TraceEvent::Swi1
        } else {
            TraceEvent::Swi2
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub t: f64,
    pub state: SwitchingState,
    pub event: TraceEvent,
}

/// A normal bang-bang extremal generated by forward integration of the
/// maximum principle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extremal {
    pub theta: f64,
    pub horizon: f64,
    pub schedule: ControlSchedule,
    /// Bang of each arc, parallel to `schedule.arcs()`.
    pub bangs: Vec<Bang>,
    pub switch_times: Vec<f64>,
    pub switch_indices: Vec<u8>,
    /// Initial state, every switching, and the state at the horizon.
    pub trace: Vec<TracePoint>,
}

impl Extremal {
    pub fn family(&self) -> Bang {
        self.bangs[0]
    }

    pub fn initial_state(&self) -> SwitchingState {
        self.trace[0].state
    }

    /// Differences of consecutive switching times.
    pub fn gaps(&self) -> Vec<f64> {
        self.switch_times.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Switching functions sampled every `dt` (plus every switching), each
    /// obtained by exact propagation from the arc start.
    pub fn sample(&self, dt: f64, p: &NormalizedParams) -> Result<Vec<TracePoint>> {
        if !(dt > 0.0) {
            return Err(Error::InvalidStep(dt));
        }
        let mut out = vec![self.trace[0]];
        let mut t0 = 0.0;
        for (j, arc) in self.schedule.arcs().iter().enumerate() {
            let start = self.trace[j].state;
            let b = self.bangs[j];
            let mut i = 1usize;
            while (i as f64) * dt < arc.duration - 1e-12 {
                let tau = i as f64 * dt;
                out.push(TracePoint {
                    t: t0 + tau,
                    state: propagate_switching(&start, b, tau, p),
                    event: TraceEvent::None,
                });
                i += 1;
            }
            t0 += arc.duration;
            out.push(self.trace[j + 1]);
        }
        Ok(out)
    }

    pub fn trace_csv(&self, dt: f64, p: &NormalizedParams) -> Result<String> {
        let mut out = String::from("t,phi0,phi1,phi2,event\n");
        for tp in self.sample(dt, p)? {
            let s = tp.state;
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt17(tp.t),
                fmt17(s.phi0),
                fmt17(s.phi1),
                fmt17(s.phi2),
                tp.event.name()
            );
        }
        Ok(out)
    }

    /// State at time `t ∈ [0, horizon]` along the extremal.
    pub fn point_at(&self, t: f64, p: &NormalizedParams) -> BlochPoint {
        let mut x = BlochPoint::N.to_vec();
        let mut left = t;
        for arc in self.schedule.arcs() {
            let d = arc.duration.min(left);
            x = dynamics::propagator(arc.control, d, p) * x;
            left -= d;
            if left <= 0.0 {
                break;
            }
        }
        BlochPoint::from_vec_unchecked(&x)
    }

    pub fn endpoint(&self, p: &NormalizedParams) -> BlochPoint {
        dynamics::endpoint(&BlochPoint::N, &self.schedule, p)
    }
}

/// Builds the extremal with λ(0) = (cos θ, sin θ, 0) up to `horizon`.
pub fn extremal_from_theta(theta: f64, horizon: f64, p: &NormalizedParams) -> Result<Extremal> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::InvalidDuration(horizon));
    }
    let mut state = initial_switching(theta, p);
    let mut b = initial_control(&state, p)?;
    let mut ex = Extremal {
        theta,
        horizon,
        schedule: ControlSchedule::new(),
        bangs: Vec::new(),
        switch_times: Vec::new(),
        switch_indices: Vec::new(),
        trace: vec![TracePoint { t: 0.0, state, event: TraceEvent::None }],
    };
    let mut t = 0.0;
    loop {
        let (dt, idx) = next_switching_time(&state, b, p)?;
        let last = t + dt >= horizon;
        let d = if last { horizon - t } else { dt };
        state = propagate_switching(&state, b, d, p);
        ex.schedule.push_bang(b, d)?;
        ex.bangs.push(b);
        if last {
            ex.trace.push(TracePoint { t: horizon, state, event: TraceEvent::None });
            break;
        }
        t += dt;
        ex.switch_times.push(t);
        ex.switch_indices.push(idx);
        ex.trace.push(TracePoint { t, state, event: TraceEvent::from_index(idx) });
        b = if idx == 1 {
            let (u1, u2) = b.signs();
            Bang::from_signs(-u1, u2)
        } else {
            let (u1, u2) = b.signs();
            Bang::from_signs(u1, -u2)
        };
    }
    Ok(ex)
}
