use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::bloch::BlochPoint;
use crate::control::{Bang, ControlSchedule};
use crate::dynamics::{apply, bang_propagator};
use crate::error::{Error, Result};
use crate::params::NormalizedParams;
use crate::switching::{interbang_duration, s_max};

/// Address of a point on an extremal of the (family, s) parametrization.
///
/// `phase == 0` means the point is still on the first arc; otherwise
/// `total_time = s + (4n + phase − 1)·v(s) + leftover` with `leftover < v(s)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremalSpec {
    pub family: Bang,
    pub s: f64,
    pub n: usize,
    pub phase: u8,
    pub leftover: f64,
    pub total_time: f64,
}

impl ExtremalSpec {
    pub fn locate(family: Bang, s: f64, v: f64, t: f64) -> Self {
        if t <= s {
            return Self { family, s, n: 0, phase: 0, leftover: t, total_time: t };
        }
        let tau = t - s;
        let mut blocks = (tau / v).floor() as usize;
        let mut leftover = tau - blocks as f64 * v;
        if leftover < 0.0 {
            blocks -= 1;
            leftover += v;
        }
        Self { family, s, n: blocks / 4, phase: (blocks % 4) as u8 + 1, leftover, total_time: t }
    }

    /// Count of switchings strictly before `total_time`.
    pub fn switch_count(&self) -> usize {
        if self.phase == 0 {
            0
        } else {
            4 * self.n + self.phase as usize
        }
    }
}

/// The first arc, the monodromy and the interior duration of one extremal.
#[derive(Debug, Clone, Copy)]
pub struct ExtremalFamily {
    pub family: Bang,
    pub s: f64,
    pub v: f64,
    pub first: Matrix3<f64>,
    pub mbar: Matrix3<f64>,
}

impl ExtremalFamily {
    pub fn new(family: Bang, s: f64, p: &NormalizedParams) -> Result<Self> {
        let smax = s_max(family, p);
        if !(s >= 0.0 && s <= smax * (1.0 + 1e-12)) {
            return Err(Error::InvalidArgument(format!("s={s} outside [0, {smax}]")));
        }
        let v = interbang_duration(s, family, p)?;
        Ok(Self::with_v(family, s, v, p))
    }

    pub fn with_v(family: Bang, s: f64, v: f64, p: &NormalizedParams) -> Self {
        Self {
            family,
            s,
            v,
            first: bang_propagator(family, s, p),
            mbar: super::mbar_with_v(v, family, p),
        }
    }

    /// Ξ(t, s) with n monodromy blocks applied as a matrix power.
    pub fn point(&self, t: f64, p: &NormalizedParams) -> BlochPoint {
        let spec = ExtremalSpec::locate(self.family, self.s, self.v, t);
        if spec.phase == 0 {
            return apply(&bang_propagator(self.family, t, p), &BlochPoint::N);
        }
        let mut x = self.first * BlochPoint::N.to_vec();
        for _ in 0..spec.n {
            x = self.mbar * x;
        }
        let full = spec.phase as usize - 1;
        for j in 1..=full {
            x = bang_propagator(self.family.advance(j), self.v, p) * x;
        }
        x = bang_propagator(self.family.advance(full + 1), spec.leftover, p) * x;
        BlochPoint::from_vec_unchecked(&x)
    }

    /// The equivalent arc-by-arc schedule up to `t`.
    pub fn schedule(&self, t: f64) -> ControlSchedule {
        let mut sched = ControlSchedule::new();
        let spec = ExtremalSpec::locate(self.family, self.s, self.v, t);
        let push = |sched: &mut ControlSchedule, b: Bang, d: f64| {
            sched.push_bang(b, d.max(0.0)).expect("valid bang arc");
        };
        if spec.phase == 0 {
            push(&mut sched, self.family, t);
            return sched;
        }
        push(&mut sched, self.family, self.s);
        let full = 4 * spec.n + spec.phase as usize - 1;
        for j in 1..=full {
            push(&mut sched, self.family.advance(j), self.v);
        }
        push(&mut sched, self.family.advance(full + 1), spec.leftover);
        sched
    }

    pub fn switch_times(&self, t: f64) -> Vec<f64> {
        let spec = ExtremalSpec::locate(self.family, self.s, self.v, t);
        (0..spec.switch_count()).map(|j| self.s + j as f64 * self.v).collect()
    }
}

/// Ξ(t, s): endpoint at time `t` of the extremal of `family` whose first arc lasts `s`.
pub fn extremal_point(t: f64, family: Bang, s: f64, p: &NormalizedParams) -> Result<BlochPoint> {
    if !(t >= 0.0) {
        return Err(Error::InvalidDuration(t));
    }
    Ok(ExtremalFamily::new(family, s, p)?.point(t, p))
}
