//! `a·cos t + b·sin t + c` and root finding on it.

use std::f64::consts::TAU;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigForm {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl TrigForm {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        Self { a, b, c }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (s, c) = t.sin_cos();
        self.a * c + self.b * s + self.c
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let (s, c) = t.sin_cos();
        -self.a * s + self.b * c
    }

    /// Smallest `t ∈ (0, 2π]` where the function crosses zero going down.
    /// Tangential contacts (`R − |c| ≤ tol·R`) are not crossings.
    pub fn first_down_crossing(&self, tol: f64) -> Option<f64> {
        let r = self.a.hypot(self.b);
        if r == 0.0 || self.c.abs() >= r * (1.0 - tol) {
            return None;
        }
        // f = R cos(t − δ) + c, decreasing through zero at t − δ = +w
        let delta = self.b.atan2(self.a);
        let w = (-self.c / r).acos();
        let mut t = (delta + w).rem_euclid(TAU);
        if t <= 0.0 {
            t = TAU;
        }
        Some(t)
    }
}

/// First sign change of `f` on `[lo, hi]` located with `probes` uniform
/// samples, refined by bisection to `tol`. An exact zero at a probe counts.
pub fn first_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, probes: usize, tol: f64) -> Option<f64> {
    let h = (hi - lo) / probes as f64;
    let mut x0 = lo;
    let mut f0 = f(x0);
    if f0 == 0.0 {
        return Some(x0);
    }
    for i in 1..=probes {
        let x1 = if i == probes { hi } else { lo + h * i as f64 };
        let f1 = f(x1);
        if f1 == 0.0 {
            return Some(x1);
        }
        if f0.signum() != f1.signum() {
            return Some(bisect(&f, x0, x1, f0, tol));
        }
        x0 = x1;
        f0 = f1;
    }
    None
}

pub fn bisect<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, mut fa: f64, tol: f64) -> f64 {
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Clamps an arccos argument that drifted at most `tol` outside [−1, 1].
pub fn checked_acos(x: f64, tol: f64) -> Option<f64> {
    if x.is_nan() || x.abs() > 1.0 + tol {
        None
    } else {
        Some(x.clamp(-1.0, 1.0).acos())
    }
}

/// Wraps an angle into [0, 2π).
pub fn wrap_angle(t: f64) -> f64 {
    let w = t.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn down_crossing() {
        // cos t crosses downward at pi/2
        let f = TrigForm::new(1.0, 0.0, 0.0);
        assert!((f.first_down_crossing(1e-12).unwrap() - PI / 2.0).abs() < 1e-15);
        // sin t: upward at 0, downward at pi
        let f = TrigForm::new(0.0, 1.0, 0.0);
        assert!((f.first_down_crossing(1e-12).unwrap() - PI).abs() < 1e-15);
        // tangent and root-free
        assert!(TrigForm::new(1.0, 0.0, 1.0).first_down_crossing(1e-12).is_none());
        assert!(TrigForm::new(1.0, 0.0, 2.0).first_down_crossing(1e-12).is_none());
    }

    #[test]
    fn bracketing() {
        let r = first_root(|x| x.cos(), 0.0, PI, 256, 1e-14).unwrap();
        assert!((r - PI / 2.0).abs() < 1e-14);
        assert!(first_root(|x| x.cos() + 2.0, 0.0, PI, 256, 1e-14).is_none());
    }
}
