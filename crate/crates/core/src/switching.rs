//! Closed-form switching times: s_max, the first switching s(θ), the
//! inter-switching duration v(s), θ(α) and the small-α expansions.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::control::Bang;
use crate::error::{Error, Result};
use crate::params::NormalizedParams;
use crate::trig::{checked_acos, first_root};

const PROBES: usize = 256;
const BISECT_TOL: f64 = 1e-14;
const ACOS_TOL: f64 = 1e-9;

/// β of the branch a family lives on: PM/MP are the PP/MM formulas with β → π/2 − β.
fn branch_beta(family: Bang, beta: f64) -> f64 {
    if family.uses_beta_branch() {
        beta
    } else {
        FRAC_PI_2 - beta
    }
}

/// Longest possible first bang arc of a family.
pub fn s_max(family: Bang, p: &NormalizedParams) -> f64 {
    let sa2 = p.alpha.sin().powi(2);
    let c2 = branch_beta(family, p.beta).cos().powi(2);
    (-sa2 * c2 / (1.0 - sa2 * c2)).acos() / p.k
}

/// Family whose initial bang a covector angle selects.
pub fn family_of_theta(theta: f64) -> Bang {
    let t = theta.rem_euclid(TAU);
    if t <= FRAC_PI_2 {
        Bang::MM
    } else if t < PI {
        Bang::MP
    } else if t <= 1.5 * PI {
        Bang::PP
    } else {
        Bang::PM
    }
}

/// First-switching function for the PP family, proportional to φ2(s).
pub fn f_first_switch(theta: f64, s: f64, alpha: f64, beta: f64) -> f64 {
    let sa = alpha.sin();
    let sa2 = sa * sa;
    let cb2 = beta.cos().powi(2);
    let (st, ct) = theta.sin_cos();
    let (s2b, c2b) = (2.0 * beta).sin_cos();
    let a = 2.0 * (1.0 - sa2 * cb2) / sa2 * ct - s2b * st;
    let b = 2.0 * alpha.cos() / sa2 * st;
    let c = (1.0 + c2b) * ct + s2b * st;
    a * s.cos() - b * s.sin() + c
}

/// First switching time of the extremal with covector angle θ, obtained by
/// bracketing the first-switching equation on [0, π].
pub fn first_switch_of_theta(theta: f64, p: &NormalizedParams) -> Result<f64> {
    let t = theta.rem_euclid(TAU);
    // reduce every family to PP via the x3-rotation symmetries
    let (th, beta) = match family_of_theta(t) {
        Bang::PP => (t, p.beta),
        Bang::MM => (t + PI, p.beta),
        Bang::PM => (t - FRAC_PI_2, FRAC_PI_2 - p.beta),
        Bang::MP => (t + FRAC_PI_2, FRAC_PI_2 - p.beta),
    };
    let f = |s: f64| f_first_switch(th, s, p.alpha, beta);
    // at the quadrant edge the extremal starts on a switching
    let scale = 2.0 / p.alpha.sin().powi(2);
    if f(0.0).abs() <= 1e-14 * scale {
        return Ok(0.0);
    }
    first_root(f, 0.0, PI, PROBES, BISECT_TOL).map(|s| s / p.k).ok_or(Error::NoRoot)
}

/// Coefficients (a, b, c) of `a cos v + b sin v + c = 0` on the β branch.
pub fn interbang_coefficients(s: f64, alpha: f64, beta: f64) -> (f64, f64, f64) {
    let ca = alpha.cos();
    let ta = alpha.tan();
    let (sb, cb) = beta.sin_cos();
    let (ss, cs) = s.sin_cos();
    let a = -cb * cb * cs + ca * sb * cb * ss - 1.0 / (ta * ta);
    let b = -ca * sb * cb * cs - cb * cb * ss + ca * sb * cb;
    let c = -sb * sb * cs - ca * sb * cb * ss;
    (a, b, c)
}

/// Common duration of every interior bang arc when the first arc lasts `s`.
pub fn interbang_duration(s: f64, family: Bang, p: &NormalizedParams) -> Result<f64> {
    let beta = branch_beta(family, p.beta);
    let (a, b, c) = interbang_coefficients(s * p.k, p.alpha, beta);
    let f = |v: f64| a * v.cos() + b * v.sin() + c;
    // skip v = 0 itself: (0, π] only
    let lo = PI / PROBES as f64 * 1e-6;
    match first_root(f, lo, PI, PROBES, BISECT_TOL) {
        Some(v) if v > 0.0 && v <= PI => Ok(v / p.k),
        _ => Err(Error::RootOutsideRange),
    }
}

/// `v(s)` for β = π/4 in closed form.
pub fn v_pi4_closed_form(s: f64, p: &NormalizedParams) -> Result<f64> {
    if !p.is_quarter_pi() {
        return Err(Error::BetaNotQuarterPi(p.beta));
    }
    let s = s * p.k;
    let al = p.alpha;
    let (sa, ca) = al.sin_cos();
    let s2a = (2.0 * al).sin();
    let a = 8.0 * ca * sa * sa * s.sin();
    let b = 2.0 * s2a * s2a * s.cos();
    let c = 4.0 * sa.powi(4) * (2.0 * s).cos();
    let d = s2a * s2a;
    let e = 5.0 + 2.0 * (2.0 * al).cos() + (4.0 * al).cos();
    let arg = (d - a - b - c) / (e - a + b);
    checked_acos(arg, ACOS_TOL).map(|v| v / p.k).ok_or(Error::DomainError(arg))
}

/// `v(s)` for general β from the long closed forms (v1 for PP/MM, v2 for PM/MP).
/// Verification only; [`interbang_duration`] is authoritative.
pub fn v_general_closed_form(s: f64, family: Bang, p: &NormalizedParams) -> Result<f64> {
    let s = s * p.k;
    let al = p.alpha;
    let (sa, ca) = al.sin_cos();
    let (sb, cb) = p.beta.sin_cos();
    let s2a = (2.0 * al).sin();
    let (c2a, c4a, c6a) = ((2.0 * al).cos(), (4.0 * al).cos(), (6.0 * al).cos());
    let (s2b, c2b) = (2.0 * p.beta).sin_cos();
    let (s4b, c4b) = (4.0 * p.beta).sin_cos();
    let (ss, cs) = s.sin_cos();
    let (s2s, c2s) = (2.0 * s).sin_cos();
    let sa2 = sa * sa;
    let sa4 = sa2 * sa2;
    let (a, b, c, d, e, f) = if family.uses_beta_branch() {
        (
            4.0 * sa4 * sa2 * s2b * s2b
                + 8.0 * s2a * s2a * sb * (ca * cb * ss + sb * cs)
                + 2.0 * sa4 * ((3.0 + c2a) * s2b * s2b * c2s + 2.0 * ca * s4b * s2s),
            2f64.sqrt() * sa2 * cb * (cb * ss + ca * sb * (cs - 1.0)),
            256.0 * sa2 * ca * cb * (3.0 + c2a + 2.0 * sa2 * c2b) * (ca * cb * cs - sb * ss)
                + 64.0 * sa4 * sb * sb * (((3.0 + c2a) * c2b - 2.0 * sa2) * c2s - 4.0 * ca * s2b * s2s),
            16.0 * sa2 * ca * cb * (3.0 + c2a + 2.0 * sa2 * c2b) * (sb * ss - ca * cb * cs),
            234.0 + 384.0 * sa4 * c2b - 16.0 * sa4 * c4b * (1.0 + 3.0 * c2a)
                + 205.0 * c2a
                + 70.0 * c4a
                + 3.0 * c6a,
            -17.0 - 16.0 * sa4 * c2b + c2a * (4.0 * sa4 * c4b - 39.0 / 4.0) - 5.0 * c4a - c6a / 4.0,
        )
    } else {
        (
            4.0 * sa4 * sa2 * s2b * s2b
                + 8.0 * s2a * s2a * cb * (ca * sb * ss + cb * cs)
                + 2.0 * sa4 * ((3.0 + c2a) * s2b * s2b * c2s - 2.0 * ca * s4b * s2s),
            2f64.sqrt() * sa2 * sb * (sb * ss + ca * cb * (cs - 1.0)),
            256.0 * sa2 * ca * sb * (3.0 + c2a - 2.0 * sa2 * c2b) * (ca * sb * cs - cb * ss)
                - 64.0 * sa4 * cb * cb * (((3.0 + c2a) * c2b + 2.0 * sa2) * c2s + 4.0 * ca * s2b * s2s),
            16.0 * sa2 * ca * sb * (3.0 + c2a - 2.0 * sa2 * c2b) * (cb * ss - ca * sb * cs),
            234.0 - 384.0 * sa4 * c2b - 16.0 * sa4 * c4b * (1.0 + 3.0 * c2a)
                + 205.0 * c2a
                + 70.0 * c4a
                + 3.0 * c6a,
            -17.0 + 16.0 * sa4 * c2b + c2a * (4.0 * sa4 * c4b - 39.0 / 4.0) - 5.0 * c4a - c6a / 4.0,
        )
    };
    let rad = c + e;
    if rad < 0.0 {
        return Err(Error::DomainError(rad));
    }
    let arg = (a + b * rad.sqrt()) / (d + f);
    checked_acos(arg, ACOS_TOL).map(|v| v / p.k).ok_or(Error::DomainError(arg))
}

/// Rotation angle of the monodromy at s ∈ {0, s_max}; negative.
pub fn theta_of_alpha(alpha: f64) -> f64 {
    let (sa, ca) = alpha.sin_cos();
    (-2.0 * 2f64.sqrt() * sa * ca / (1.0 + ca * ca)).asin()
}

pub fn taylor_f1(s: f64) -> f64 {
    -0.5 + s.cos() + s.sin()
}

/// Fourth-order coefficient of v(s), from the series of the closed form.
pub fn taylor_f2(s: f64) -> f64 {
    let (ss, cs) = s.sin_cos();
    ss * ss + ss / 6.0 + 2.0 / 3.0 * cs - 7.0 / 12.0
}

/// `π/2 + f1(s)·α² + f2(s)·α⁴` (β = π/4, k = 1).
pub fn v_taylor(s: f64, alpha: f64) -> f64 {
    let a2 = alpha * alpha;
    FRAC_PI_2 + taylor_f1(s) * a2 + taylor_f2(s) * a2 * a2
}
