use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical Hamiltonian parameters: energy half-gap and the two field bounds,
/// all in rad/time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub e: f64,
    pub m1: f64,
    pub m2: f64,
}

impl PhysicalParams {
    pub fn new(e: f64, m1: f64, m2: f64) -> Result<Self> {
        if !(e > 0.0) || !e.is_finite() {
            return Err(Error::NonPositiveE(e));
        }
        if !(m1 >= 0.0 && m2 >= 0.0) || m1 + m2 <= 0.0 || !(m1 + m2).is_finite() {
            return Err(Error::InvalidBounds { m1, m2 });
        }
        Ok(Self { e, m1, m2 })
    }

    /// Symmetric bounds M1 = M2 = M.
    pub fn symmetric(e: f64, m: f64) -> Result<Self> {
        Self::new(e, m, m)
    }

    /// 2·sqrt(E² + M1² + M2²).
    pub fn k(&self) -> f64 {
        2.0 * (self.e * self.e + self.m1 * self.m1 + self.m2 * self.m2).sqrt()
    }
}

/// Normalized parameters of the control system. `k` scales every generator;
/// the normalized system uses `k = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizedParams {
    pub alpha: f64,
    pub beta: f64,
    pub k: f64,
}

impl NormalizedParams {
    /// Validated constructor with `k = 1`.
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        Self::with_k(alpha, beta, 1.0)
    }

    pub fn with_k(alpha: f64, beta: f64, k: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < FRAC_PI_4) {
            return Err(Error::AlphaOutOfRange(alpha));
        }
        // tolerate the usual decimal spellings of pi/4 on the boundary
        if !(beta > 0.0 && beta <= FRAC_PI_4 + 1e-9) {
            return Err(Error::BetaOutOfRange(beta));
        }
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::InvalidArgument(format!("k must be positive, got {k}")));
        }
        Ok(Self { alpha, beta: beta.min(FRAC_PI_4), k })
    }

    /// Equal bounds on both fields.
    pub fn symmetric(alpha: f64) -> Result<Self> {
        Self::new(alpha, FRAC_PI_4)
    }

    pub fn is_quarter_pi(&self) -> bool {
        (self.beta - FRAC_PI_4).abs() <= 1e-9
    }
}

/// alpha = arctan(sqrt(M1²+M2²)/E), beta = arctan(M1/M2), k = 2 sqrt(E²+M1²+M2²).
pub fn normalize_params(p: &PhysicalParams) -> Result<NormalizedParams> {
    let p = PhysicalParams::new(p.e, p.m1, p.m2)?;
    let alpha = (p.m1.hypot(p.m2) / p.e).atan();
    if alpha >= FRAC_PI_4 {
        return Err(Error::AlphaOutOfRange(alpha));
    }
    let beta = p.m1.atan2(p.m2);
    NormalizedParams::with_k(alpha, beta, p.k())
}

/// Converts a normalized duration into physical time.
pub fn rescale_time(t_normalized: f64, p: &PhysicalParams) -> f64 {
    t_normalized / p.k()
}
