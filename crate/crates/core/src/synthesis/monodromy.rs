use nalgebra::Matrix3;

use crate::control::Bang;
use crate::dynamics::bang_propagator;
use crate::error::Result;
use crate::params::NormalizedParams;
use crate::switching::interbang_duration;

/// Product of the four interior bang rotations of duration `v` that follow a
/// first arc of the given family; the earliest arc is rightmost.
pub fn mbar_with_v(v: f64, family: Bang, p: &NormalizedParams) -> Matrix3<f64> {
    (1..=4).fold(Matrix3::identity(), |acc, j| bang_propagator(family.advance(j), v, p) * acc)
}

/// Monodromy M̄(s): four bang arcs of duration v(s).
pub fn mbar(s: f64, family: Bang, p: &NormalizedParams) -> Result<Matrix3<f64>> {
    Ok(mbar_with_v(interbang_duration(s, family, p)?, family, p))
}

/// Small-α expansion of M̄(s) up to α⁴ (β = π/4). Note the f8 term enters the
/// (2,3)/(3,2) entries at order α³.
pub fn mbar_taylor(s: f64, alpha: f64) -> Matrix3<f64> {
    let (ss, cs) = s.sin_cos();
    let r2 = 2f64.sqrt();
    let f3 = 16.0 * ss - 16.0 * cs * ss - 16.0 + 16.0 * cs;
    let f4 = 4.0 - 4.0 * cs - 4.0 * ss;
    let f5 = -70.0 / 3.0 + 58.0 / 3.0 * cs + 64.0 / 3.0 * ss + 4.0 * cs * cs;
    let f6 = 8.0 * r2 * (-1.0 + cs + ss);
    let f7 = 112.0 / 3.0 - 16.0 * cs * ss;
    let f8 = 2.0 * r2 / 3.0 * (-34.0 + 3.0 * cs + 3.0 * ss);
    let f9 = 160.0 / 3.0 - 16.0 * ss - 16.0 * cs;
    let a = alpha;
    let (a2, a3, a4) = (a * a, a * a * a, a * a * a * a);
    let m12 = f4 * a2 + f5 * a4;
    let m23 = -4.0 * r2 * a - f8 * a3;
    Matrix3::new(
        1.0 + f3 * a4, m12, f6 * a3, //
        -m12, 1.0 - 16.0 * a2 + f7 * a4, m23, //
        f6 * a3, -m23, 1.0 - 16.0 * a2 + f9 * a4,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::rot_x1;
    use crate::switching::{s_max, theta_of_alpha};

    #[test]
    fn orthogonal() {
        let p = NormalizedParams::new(0.3, 0.5).unwrap();
        for b in Bang::ALL {
            let m = mbar(0.4, b, &p).unwrap();
            assert!((m.transpose() * m - Matrix3::identity()).amax() < 1e-13);
            assert!((m.determinant() - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn exact_at_endpoints() {
        let p = NormalizedParams::symmetric(0.25).unwrap();
        let r = rot_x1(4.0 * theta_of_alpha(0.25));
        let sm = s_max(Bang::PP, &p);
        assert!((mbar(sm, Bang::PP, &p).unwrap() - r).amax() < 1e-12);
        assert!((mbar(0.0, Bang::PP, &p).unwrap() - r).amax() < 1e-12);
    }

    #[test]
    fn near_identity_for_small_alpha() {
        let p = NormalizedParams::symmetric(1e-7).unwrap();
        assert!((mbar(0.7, Bang::PP, &p).unwrap() - Matrix3::identity()).amax() < 1e-5);
        assert_eq!(mbar_taylor(0.7, 0.0), Matrix3::identity());
    }
}
