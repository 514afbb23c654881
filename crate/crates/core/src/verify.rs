//! Seeded self-check suites, exposed through `bloch-synth verify`.
//!
//! Each suite is a list of named checks evaluated on fixed grids plus a few
//! seeded random samples; every check must pass for the suite to pass.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI, TAU};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::adjoint::{extremal_from_theta, initial_switching, non_connection_margin};
use crate::bloch::BlochPoint;
use crate::control::{Bang, Control};
use crate::dynamics::{generator, propagator, rk4, rot_x1};
use crate::error::{Error, Result};
use crate::oracle::verify_bb_structure;
use crate::params::NormalizedParams;
use crate::suboptimal::{circle_optimal, compare, s2_schedule, unit_energy_params};
use crate::switching::{
    first_switch_of_theta, interbang_duration, s_max, theta_of_alpha, v_general_closed_form, v_pi4_closed_form,
    v_taylor,
};
use crate::synthesis::{
    extremal_front, mbar, mbar_taylor, refraction_test, s_grid, solve_synthesis, spin_flip_time, switching_curve,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Invariants,
    Switching,
    Synthesis,
    Appendix,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "invariants" => Ok(Suite::Invariants),
            "switching" => Ok(Suite::Switching),
            "synthesis" => Ok(Suite::Synthesis),
            "appendix" => Ok(Suite::Appendix),
            "all" => Ok(Suite::All),
            other => Err(Error::InvalidArgument(format!("unknown suite '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "suite": self.suite,
            "seed": self.seed,
            "passed": self.passed(),
            "checks": self.checks,
        })
    }
}

struct Ctx {
    suite: Suite,
    checks: Vec<Check>,
}

impl Ctx {
    fn check(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(Check { suite: self.suite, name: name.into(), passed, detail });
    }

    /// `value ≤ bound`, reporting the value.
    fn below(&mut self, name: &str, value: f64, bound: f64) {
        self.check(name, value <= bound, format!("{value:.3e} <= {bound:.1e}"));
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> Result<VerifyReport> {
    let suites = match suite {
        Suite::All => vec![Suite::Invariants, Suite::Switching, Suite::Synthesis, Suite::Appendix],
        s => vec![s],
    };
    let mut checks = Vec::new();
    for s in suites {
        // Each suite gets its own stream so that suites are reproducible alone.
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (s as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let mut ctx = Ctx { suite: s, checks: Vec::new() };
        match s {
            Suite::Invariants => invariants(&mut ctx, &mut rng)?,
            Suite::Switching => switching(&mut ctx, &mut rng)?,
            Suite::Synthesis => synthesis(&mut ctx, &mut rng)?,
            Suite::Appendix => appendix(&mut ctx)?,
            Suite::All => unreachable!(),
        }
        checks.extend(ctx.checks);
    }
    Ok(VerifyReport { suite, seed, checks })
}

fn random_params(rng: &mut ChaCha8Rng) -> Result<NormalizedParams> {
    let alpha = [0.1, 0.25, 0.5][rng.gen_range(0..3)];
    let beta = [FRAC_PI_8, FRAC_PI_4][rng.gen_range(0..2)];
    NormalizedParams::new(alpha, beta)
}

fn random_point(rng: &mut ChaCha8Rng) -> BlochPoint {
    let z: f64 = rng.gen_range(-1.0..1.0);
    let phi: f64 = rng.gen_range(0.0..TAU);
    let r = (1.0 - z * z).sqrt();
    BlochPoint::from_vec_unchecked(&nalgebra::Vector3::new(r * phi.cos(), r * phi.sin(), z))
}

fn invariants(ctx: &mut Ctx, rng: &mut ChaCha8Rng) -> Result<()> {
    let (mut norm, mut group, mut rev, mut rk) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let p = random_params(rng)?;
        let u = Control::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0))?;
        let x = random_point(rng).to_vec();
        let (t1, t2) = (rng.gen_range(0.0..5.0), rng.gen_range(0.0..5.0));
        let y = propagator(u, t1, &p) * x;
        norm = norm.max((y.norm() - 1.0).abs());
        let lhs = propagator(u, t1 + t2, &p) * x;
        group = group.max((lhs - propagator(u, t2, &p) * y).amax());
        rev = rev.max((propagator(u, -t1, &p) * y - x).amax());
        let g = generator(u, &p);
        rk = rk.max((rk4(x, 0.0, t1, 1e-3, |_| g) - y).amax());
    }
    ctx.below("flow preserves the sphere", norm, 1e-12);
    ctx.below("flow group property", group, 1e-12);
    ctx.below("flow reversibility", rev, 1e-12);
    ctx.below("closed-form flow matches RK4", rk, 1e-9);

    let (mut ham, mut ell, mut l0max) = (0.0f64, 0.0f64, f64::NEG_INFINITY);
    for _ in 0..40 {
        let p = random_params(rng)?;
        let theta = rng.gen_range(0.0..TAU);
        let ex = extremal_from_theta(theta, 8.0 * PI, &p)?;
        for tp in ex.sample(0.05, &p)? {
            ham = ham.max(tp.state.hamiltonian_defect().abs());
            ell = ell.max(tp.state.ellipsoid_defect(&p).abs());
        }
        l0max = l0max.max(initial_switching(theta, &p).lambda0);
    }
    ctx.below("Hamiltonian identity along extremals", ham, 1e-9);
    ctx.below("ellipsoid identity along extremals", ell, 1e-9);
    ctx.check("normal start (lambda0 < 0)", l0max < 0.0, format!("max lambda0 {l0max:.3e}"));
    Ok(())
}

/// v(s) measured on an extremal: bisect θ inside the family's quadrant until
/// the simulated first switch equals `s`, then read the next gap.
pub fn adjoint_interbang(s: f64, family: Bang, p: &NormalizedParams) -> Result<f64> {
    let lo = match family {
        Bang::MM => 0.0,
        Bang::MP => FRAC_PI_2,
        Bang::PP => PI,
        Bang::PM => 1.5 * PI,
    };
    let horizon = 4.0 * PI / p.k + 1.0;
    let first = |theta: f64| -> Result<(f64, f64)> {
        let ex = extremal_from_theta(theta, horizon, p)?;
        match (ex.switch_times.first(), ex.gaps().first()) {
            (Some(&t0), Some(&g)) => Ok((t0, g)),
            _ => Err(Error::NoSwitching),
        }
    };
    let (mut a, mut b) = (lo + 1e-9, lo + FRAC_PI_2 - 1e-9);
    let fa = first(a)?.0 - s;
    if fa * (first(b)?.0 - s) > 0.0 {
        return Err(Error::RootOutsideRange);
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (first(m)?.0 - s) * fa > 0.0 {
            a = m;
        } else {
            b = m;
        }
        if b - a < 1e-15 {
            break;
        }
    }
    Ok(first(0.5 * (a + b))?.1)
}

fn switching(ctx: &mut Ctx, rng: &mut ChaCha8Rng) -> Result<()> {
    let p = NormalizedParams::symmetric(0.25)?;
    let s = first_switch_of_theta(PI, &p)?;
    let ex = extremal_from_theta(PI, 4.0 * PI, &p)?;
    ctx.below("first switch from theta = pi equals s_max", (ex.switch_times[0] - s_max(Bang::PP, &p)).abs(), 1e-10);
    ctx.below("first-switch equation agrees with simulation", (s - ex.switch_times[0]).abs(), 1e-10);
    ctx.below("s_max reference value", (s_max(Bang::PP, &p) - 1.6023721).abs(), 1e-6);

    let mut tri = 0.0f64;
    for (alpha, beta) in [(0.1, FRAC_PI_8), (0.1, FRAC_PI_4), (0.25, FRAC_PI_8), (0.25, FRAC_PI_4)] {
        let p = NormalizedParams::new(alpha, beta)?;
        for family in Bang::ALL {
            let sm = s_max(family, &p);
            for _ in 0..3 {
                let s = rng.gen_range(0.02..0.98) * sm;
                let v1 = interbang_duration(s, family, &p)?;
                let v2 = v_general_closed_form(s, family, &p)?;
                let v3 = adjoint_interbang(s, family, &p)?;
                tri = tri.max((v1 - v2).abs()).max((v1 - v3).abs()).max((v2 - v3).abs());
            }
        }
    }
    ctx.below("v(s): trig root, closed form and adjoint agree", tri, 1e-8);

    let mut ends = 0.0f64;
    for alpha in [0.1, 0.25] {
        let p = NormalizedParams::symmetric(alpha)?;
        let sm = s_max(Bang::PP, &p);
        ends = ends
            .max((v_pi4_closed_form(0.0, &p)? - sm).abs())
            .max((v_pi4_closed_form(sm, &p)? - sm).abs());
    }
    ctx.below("v(0) = v(s_max) = s_max", ends, 1e-10);

    let mut all_ok = true;
    let mut detail = String::new();
    for beta in [FRAC_PI_4, FRAC_PI_8] {
        let p = NormalizedParams::new(0.25, beta)?;
        let r = verify_bb_structure(&p, 100, 8.0 * PI)?;
        all_ok &= r.passed;
        detail += &format!("beta {beta:.4}: gap dev {:.2e}; ", r.worst_gap_deviation);
    }
    ctx.check("bang-bang structure on 100 extremals", all_ok, detail);

    let (mut gap_lo, mut gap_hi) = (f64::INFINITY, 0.0f64);
    let mut margin = f64::INFINITY;
    for alpha in [0.1, 0.25, 0.5] {
        for beta in [FRAC_PI_8, FRAC_PI_4] {
            let p = NormalizedParams::new(alpha, beta)?;
            for i in 0..360 {
                let theta = TAU * i as f64 / 360.0;
                margin = margin.min(non_connection_margin(theta, &p));
                if i % 12 == 0 {
                    let ex = extremal_from_theta(theta, 8.0 * PI, &p)?;
                    for g in ex.gaps() {
                        gap_lo = gap_lo.min(g * p.k);
                        gap_hi = gap_hi.max(g * p.k);
                    }
                }
            }
        }
    }
    ctx.check(
        "inter-switch gaps lie in (0, pi]",
        gap_lo > 0.0 && gap_hi <= PI + 1e-12,
        format!("scaled gaps in [{gap_lo:.4}, {gap_hi:.4}]"),
    );
    ctx.check("non-connection inequality", margin > 0.0, format!("min margin {margin:.3e}"));
    Ok(())
}

fn synthesis(ctx: &mut Ctx, rng: &mut ChaCha8Rng) -> Result<()> {
    let mut mono = 0.0f64;
    for alpha in [0.05, 0.1, 0.2, 0.3, 0.4, 0.7] {
        let p = NormalizedParams::symmetric(alpha)?;
        let m = mbar(s_max(Bang::PP, &p), Bang::PP, &p)?;
        mono = mono.max((m - rot_x1(4.0 * theta_of_alpha(alpha))).amax());
    }
    ctx.below("monodromy at s_max is an x1 rotation", mono, 1e-12);

    let mut drift = 0.0f64;
    for alpha in [0.1, 0.25, 0.5] {
        let p = NormalizedParams::symmetric(alpha)?;
        let m = mbar(0.0, Bang::PP, &p)?;
        let mut x = BlochPoint::N.to_vec();
        for _ in 0..50 {
            x = m * x;
            drift = drift.max(x[0].abs());
        }
    }
    ctx.below("iterated monodromy from s = 0 stays in x1 = 0", drift, 1e-12);

    let p = NormalizedParams::symmetric(0.25)?;
    let radius = 3.0 * p.alpha;
    let (mut outside, mut outside_ok, mut inside_fail) = (0, 0, 0);
    for k in 2..=5 {
        let grid = s_grid(Bang::PP, 41, &p);
        for sample in switching_curve(k, &grid, Bang::PP, &p)? {
            let Ok(r) = refraction_test(&sample, &p) else { continue };
            if sample.point.miss_angle() > radius {
                outside += 1;
                outside_ok += r.locally_optimal as usize;
            } else {
                inside_fail += !r.locally_optimal as usize;
            }
        }
    }
    ctx.check(
        "refraction holds on C_2..C_5 outside the disk",
        outside > 0 && outside == outside_ok,
        format!("{outside_ok}/{outside} outside"),
    );
    ctx.check("refraction fails somewhere inside the disk", inside_fail > 0, format!("{inside_fail} failures inside"));

    let mut worst = 0.0f64;
    let mut lower = true;
    let mut solved = 0;
    while solved < 3 {
        let target = random_point(rng);
        if target.miss_angle() <= radius {
            continue;
        }
        let r = solve_synthesis(&target, &p, 1e-10)?;
        worst = worst.max(r.residual);
        lower &= r.total_time + 1e-12 >= target.angle_to(&BlochPoint::N);
        solved += 1;
    }
    ctx.below("synthesis reaches random targets", worst, 1e-10);
    ctx.check("synthesis time respects the great-circle bound", lower, String::new());

    let sf = spin_flip_time(&p, 240)?;
    let half = extremal_front(0.5 * sf.time, 720, &p)?;
    ctx.check(
        "front at half the spin-flip time is simple",
        !half.has_self_intersection(),
        format!("spin-flip time {:.4}, {} crossings", sf.time, half.self_intersections.len()),
    );
    let near = extremal_front(sf.time, 720, &p)?;
    ctx.check(
        "front at the spin-flip time self-intersects",
        near.has_self_intersection(),
        format!("{} crossings", near.self_intersections.len()),
    );
    Ok(())
}

fn appendix(ctx: &mut Ctx) -> Result<()> {
    // Pairs are chosen so the truncation error stays well above roundoff.
    let (mut vr_lo, mut vr_hi) = (f64::INFINITY, 0.0f64);
    let (mut mr_lo, mut mr_hi) = (f64::INFINITY, 0.0f64);
    for alpha in [0.08, 0.04] {
        let (p1, p2) = (NormalizedParams::symmetric(alpha)?, NormalizedParams::symmetric(alpha / 2.0)?);
        for j in 0..5 {
            let s = 1.5 * (j as f64 + 0.5) / 5.0;
            let e1 = (interbang_duration(s, Bang::PP, &p1)? - v_taylor(s, alpha)).abs();
            let e2 = (interbang_duration(s, Bang::PP, &p2)? - v_taylor(s, alpha / 2.0)).abs();
            vr_lo = vr_lo.min(e1 / e2);
            vr_hi = vr_hi.max(e1 / e2);
            let m1 = (mbar(s, Bang::PP, &p1)? - mbar_taylor(s, alpha)).amax();
            let m2 = (mbar(s, Bang::PP, &p2)? - mbar_taylor(s, alpha / 2.0)).amax();
            mr_lo = mr_lo.min(m1 / m2);
            mr_hi = mr_hi.max(m1 / m2);
        }
    }
    ctx.check(
        "v(s) small-angle expansion converges at fifth order",
        vr_lo >= 32.0 && vr_hi <= 128.0,
        format!("ratios in [{vr_lo:.2}, {vr_hi:.2}]"),
    );
    ctx.check(
        "monodromy small-angle expansion converges at fourth order",
        mr_lo >= 16.0 && mr_hi <= 64.0,
        format!("ratios in [{mr_lo:.2}, {mr_hi:.2}]"),
    );

    let mut miss = 0.0f64;
    for alpha in [0.05, 0.1, 0.2] {
        miss = miss.max(s2_schedule(alpha)?.miss_angle);
    }
    ctx.below("S2 lands on the south pole", miss, 1e-8);

    let c = compare(0.005)?;
    ctx.check("time ratio at alpha = 0.005", (0.77..=0.80).contains(&c.ratio), format!("ratio {:.6}", c.ratio));

    let pp = unit_energy_params(0.05)?;
    let law = circle_optimal(&pp, 0.0)?;
    let tc_err = (law.t_c - PI / (2.0 * law.m)).abs();
    let end = law.simulate(1e-3);
    ctx.below("circle law time is pi/(2M)", tc_err, 1e-15);
    ctx.below("circle law reaches the south pole", end.miss_angle(), 1e-8);

    Ok(())
}
