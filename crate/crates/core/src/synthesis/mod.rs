//! Extremal families, monodromy, switching curves, fronts, singular loci and
//! the target solver.

mod curves;
mod extremal;
mod front;
mod loci;
mod monodromy;
mod solve;

pub use curves::{curve_point, curves_csv, refraction_test, s_grid, switching_curve, Refraction, SwitchCurveSample};
pub use extremal::{extremal_point, ExtremalFamily, ExtremalSpec};
pub use front::{extremal_front, spin_flip_time, Front, FrontSample, SpinFlip};
pub use loci::{singular_loci, SingularLocus};
pub use monodromy::{mbar, mbar_taylor, mbar_with_v};
pub use solve::{solve_synthesis, solve_synthesis_with, SynthesisOptions, SynthesisResult};
