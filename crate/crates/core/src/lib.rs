//! Time-optimal control synthesis for a spin-1/2 particle on the Bloch sphere
//! driven by two independently bounded fields.
//!
//! The normalized system is `ẋ = (F + u1·G1 + u2·G2)·x` with `|u_i| ≤ 1`,
//! parametrized by the angles `α` (field strength relative to the energy gap)
//! and `β` (ratio of the two bounds).

pub mod adjoint;
pub mod bloch;
pub mod control;
pub mod dynamics;
pub mod error;
pub mod oracle;
pub mod params;
pub mod sphere;
pub mod suboptimal;
pub mod switching;
pub mod synthesis;
pub mod trig;
pub mod verify;

pub use bloch::{hopf_project, BlochPoint};
pub use control::{Arc, Bang, Control, ControlSchedule, FamilyTag};
pub use error::{Error, Result};
pub use params::{normalize_params, rescale_time, NormalizedParams, PhysicalParams};
