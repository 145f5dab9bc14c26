//! Explicit three-step staggered (leap-frog) time integration for small-strain
//! elastodynamics coupled to dissipative internal variables.
//!
//! The crate is `no_std` (it needs `alloc`). It provides
//!
//! - [`integrator`]: the discretisation-agnostic scheme over abstract operators
//!   ([`SystemOps`], [`InternalProcess`], [`LoadProgram`]), with a per-step energy audit,
//! - [`cfl`]: the time-step bound estimated by Lanczos iteration on the discrete operator,
//! - [`elastic2d`]: a concrete 2D plane-strain discretisation on a uniform grid
//!   (cell-centred velocities, node-based stresses, adhesive boundary segments),
//! - [`processes`]: the null process, viscoplastic creep with isotropic hardening and
//!   adhesive delamination,
//! - [`relaxation`]: a 0D Maxwell relaxation driver used for order-of-accuracy checks.
//!
//! File formats, scenario definitions and the command-line driver live in the
//! `leapfrog-sim` companion crate.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cfl;
pub mod dof;
pub mod elastic2d;
mod error;
pub mod integrator;
pub mod load;
pub mod math;
pub mod ops;
pub mod process;
pub mod processes;
pub mod relaxation;

pub use cfl::{estimate_tau_max, CflEstimate, EstimatorConfig};
pub use dof::{DofVector, SpaceTag};
pub use error::{Error, Result};
pub use integrator::{
    average_load_f, central_difference_step, difference_load_g, energy_report, init_half_step,
    run, step, Bounds, EnergyLedger, LeapFrog, RunOutput, StaggeredState,
};
pub use load::{LoadProgram, SeparableLoad, TimeProfile};
pub use ops::SystemOps;
pub use process::InternalProcess;

/// Default CFL margin `eta` in `(0, 4)`.
pub const DEFAULT_ETA: f64 = 0.1;

/// Any field entry above this magnitude is treated as a blow-up.
pub const BLOW_UP_THRESHOLD: f64 = 1e12;
