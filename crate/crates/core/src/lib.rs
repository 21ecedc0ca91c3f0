//! Numerical kernel for admissible fronts of the Painlevé-II equation with drift,
//!
//! ```text
//! u'' + c u' - x u - u^3 = 0,   u(x) ~ sqrt(-x) as x -> -inf,   u(x) -> 0 as x -> +inf,
//! ```
//!
//! the stationary problem of the quenched Allen-Cahn equation `u_t = u_xx + c u_x - x u - u^3`.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, configuration and the
//! command line live in the `quenchfront` companion crate.
//!
//! Layout:
//! - [`specialfns`]: erf, Bessel `J_{±1/3}` and the Airy-zero constant `Ω₀`.
//! - [`grid`] / [`banded`]: uniform mesh, fourth-order stencils, banded storage and LU.
//! - [`bvp`] / [`newton`]: residual, Jacobian, boundary closures and the damped Newton solver.
//! - [`continuation`]: natural-parameter continuation in `c`.
//! - [`asymptotics`]: closed-form tail, erf-profile and front-location predictions.
//! - [`spectrum`]: leading eigenvalues of the linearization.
//! - [`evolve`]: IMEX time stepping of the parabolic problem and the tanh-ramp comparison.
//! - [`diagnostics`]: front position, crossing points and admissibility verdicts.
#![no_std]

extern crate alloc;

mod error;
mod math;

pub mod asymptotics;
pub mod banded;
pub mod bvp;
pub mod continuation;
pub mod diagnostics;
pub mod evolve;
pub mod grid;
pub mod interp;
pub mod newton;
pub mod specialfns;
pub mod spectrum;

pub use crate::{
    banded::{BandedLu, BandedMatrix},
    bvp::{BoundaryClosure, ClosureKind, FrontProfile, Ramp},
    continuation::Branch,
    diagnostics::FrontDiagnostics,
    error::{Error, Result},
    grid::Grid,
    newton::{SolveReport, SolverConfig},
    spectrum::SpectrumReport,
};
