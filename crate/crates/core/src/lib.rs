//! Ring-profiled vortex soliton amplitudes from constrained minimization.
//!
//! The library computes radially symmetric amplitude profiles u(r) on [0, R]
//! with saturable (photorefractive) nonlinearity by minimizing the action
//!
//!   I(u) = 1/2 int_0^R [ r u_r^2 + (m^2/r) u^2 + (r/alpha) ln(1 + alpha u^2) ] dr
//!
//! over a weighted-orthonormal sine Galerkin basis subject to the energy
//! flux constraint 2 pi int_0^R r u^2 dr = P0, and reports the propagation
//! constant beta together with necessary-condition diagnostics (propagation
//! constant bound, peak amplitude bound, exponential tail fit, weighted
//! Poincare ratio).
//!
//! The crate is no_std-compatible: disable the `std` default feature and
//! enable `libm` for the float math. Allocation is required throughout.
//!
//! ```
//! use ringsol_core::{
//!     basis::{BasisSet, ProblemSpec},
//!     quadrature::{build_rule, default_panel_count, DEFAULT_NODES_PER_PANEL},
//!     solver::{minimize, SolverConfig},
//! };
//!
//! let spec = ProblemSpec { radius: 10.0, m: 1, alpha: 1.0, p0: 100.0, n: 16 };
//! let rule = build_rule(spec.radius, default_panel_count(spec.n), DEFAULT_NODES_PER_PANEL)?;
//! let basis = BasisSet::new(spec, rule)?;
//! let result = minimize(&basis, &SolverConfig::default())?;
//! assert!(result.converged && result.positive && result.beta < 0.0);
//! # Ok::<(), ringsol_core::Error>(())
//! ```

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]
// Guards are written as negated comparisons on purpose: NaN must land on
// the rejecting side of every admissibility check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops mirror the flattened row-major matrix arithmetic.
#![allow(clippy::needless_range_loop)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("enable at least one of the `std` or `libm` features");

extern crate alloc;

pub mod analysis;
pub mod basis;
pub mod error;
pub mod functionals;
mod math;
pub mod quadrature;
pub mod solver;

pub use analysis::{
    bounds_report, check_beta_bound, check_peak_bound, check_poincare, fit_decay, fit_tail,
    reduce_coupled, BoundsReport, Components, CoupledSpec, DecayFit, Reduction,
    BESSEL_J0_FIRST_ZERO,
};
pub use basis::{gram_matrix, orthonormalize, BasisSet, GridSamples, ProblemSpec, Profile};
pub use error::{Error, Result};
pub use functionals::{
    action, action_gradient, beta_from_gradient, beta_from_profile, energy, flux,
    residual_delta_beta,
};
pub use quadrature::{
    build_rule, default_panel_count, integrate, QuadratureRule, DEFAULT_NODES_PER_PANEL,
};
pub use solver::{initial_guess, minimize, minimize_traced, sweep, SolveResult, SolverConfig};
