//! Bubble ansatz construction, reduced-energy expansions, and blow-up
//! verification on model manifolds.
//!
//! The crate studies slightly subcritical scalar-field equations `L_g u =
//! |u|^{2*-2-eps} u` with `L_g = Delta_g + h` on two closed model geometries:
//! the round sphere `S^n` and the product `S^1(r) x S^{n-1}`. It builds the
//! concentrating bubble ansatz used in finite-dimensional energy reduction,
//! evaluates the exact energy and residual of that ansatz by deterministic
//! quadrature, and verifies the closed-form expansion of the reduced energy
//! together with its predictions: optimal concentration scale, blow-up point,
//! and measured convergence rates as `eps -> 0`.
//!
//! Module map:
//! - [`manifolds`]: model geometries, charts, spectra, degeneracy scans.
//! - [`quadrature`]: deterministic adaptive Gauss-Kronrod integration.
//! - [`constants`]: dimensional constants and expansion coefficients.
//! - [`profiles`]: bubbles, kernel elements, cutoffs.
//! - [`energy`]: energy and residual functionals of the glued ansatz.
//! - [`reduction`]: reduced energy, optimal scale, blow-up point prediction.
//! - [`verify`]: rate fitting and the self-check report.

pub mod constants;
pub mod energy;
pub mod error;
pub mod manifolds;
pub mod profiles;
pub mod quadrature;
pub mod reduction;
pub mod verify;

pub use error::{Error, Result};
