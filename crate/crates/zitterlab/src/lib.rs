//! Homogeneous canonical mechanics for second-order Lagrangians on
//! Minkowski space-time, instantiated on the Bopp spinning-particle model.
//!
//! The crate follows one derivation chain end to end, numerically:
//!
//! 1. [`minkowski`] — the metric (+,−,−,−), wedge norms, and curvature of
//!    worldlines.
//! 2. [`jetcalc`] — jets of worldlines and contact curves, forward-mode
//!    exact derivatives ([`dual`]), total derivatives, the projection to
//!    coordinate-time charts, and a brute-force variational oracle.
//! 3. [`lagrangians`] — the Bopp Lagrangian 𝓛 = (a/2)‖u‖k² + (A/2)‖u‖, its
//!    chart density, and the homogeneity (Zermelo) identities it satisfies.
//! 4. [`legendre`] — the two momentum levels ℘, ℘′ in closed form and by
//!    automatic differentiation, with the chart pullback identities.
//! 5. [`hamiltonian`] — the chart Hamiltonian and the homogeneous Hamilton
//!    function 𝓗, which equals 1 identically on Legendre images.
//! 6. [`dynamics`] — the canonical equations, their unit-velocity
//!    reduction, a monitored Runge-Kutta integrator, the fourth-order
//!    equation of motion, Poisson-bracket checks, and the closed-form
//!    helical solutions (Zitterbewegung).
//!
//! The [`cli`] module exposes the same chain as the `zitterlab` binary:
//! `check` runs the identity suites on randomized jets, `simulate`
//! integrates and cross-checks a trajectory, `sweep` scans couplings for
//! helical solutions.

pub mod cli;
pub mod dual;
pub mod dynamics;
pub mod error;
pub mod hamiltonian;
pub mod jetcalc;
pub mod lagrangians;
pub mod legendre;
pub mod minkowski;
pub mod rng;

pub use error::{Error, Result};
