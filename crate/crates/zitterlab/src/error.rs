//! Error vocabulary shared by all modules of the crate.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the geometric and dynamical operations.
#[derive(thiserror::Error, Debug, Clone, Copy, PartialEq)]
pub enum Error {
    /// The four-velocity fails the timelike condition `u·u > 0`.
    #[error("velocity is not timelike: u·u = {u_sq:.6e} (required > {min:.1e})")]
    NonTimelike { u_sq: f64, min: f64 },

    /// The bivector-norm radicand is negative beyond rounding tolerance,
    /// so the velocity-acceleration plane is not spacelike.
    #[error("bivector radicand {radicand:.6e} is below -{tolerance:.1e}")]
    NegativeRadicand { radicand: f64, tolerance: f64 },

    /// A jet does not carry enough derivative levels for the operation.
    #[error("jet order {order} too low (operation needs order {required})")]
    OrderTooLow { order: usize, required: usize },

    /// The contact chart breaks down at `u0 = 0`.
    #[error("time component u0 = 0: contact chart undefined")]
    ZeroTimeComponent,

    /// The contact-chart factor `1 + v·v` is non-positive.
    #[error("1 + v·v = {factor:.6e} <= 0: spatial velocity is superluminal")]
    SuperluminalVelocity { factor: f64 },

    /// The curvature coupling vanishes, so the Hessian in the second
    /// velocities drops below the rank needed by the canonical formalism.
    #[error("curvature coupling a = 0 violates the rank condition on the second-velocity Hessian")]
    RankDeficient,

    /// The unit-velocity gauge `u·u = 1` is violated beyond tolerance.
    #[error("gauge violated: |u·u - 1| = {deviation:.6e} exceeds {tolerance:.1e}")]
    GaugeViolation { deviation: f64, tolerance: f64 },

    /// The step-halving error estimate exceeded its limit during integration.
    #[error("step {step:.3e} rejected: halving estimate {estimate:.6e} exceeds {limit:.1e}")]
    StepRejected {
        step: f64,
        estimate: f64,
        limit: f64,
    },

    /// No real positive helix radius exists for the given couplings and frequency.
    #[error("no helical solution for a = {a}, A = {big_a}, omega = {omega}")]
    NoHelix { a: f64, big_a: f64, omega: f64 },

    /// A trajectory handed to the helical-form fit is not a constant-curvature helix.
    #[error("curvature drifts by {drift:.6e}: trajectory is not helical")]
    NotHelical { drift: f64 },
}
