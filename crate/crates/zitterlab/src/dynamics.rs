//! Canonical dynamics of the Bopp particle: the multiplier system, its
//! unit-velocity reduction, fixed-step integration with conservation
//! monitors, the fourth-order equation of motion, Poisson-bracket evolution
//! checks, and the closed-form helical (Zitterbewegung) solutions.
//!
//! The canonical system with parametrization multipliers λ, μ is
//!
//! ```text
//! dx/dτ  = λu
//! du/dτ  = λ‖u‖³℘′/a + μu
//! d℘/dτ  = 0
//! d℘′/dτ = (A/2)λu/‖u‖ − λ℘ − (3/2)λ(‖u‖/a)℘′²u − μ℘′
//! ```
//!
//! and in the unit-velocity gauge (u² = 1, λ = 1, μ = 0) it reduces to
//!
//! ```text
//! du/dτ = ℘′/a,       d℘′/dτ = (A/2)u − ℘ − (3/2a)℘′²u.
//! ```
//!
//! Eliminating the momenta yields the fourth-order equation of motion
//!
//! ```text
//! u⃛ + ((3/2)u̇² − A/(2a))u̇ + 3(u̇·ü)u = 0        (unit gauge),
//! ```
//!
//! whose constant-curvature solutions are circular helices: substituting
//! x(τ) = (γτ, r cos(ωτ+φ), r sin(ωτ+φ), 0) reduces the equation to the
//! single consistency condition ω² = −(3/2)k₀² − A/(2a) with k₀ = rω²,
//! γ² = 1 + r²ω².  These spiral worldlines are the Zitterbewegung: the
//! spatial ẍ oscillates harmonically, d²ẍ/dτ² + ω²ẍ = 0.

use crate::dual::{Dual, JetScalar};
use crate::error::{Error, Result};
use crate::hamiltonian::{homogeneous_h, HomogeneousH, StateFunction};
use crate::jetcalc::JetPoint;
use crate::lagrangians::BoppParams;
use crate::legendre::{momenta_explicit, CanonicalState, CanonicalStateOf};
use crate::minkowski::{curvature, dot4, FourVector};

/// Maximum step-halving error estimate the integrator will accept.
pub const STEP_ESTIMATE_LIMIT: f64 = 1e-3;

/// Default tolerance on |u² − 1| for the unit-velocity gauge.
pub const GAUGE_TOLERANCE: f64 = 1e-6;

/// How the parametrization freedom is fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GaugeChoice {
    /// λ = 1, μ = 0 with u² = 1: the multiplier terms drop out and the
    /// reduced system applies.  The gauge is monitored, never enforced.
    UnitVelocity,
    /// Explicit constant multipliers of the general canonical system;
    /// exposes the full parametrization freedom for cross-checks.
    FreeMultipliers { lambda: f64, mu: f64 },
}

/// Time derivative of a canonical state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalDeriv {
    pub dx: FourVector,
    pub du: FourVector,
    pub dwp: FourVector,
    pub dwp1: FourVector,
}

/// One conservation-monitor row: the Hamilton function, the velocity
/// square, and the largest drift of any ℘ component from its initial value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonitorSample {
    pub tau: f64,
    pub h: f64,
    pub u_sq: f64,
    pub wp_drift: f64,
}

/// An integrated trajectory: ordered `(τ, state)` samples, the step used,
/// the per-channel maximum of the step-halving error estimate (channels in
/// the order x, u, ℘, ℘′ × four components), and the monitor rows.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<(f64, CanonicalState)>,
    pub step: f64,
    pub step_error: [f64; 16],
    pub monitors: Vec<MonitorSample>,
}

/// Integration knobs beyond the step size.
#[derive(Debug, Clone, Copy, Default)]
pub struct IntegratorOptions {
    /// Rescale u to unit norm after every accepted step.  Off by default so
    /// conservation tests measure the integrator honestly; useful for very
    /// long unit-gauge runs.
    pub renormalize_gauge: bool,
}

/// Right side of the canonical system with free multipliers λ, μ.
pub fn canonical_rhs(
    s: &CanonicalState,
    params: BoppParams,
    lambda: f64,
    mu: f64,
) -> Result<CanonicalDeriv> {
    params.validate()?;
    let q = dot4(s.u, s.u);
    if q < 1e-12 {
        return Err(Error::NonTimelike {
            u_sq: q,
            min: 1e-12,
        });
    }
    let norm = q.sqrt();
    let norm3 = q * norm;
    let wp1_sq = dot4(s.wp1, s.wp1);
    Ok(CanonicalDeriv {
        dx: s.u.scale(lambda),
        du: s.wp1.scale(lambda * norm3 / params.a) + s.u.scale(mu),
        dwp: FourVector::zero(),
        dwp1: s.u.scale(lambda * params.big_a / (2.0 * norm))
            - s.wp.scale(lambda)
            - s.u.scale(1.5 * lambda * norm * wp1_sq / params.a)
            - s.wp1.scale(mu),
    })
}

/// The multiplier value forced by contracting the velocity equation with u
/// (using u·℘′ = 0): `μ = u·(du/dτ)/‖u‖²`.
pub fn gauge_mu(u: FourVector, dudtau: FourVector) -> Result<f64> {
    let q = dot4(u, u);
    if q <= 0.0 {
        return Err(Error::NonTimelike { u_sq: q, min: 0.0 });
    }
    Ok(dot4(u, dudtau) / q)
}

/// Unit-gauge right side with an explicit gauge tolerance.
///
/// The default [`reduced_rhs`] uses [`GAUGE_TOLERANCE`]; integrations at
/// coarse steps pass a looser value here because the Runge-Kutta stages
/// excurse from the gauge surface by O(step²) even when the trajectory
/// itself stays on it.
pub fn reduced_rhs_tol(
    s: &CanonicalState,
    params: BoppParams,
    tolerance: f64,
) -> Result<CanonicalDeriv> {
    params.validate()?;
    let deviation = (dot4(s.u, s.u) - 1.0).abs();
    if deviation > tolerance {
        return Err(Error::GaugeViolation {
            deviation,
            tolerance,
        });
    }
    let wp1_sq = dot4(s.wp1, s.wp1);
    Ok(CanonicalDeriv {
        dx: s.u,
        du: s.wp1.scale(1.0 / params.a),
        dwp: FourVector::zero(),
        dwp1: s.u.scale(params.big_a / 2.0) - s.wp - s.u.scale(1.5 * wp1_sq / params.a),
    })
}

/// Unit-gauge right side: `dx = u, du = ℘′/a, d℘ = 0,
/// d℘′ = (A/2)u − ℘ − (3/2a)℘′²u`, valid while |u²−1| ≤ [`GAUGE_TOLERANCE`].
pub fn reduced_rhs(s: &CanonicalState, params: BoppParams) -> Result<CanonicalDeriv> {
    reduced_rhs_tol(s, params, GAUGE_TOLERANCE)
}

/// Right side selected by a [`GaugeChoice`].
pub fn gauge_rhs(
    gauge: GaugeChoice,
    params: BoppParams,
) -> impl Fn(&CanonicalState) -> Result<CanonicalDeriv> {
    move |s| match gauge {
        GaugeChoice::UnitVelocity => reduced_rhs(s, params),
        GaugeChoice::FreeMultipliers { lambda, mu } => canonical_rhs(s, params, lambda, mu),
    }
}

/// Build the canonical state of a unit-gauge jet `(u₀, u̇₀, ü₀)` at x = 0.
///
/// Requires `u₀·u₀ = 1` and `u₀·u̇₀ = 0` to 1e−10 (consistency of the unit
/// gauge); the resulting state automatically satisfies 𝓗 = 1 and u·℘′ = 0.
pub fn make_initial_state(
    u0: FourVector,
    udot0: FourVector,
    uddot0: FourVector,
    params: BoppParams,
) -> Result<CanonicalState> {
    let tolerance = 1e-10;
    let norm_dev = (dot4(u0, u0) - 1.0).abs();
    if norm_dev > tolerance {
        return Err(Error::GaugeViolation {
            deviation: norm_dev,
            tolerance,
        });
    }
    let ortho_dev = dot4(u0, udot0).abs();
    if ortho_dev > tolerance {
        return Err(Error::GaugeViolation {
            deviation: ortho_dev,
            tolerance,
        });
    }
    let jet = JetPoint::order3(FourVector::zero(), u0, udot0, uddot0);
    let (wp, wp1) = momenta_explicit(&jet, params)?;
    Ok(CanonicalState {
        x: FourVector::zero(),
        u: u0,
        wp,
        wp1,
    })
}

fn state_to_array(s: &CanonicalState) -> [f64; 16] {
    let mut a = [0.0; 16];
    a[0..4].copy_from_slice(&s.x.to_array());
    a[4..8].copy_from_slice(&s.u.to_array());
    a[8..12].copy_from_slice(&s.wp.to_array());
    a[12..16].copy_from_slice(&s.wp1.to_array());
    a
}

fn offset_state(s: &CanonicalState, d: &CanonicalDeriv, h: f64) -> CanonicalState {
    CanonicalState {
        x: s.x + d.dx.scale(h),
        u: s.u + d.du.scale(h),
        wp: s.wp + d.dwp.scale(h),
        wp1: s.wp1 + d.dwp1.scale(h),
    }
}

fn rk4_step<F>(rhs: &F, s: &CanonicalState, h: f64) -> Result<CanonicalState>
where
    F: Fn(&CanonicalState) -> Result<CanonicalDeriv>,
{
    let k1 = rhs(s)?;
    let k2 = rhs(&offset_state(s, &k1, h / 2.0))?;
    let k3 = rhs(&offset_state(s, &k2, h / 2.0))?;
    let k4 = rhs(&offset_state(s, &k3, h))?;
    let sum = CanonicalDeriv {
        dx: k1.dx + k2.dx.scale(2.0) + k3.dx.scale(2.0) + k4.dx,
        du: k1.du + k2.du.scale(2.0) + k3.du.scale(2.0) + k4.du,
        dwp: k1.dwp + k2.dwp.scale(2.0) + k3.dwp.scale(2.0) + k4.dwp,
        dwp1: k1.dwp1 + k2.dwp1.scale(2.0) + k3.dwp1.scale(2.0) + k4.dwp1,
    };
    Ok(offset_state(s, &sum, h / 6.0))
}

fn monitor(
    tau: f64,
    s: &CanonicalState,
    wp0: FourVector,
    params: BoppParams,
) -> Result<MonitorSample> {
    let drift = (s.wp - wp0)
        .to_array()
        .iter()
        .fold(0.0f64, |m, c| m.max(c.abs()));
    Ok(MonitorSample {
        tau,
        h: homogeneous_h(s, params)?,
        u_sq: dot4(s.u, s.u),
        wp_drift: drift,
    })
}

/// Integrate with classical fixed-step Runge-Kutta 4.
///
/// Every step is also taken as two half steps; the per-channel Richardson
/// estimate |full − halves|/15 is recorded (maximum over the run) and the
/// step is rejected outright if any channel's estimate exceeds
/// [`STEP_ESTIMATE_LIMIT`].  The trajectory always advances with the
/// full-step result, so the estimate is diagnostic and never silently
/// changes the scheme.  Monitors (𝓗, u², ℘ drift) are recorded at every
/// sample, including τ = 0.
pub fn integrate_with<F>(
    rhs: &F,
    s0: &CanonicalState,
    tau_end: f64,
    step: f64,
    params: BoppParams,
    options: IntegratorOptions,
) -> Result<Trajectory>
where
    F: Fn(&CanonicalState) -> Result<CanonicalDeriv>,
{
    assert!(
        step > 0.0 && tau_end > 0.0,
        "step and horizon must be positive"
    );
    let n = ((tau_end / step).round() as usize).max(1);
    let wp0 = s0.wp;
    let mut samples = Vec::with_capacity(n + 1);
    let mut monitors = Vec::with_capacity(n + 1);
    let mut step_error = [0.0f64; 16];
    samples.push((0.0, *s0));
    monitors.push(monitor(0.0, s0, wp0, params)?);
    let mut state = *s0;
    for i in 0..n {
        let full = rk4_step(rhs, &state, step)?;
        let halves = rk4_step(rhs, &rk4_step(rhs, &state, step / 2.0)?, step / 2.0)?;
        let fa = state_to_array(&full);
        let ha = state_to_array(&halves);
        let mut worst = 0.0f64;
        for (channel, (f, h)) in fa.iter().zip(ha.iter()).enumerate() {
            let estimate = (f - h).abs() / 15.0;
            step_error[channel] = step_error[channel].max(estimate);
            worst = worst.max(estimate);
        }
        // Written with a negated comparison so a NaN estimate also rejects.
        if !(worst <= STEP_ESTIMATE_LIMIT) {
            return Err(Error::StepRejected {
                step,
                estimate: worst,
                limit: STEP_ESTIMATE_LIMIT,
            });
        }
        state = full;
        if options.renormalize_gauge {
            let q = dot4(state.u, state.u);
            if q > 0.0 {
                state.u = state.u.scale(1.0 / q.sqrt());
            }
        }
        let tau = (i + 1) as f64 * step;
        samples.push((tau, state));
        monitors.push(monitor(tau, &state, wp0, params)?);
    }
    Ok(Trajectory {
        samples,
        step,
        step_error,
        monitors,
    })
}

/// [`integrate_with`] under default options.
pub fn integrate<F>(
    rhs: &F,
    s0: &CanonicalState,
    tau_end: f64,
    step: f64,
    params: BoppParams,
) -> Result<Trajectory>
where
    F: Fn(&CanonicalState) -> Result<CanonicalDeriv>,
{
    integrate_with(rhs, s0, tau_end, step, params, IntegratorOptions::default())
}

/// Left side of the unit-gauge equation of motion
/// `u⃛ + ((3/2)u̇² − A/(2a))u̇ + 3(u̇·ü)u` at an order-4 jet.
pub fn eom_residual(jet4: &JetPoint, params: BoppParams) -> Result<FourVector> {
    params.validate()?;
    if jet4.order < 4 {
        return Err(Error::OrderTooLow {
            order: jet4.order,
            required: 4,
        });
    }
    let deviation = (dot4(jet4.u, jet4.u) - 1.0).abs();
    if deviation > GAUGE_TOLERANCE {
        return Err(Error::GaugeViolation {
            deviation,
            tolerance: GAUGE_TOLERANCE,
        });
    }
    let udot_sq = dot4(jet4.udot, jet4.udot);
    Ok(jet4.utdot
        + jet4
            .udot
            .scale(1.5 * udot_sq - params.big_a / (2.0 * params.a))
        + jet4.u.scale(3.0 * dot4(jet4.udot, jet4.uddot)))
}

/// A circular-helix worldline in the unit gauge, with its closed-form jet
/// and canonical state at any parameter value.
#[derive(Debug, Clone, Copy)]
pub struct Helix {
    pub params: BoppParams,
    pub omega: f64,
    pub phase: f64,
    /// Spatial radius r = k₀/ω².
    pub radius: f64,
    /// Constant first curvature k₀.
    pub k0: f64,
    /// Time dilation γ = √(1 + r²ω²).
    pub gamma: f64,
}

impl Helix {
    fn angle(&self, tau: f64) -> f64 {
        self.omega * tau + self.phase
    }

    /// Worldline point x(τ) = (γτ, r cos(ωτ+φ), r sin(ωτ+φ), 0).
    pub fn position(&self, tau: f64) -> FourVector {
        let th = self.angle(tau);
        FourVector::new(
            self.gamma * tau,
            self.radius * th.cos(),
            self.radius * th.sin(),
            0.0,
        )
    }

    /// Full order-4 jet of the worldline at τ.
    pub fn jet(&self, tau: f64) -> JetPoint {
        let th = self.angle(tau);
        let (s, c) = th.sin_cos();
        let (r, w) = (self.radius, self.omega);
        let rw = r * w;
        JetPoint::order4(
            self.position(tau),
            FourVector::new(self.gamma, -rw * s, rw * c, 0.0),
            FourVector::new(0.0, -rw * w * c, -rw * w * s, 0.0),
            FourVector::new(0.0, rw * w * w * s, -rw * w * w * c, 0.0),
            FourVector::new(0.0, rw * w * w * w * c, rw * w * w * w * s, 0.0),
        )
    }

    /// Canonical state at τ: ℘ is the constant timelike vector
    /// (−aω²γ, 0, 0, 0) and ℘′ = a·u̇.
    pub fn state(&self, tau: f64) -> CanonicalState {
        let jet = self.jet(tau);
        CanonicalState {
            x: jet.x,
            u: jet.u,
            wp: FourVector::new(
                -self.params.a * self.omega * self.omega * self.gamma,
                0.0,
                0.0,
                0.0,
            ),
            wp1: jet.udot.scale(self.params.a),
        }
    }
}

/// Construct the helix of angular frequency ω and given phase, if one
/// exists for the couplings.
///
/// The radius follows from the consistency condition obtained by
/// substituting the helix ansatz into the equation of motion
/// (u⃛ = −ω²u̇, u̇² = −k₀², u̇·ü = 0):
///
/// ```text
/// ω² = −(3/2)k₀² − A/(2a),    k₀ = rω²,    γ² = 1 + r²ω².
/// ```
///
/// Errors with [`Error::NoHelix`] when ω = 0 or the condition forces
/// k₀² ≤ 0; the construction re-verifies itself against the equation of
/// motion before returning.
pub fn helix(params: BoppParams, omega: f64, phase: f64) -> Result<Helix> {
    params.validate()?;
    let k0_sq = -(2.0 / 3.0) * (omega * omega + params.big_a / (2.0 * params.a));
    if omega == 0.0 || k0_sq <= 0.0 {
        return Err(Error::NoHelix {
            a: params.a,
            big_a: params.big_a,
            omega,
        });
    }
    let k0 = k0_sq.sqrt();
    let radius = k0 / (omega * omega);
    let gamma = (1.0 + radius * radius * omega * omega).sqrt();
    let h = Helix {
        params,
        omega,
        phase,
        radius,
        k0,
        gamma,
    };
    let mut worst = 0.0f64;
    for tau in [0.0, 0.37, 1.91] {
        let r = eom_residual(&h.jet(tau), params)?;
        worst = r.to_array().iter().fold(worst, |m, c| m.max(c.abs()));
    }
    if worst > 1e-10 {
        return Err(Error::NotHelical { drift: worst });
    }
    Ok(h)
}

/// Five-point centered first derivative, inputs ordered f(τ−2h) … f(τ+2h).
fn stencil_first(f: [FourVector; 5], h: f64) -> FourVector {
    (-f[4] + f[3].scale(8.0) - f[1].scale(8.0) + f[0]).scale(1.0 / (12.0 * h))
}

/// Five-point centered second derivative, same ordering.
fn stencil_second(f: [FourVector; 5], h: f64) -> FourVector {
    (-f[4] + f[3].scale(16.0) - f[2].scale(30.0) + f[1].scale(16.0) - f[0])
        .scale(1.0 / (12.0 * h * h))
}

fn udot_at(traj: &Trajectory, i: usize, a: f64) -> FourVector {
    traj.samples[i].1.wp1.scale(1.0 / a)
}

fn udot_window(traj: &Trajectory, i: usize, a: f64) -> [FourVector; 5] {
    [
        udot_at(traj, i - 2, a),
        udot_at(traj, i - 1, a),
        udot_at(traj, i, a),
        udot_at(traj, i + 1, a),
        udot_at(traj, i + 2, a),
    ]
}

/// Reconstruct the order-4 worldline jet at sample `i` of a unit-gauge
/// trajectory: u̇ = ℘′/a exactly, ü and u⃛ from centered 5-point stencils on
/// the u̇ series.  `None` when the window does not fit.
pub fn trajectory_jet(traj: &Trajectory, i: usize, params: BoppParams) -> Option<JetPoint> {
    if i < 2 || i + 2 >= traj.samples.len() {
        return None;
    }
    let window = udot_window(traj, i, params.a);
    let (_, s) = traj.samples[i];
    Some(JetPoint::order4(
        s.x,
        s.u,
        window[2],
        stencil_first(window, traj.step),
        stencil_second(window, traj.step),
    ))
}

/// Maximum |component| of the equation-of-motion residual over all interior
/// samples of a unit-gauge trajectory.
pub fn trajectory_eom_residual(traj: &Trajectory, params: BoppParams) -> Result<f64> {
    let mut worst = 0.0f64;
    for i in 2..traj.samples.len().saturating_sub(2) {
        let jet = trajectory_jet(traj, i, params).expect("window checked by loop bounds");
        let r = eom_residual(&jet, params)?;
        worst = r.to_array().iter().fold(worst, |m, c| m.max(c.abs()));
    }
    Ok(worst)
}

/// Maximum |component| of the brute-force variational residual over all
/// interior samples — the canonical flow must annihilate the Lagrangian's
/// Euler-Poisson operator.
pub fn trajectory_euler_poisson_residual(traj: &Trajectory, params: BoppParams) -> Result<f64> {
    let lagrangian = crate::lagrangians::BoppLagrangian { params };
    let mut worst = 0.0f64;
    for i in 2..traj.samples.len().saturating_sub(2) {
        let jet = trajectory_jet(traj, i, params).expect("window checked by loop bounds");
        let r = crate::jetcalc::euler_poisson_residual_oracle(&lagrangian, &jet)?;
        worst = r.to_array().iter().fold(worst, |m, c| m.max(c.abs()));
    }
    Ok(worst)
}

/// Measure the harmonic form of a constant-curvature trajectory.
///
/// Verifies the curvature is constant (within 1e−4, else
/// [`Error::NotHelical`]), measures the dominant oscillation frequency of
/// the spatial ẍ = u̇ components by zero-crossing counting with linear
/// interpolation, and reports `(frequency, residual)` where the residual is
/// the worst value of |d²ẍ/dτ² + ω²_measured·ẍ| over interior samples.
/// A flat trajectory (max |ẍ| < 1e−12) returns `(0, 0)`.
pub fn riewe_form_check(traj: &Trajectory, params: BoppParams) -> Result<(f64, f64)> {
    params.validate()?;
    let n = traj.samples.len();
    if n < 5 {
        return Err(Error::NotHelical { drift: f64::NAN });
    }
    let k0 = curvature(traj.samples[0].1.u, udot_at(traj, 0, params.a))?;
    let mut drift = 0.0f64;
    for i in 0..n {
        let k = curvature(traj.samples[i].1.u, udot_at(traj, i, params.a))?;
        drift = drift.max((k - k0).abs());
    }
    if drift > 1e-4 {
        return Err(Error::NotHelical { drift });
    }

    // Pick the spatial channel with the largest swing.
    let mut amplitude = [0.0f64; 3];
    for i in 0..n {
        let ud = udot_at(traj, i, params.a);
        for (c, amp) in amplitude.iter_mut().enumerate() {
            *amp = amp.max(ud.component(c + 1).abs());
        }
    }
    let peak = amplitude.iter().cloned().fold(0.0f64, f64::max);
    if peak < 1e-12 {
        return Ok((0.0, 0.0));
    }
    let channel = amplitude
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i + 1)
        .unwrap();

    // Zero crossings of the chosen channel, linearly interpolated.
    let mut crossings = Vec::new();
    for i in 0..n - 1 {
        let (t0, f0) = (
            traj.samples[i].0,
            udot_at(traj, i, params.a).component(channel),
        );
        let (t1, f1) = (
            traj.samples[i + 1].0,
            udot_at(traj, i + 1, params.a).component(channel),
        );
        if f0 == 0.0 {
            crossings.push(t0);
        } else if f0 * f1 < 0.0 {
            crossings.push(t0 - f0 * (t1 - t0) / (f1 - f0));
        }
    }
    if crossings.len() < 2 {
        return Err(Error::NotHelical { drift });
    }
    let spans = crossings.len() - 1;
    let omega = std::f64::consts::PI * spans as f64 / (crossings[spans] - crossings[0]);

    // Residual of the harmonic equation with the measured frequency.
    let mut worst = 0.0f64;
    for i in 2..n - 2 {
        let second = stencil_second(udot_window(traj, i, params.a), traj.step);
        let r = second + udot_at(traj, i, params.a).scale(omega * omega);
        worst = r.to_array().iter().fold(worst, |m, c| m.max(c.abs()));
    }
    Ok((omega, worst))
}

/// Which block of the canonical state a [`StateComponent`] reads.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StateBlock {
    Position,
    Velocity,
    Momentum,
    SecondMomentum,
}

/// Extraction of one canonical-state component, as a state function.
#[derive(Debug, Clone, Copy)]
pub struct StateComponent {
    pub block: StateBlock,
    pub comp: usize,
}

impl StateFunction for StateComponent {
    fn eval<S: JetScalar>(&self, s: &CanonicalStateOf<S>) -> S {
        let v = match self.block {
            StateBlock::Position => s.x,
            StateBlock::Velocity => s.u,
            StateBlock::Momentum => s.wp,
            StateBlock::SecondMomentum => s.wp1,
        };
        v.component(self.comp)
    }
}

fn seed_state(s: &CanonicalState, block: usize, comp: usize) -> CanonicalStateOf<Dual<f64>> {
    let mut q = s.lift::<Dual<f64>>();
    let v = match block {
        0 => &mut q.x,
        1 => &mut q.u,
        2 => &mut q.wp,
        3 => &mut q.wp1,
        _ => panic!("state block {block} out of range"),
    };
    *v = v.with_component(comp, Dual::new(v.component(comp).re, 1.0));
    q
}

fn state_gradients(f: &impl StateFunction, s: &CanonicalState) -> [[f64; 4]; 4] {
    let mut g = [[0.0; 4]; 4];
    for (block, grad) in g.iter_mut().enumerate() {
        for (comp, out) in grad.iter_mut().enumerate() {
            *out = f.eval(&seed_state(s, block, comp)).eps;
        }
    }
    g
}

fn eta_pair(a: [f64; 4], b: [f64; 4]) -> f64 {
    a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3]
}

/// Poisson bracket of two state functions at a state.
///
/// The canonical pairs are (x^α, ℘_α) and (u^α, ℘′_α) with covariant
/// momentum slots; since this crate stores momenta contravariantly, pairing
/// the raw component-gradients inserts exactly one metric factor:
///
/// ```text
/// {f,g} = ⟨∂f/∂x, ∂g/∂℘⟩ − ⟨∂f/∂℘, ∂g/∂x⟩ + ⟨∂f/∂u, ∂g/∂℘′⟩ − ⟨∂f/∂℘′, ∂g/∂u⟩,
/// ```
///
/// where ⟨·,·⟩ is the metric-weighted sum a₀b₀ − a₁b₁ − a₂b₂ − a₃b₃.  With
/// this convention `{·, 𝓗}` reproduces the canonical system verbatim.
pub fn poisson_bracket(f: &impl StateFunction, g: &impl StateFunction, s: &CanonicalState) -> f64 {
    let fg = state_gradients(f, s);
    let gg = state_gradients(g, s);
    eta_pair(fg[0], gg[2]) - eta_pair(fg[2], gg[0]) + eta_pair(fg[1], gg[3])
        - eta_pair(fg[3], gg[1])
}

/// Worst mismatch, over interior samples of a unit-gauge trajectory,
/// between the finite-difference d f/dτ and the bracket {f, 𝓗}.
pub fn poisson_evolution_residual(
    f: &impl StateFunction,
    traj: &Trajectory,
    params: BoppParams,
) -> f64 {
    let h_fn = HomogeneousH { params };
    let values: Vec<f64> = traj
        .samples
        .iter()
        .map(|(_, s)| f.eval(&s.lift::<f64>()))
        .collect();
    let mut worst = 0.0f64;
    for i in 2..values.len().saturating_sub(2) {
        let fd = (-values[i + 2] + 8.0 * values[i + 1] - 8.0 * values[i - 1] + values[i - 2])
            / (12.0 * traj.step);
        let bracket = poisson_bracket(f, &h_fn, &traj.samples[i].1);
        worst = worst.max((fd - bracket).abs());
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(a: f64, big_a: f64) -> BoppParams {
        BoppParams { a, big_a }
    }

    fn reference_helix() -> Helix {
        helix(params(1.0, -4.0), 1.0 / 2f64.sqrt(), 0.0).unwrap()
    }

    #[test]
    fn reference_helix_closed_form_values() {
        let h = reference_helix();
        assert!((h.radius - 2.0).abs() < 1e-12);
        assert!((h.k0 - 1.0).abs() < 1e-12);
        assert!((h.gamma - 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn canonical_rhs_examples() {
        let pr = params(1.0, -4.0);
        let free = CanonicalState {
            x: FourVector::zero(),
            u: FourVector::new(1.0, 0.0, 0.0, 0.0),
            wp: FourVector::new(-2.0, 0.0, 0.0, 0.0),
            wp1: FourVector::zero(),
        };
        let d = canonical_rhs(&free, pr, 1.0, 0.0).unwrap();
        assert_eq!(d.du, FourVector::zero());
        assert_eq!(d.dwp, FourVector::zero());

        let d = canonical_rhs(&free, pr, 0.0, 0.0).unwrap();
        assert_eq!(d.dx, FourVector::zero());
        assert_eq!(d.dwp1, FourVector::zero());

        let kicked = CanonicalState {
            wp1: FourVector::new(0.0, 1.0, 0.0, 0.0),
            ..free
        };
        let d = canonical_rhs(&kicked, pr, 1.0, 0.0).unwrap();
        assert_eq!(d.du, FourVector::new(0.0, 1.0, 0.0, 0.0));
        // d℘′ = (A/2)u − ℘ + (3/2)u for ℘′² = −1, a = 1.
        let expect = kicked.u.scale(-2.0) - kicked.wp + kicked.u.scale(1.5);
        assert_eq!(d.dwp1, expect);
    }

    #[test]
    fn gauge_mu_examples() {
        let u = FourVector::new(1.3, 0.2, -0.4, 0.1);
        // u·ortho = 1.3·0.2 − 0.2·1.3 = 0 exactly.
        let ortho = FourVector::new(0.2, 1.3, 0.0, 0.0);
        assert!(dot4(u, ortho).abs() < 1e-12);
        assert_eq!(gauge_mu(u, ortho).unwrap(), 0.0);
        assert!((gauge_mu(u, u).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(
            gauge_mu(FourVector::new(0.0, 1.0, 0.0, 0.0), ortho),
            Err(Error::NonTimelike { .. })
        ));
    }

    #[test]
    fn reduced_rhs_examples() {
        let pr = params(1.0, -4.0);
        // ℘ = (A/2)u, ℘′ = 0 is a fixed point of the momentum subsystem.
        let s = CanonicalState {
            x: FourVector::zero(),
            u: FourVector::new(1.0, 0.0, 0.0, 0.0),
            wp: FourVector::new(-2.0, 0.0, 0.0, 0.0),
            wp1: FourVector::zero(),
        };
        let d = reduced_rhs(&s, pr).unwrap();
        assert_eq!(d.du, FourVector::zero());
        assert_eq!(d.dwp1, FourVector::zero());

        let pr = params(1.0, 0.0);
        let s = CanonicalState {
            wp: FourVector::zero(),
            wp1: FourVector::new(0.0, 1.0, 0.0, 0.0),
            ..s
        };
        let d = reduced_rhs(&s, pr).unwrap();
        assert_eq!(d.du, FourVector::new(0.0, 1.0, 0.0, 0.0));
        assert_eq!(d.dwp1, s.u.scale(1.5));
    }

    #[test]
    fn reduced_rhs_rejects_broken_gauge() {
        let s = CanonicalState {
            x: FourVector::zero(),
            u: FourVector::new(1.1, 0.0, 0.0, 0.0),
            wp: FourVector::zero(),
            wp1: FourVector::zero(),
        };
        assert!(matches!(
            reduced_rhs(&s, params(1.0, 0.0)),
            Err(Error::GaugeViolation { .. })
        ));
    }

    #[test]
    fn reduced_rhs_matches_helix_derivative() {
        let h = reference_helix();
        for tau in [0.0, 0.5, 1.7, 3.2] {
            let d = reduced_rhs(&h.state(tau), h.params).unwrap();
            let jet = h.jet(tau);
            // Analytic: dx = u, du = u̇, d℘ = 0, d℘′ = a·ü.
            let checks = [
                (d.dx, jet.u),
                (d.du, jet.udot),
                (d.dwp, FourVector::zero()),
                (d.dwp1, jet.uddot.scale(h.params.a)),
            ];
            for (got, want) in checks {
                for (g, w) in got.to_array().iter().zip(want.to_array()) {
                    assert!((g - w).abs() <= 1e-10, "{g} vs {w} at τ={tau}");
                }
            }
        }
    }

    #[test]
    fn initial_state_examples() {
        let pr = params(1.0, 3.0);
        let s = make_initial_state(
            FourVector::new(1.0, 0.0, 0.0, 0.0),
            FourVector::zero(),
            FourVector::zero(),
            pr,
        )
        .unwrap();
        assert_eq!(s.wp1, FourVector::zero());
        assert_eq!(s.wp, FourVector::new(1.5, 0.0, 0.0, 0.0));
        assert!((homogeneous_h(&s, pr).unwrap() - 1.0).abs() < 1e-15);

        let h = reference_helix();
        let jet = h.jet(0.0);
        let s = make_initial_state(jet.u, jet.udot, jet.uddot, h.params).unwrap();
        assert!((homogeneous_h(&s, h.params).unwrap() - 1.0).abs() < 1e-12);

        assert!(matches!(
            make_initial_state(
                FourVector::new(1.0, 1.0, 0.0, 0.0),
                FourVector::zero(),
                FourVector::zero(),
                pr
            ),
            Err(Error::GaugeViolation { .. })
        ));
    }

    #[test]
    fn free_particle_moves_on_a_straight_line() {
        let pr = params(1.0, 2.0);
        let s0 = make_initial_state(
            FourVector::new(1.0, 0.0, 0.0, 0.0),
            FourVector::zero(),
            FourVector::zero(),
            pr,
        )
        .unwrap();
        let rhs = |s: &CanonicalState| reduced_rhs(s, pr);
        let traj = integrate(&rhs, &s0, 5.0, 0.01, pr).unwrap();
        for (tau, s) in &traj.samples {
            let expect = s0.u.scale(*tau);
            for (g, w) in s.x.to_array().iter().zip(expect.to_array()) {
                assert!((g - w).abs() <= 1e-12, "x({tau}) drifted: {g} vs {w}");
            }
            assert_eq!(s.u, s0.u);
        }
    }

    #[test]
    fn helix_run_conserves_everything() {
        let h = reference_helix();
        let rhs = |s: &CanonicalState| reduced_rhs(s, h.params);
        let traj = integrate(&rhs, &h.state(0.0), 2.0, 1e-3, h.params).unwrap();
        for m in &traj.monitors {
            assert!((m.h - 1.0).abs() <= 1e-9, "𝓗 drift {}", m.h - 1.0);
            assert!((m.u_sq - 1.0).abs() <= 1e-9, "u² drift {}", m.u_sq - 1.0);
            assert!(m.wp_drift <= 1e-9, "℘ drift {}", m.wp_drift);
        }
        // And it tracks the closed form.
        let (tau, s) = traj.samples[traj.samples.len() - 1];
        let expect = h.position(tau);
        for (g, w) in s.x.to_array().iter().zip(expect.to_array()) {
            assert!((g - w).abs() <= 1e-9, "closed-form mismatch {g} vs {w}");
        }
    }

    #[test]
    fn unit_gauge_multiplier_stays_zero() {
        let h = reference_helix();
        let rhs = |s: &CanonicalState| reduced_rhs(s, h.params);
        let traj = integrate(&rhs, &h.state(0.0), 2.0, 1e-3, h.params).unwrap();
        for (_, s) in &traj.samples {
            let d = reduced_rhs(s, h.params).unwrap();
            let mu = gauge_mu(s.u, d.du).unwrap();
            assert!(mu.abs() <= 1e-9, "μ = {mu}");
        }
    }

    #[test]
    fn oversized_step_is_rejected() {
        // Disable the gauge guard so the halving estimate itself trips.
        let h = reference_helix();
        let rhs = |s: &CanonicalState| reduced_rhs_tol(s, h.params, f64::INFINITY);
        let err = integrate(&rhs, &h.state(0.0), 50.0, 10.0, h.params).unwrap_err();
        assert!(matches!(err, Error::StepRejected { .. }), "got {err:?}");
    }

    #[test]
    fn renormalization_pins_the_gauge() {
        let h = reference_helix();
        let rhs = |s: &CanonicalState| reduced_rhs(s, h.params);
        let opts = IntegratorOptions {
            renormalize_gauge: true,
        };
        let traj = integrate_with(&rhs, &h.state(0.0), 2.0, 1e-3, h.params, opts).unwrap();
        for m in &traj.monitors[1..] {
            assert!((m.u_sq - 1.0).abs() <= 1e-14, "u² = {}", m.u_sq);
        }
    }

    #[test]
    fn free_multiplier_flow_rescales_but_conserves_h() {
        // With λ=1, μ≠0 the velocity norm grows as e^{2μτ} while 𝓗 stays
        // pinned at 1 — the multiplier freedom moves along the gauge orbit.
        let h = reference_helix();
        let mu = 0.05;
        let rhs = |s: &CanonicalState| canonical_rhs(s, h.params, 1.0, mu);
        let traj = integrate(&rhs, &h.state(0.0), 2.0, 1e-3, h.params).unwrap();
        for m in &traj.monitors {
            assert!((m.h - 1.0).abs() <= 1e-7, "𝓗 = {}", m.h);
            let expect = (2.0 * mu * m.tau).exp();
            assert!(
                (m.u_sq - expect).abs() <= 1e-6 * expect,
                "u² = {} vs {expect}",
                m.u_sq
            );
        }
    }

    #[test]
    fn helix_annihilates_equation_of_motion() {
        for phase in [0.0, 0.4, 2.9] {
            let h = helix(params(1.0, -4.0), 1.0 / 2f64.sqrt(), phase).unwrap();
            for tau in [0.0, 1.3, 7.7] {
                let r = eom_residual(&h.jet(tau), h.params).unwrap();
                for c in r.to_array() {
                    assert!(c.abs() <= 1e-10, "residual component {c}");
                }
            }
        }
    }

    #[test]
    fn helix_jet_satisfies_unit_gauge_identities() {
        let h = reference_helix();
        let jet = h.jet(0.6);
        assert!((dot4(jet.u, jet.u) - 1.0).abs() <= 1e-12);
        assert!(dot4(jet.u, jet.udot).abs() <= 1e-12);
        // Differentiating u·u = 1 twice: u·ü = −u̇².
        let lhs = dot4(jet.u, jet.uddot);
        let rhs = -dot4(jet.udot, jet.udot);
        assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn no_helix_without_attractive_mass_term() {
        assert!(matches!(
            helix(params(1.0, 0.0), 0.8, 0.0),
            Err(Error::NoHelix { .. })
        ));
        assert!(matches!(
            helix(params(1.0, -4.0), 0.0, 0.0),
            Err(Error::NoHelix { .. })
        ));
    }

    #[test]
    fn trajectory_satisfies_fourth_order_equation() {
        let h = reference_helix();
        let rhs = |s: &CanonicalState| reduced_rhs(s, h.params);
        let traj = integrate(&rhs, &h.state(0.0), 2.0, 1e-3, h.params).unwrap();
        let r = trajectory_eom_residual(&traj, h.params).unwrap();
        assert!(r <= 1e-4, "stencil equation-of-motion residual {r}");
        let e = trajectory_euler_poisson_residual(&traj, h.params).unwrap();
        assert!(e <= 1e-4, "variational residual {e}");
    }

    #[test]
    fn riewe_recovers_the_frequency() {
        let h = reference_helix();
        let rhs = |s: &CanonicalState| reduced_rhs(s, h.params);
        let traj = integrate(&rhs, &h.state(0.0), 20.0, 1e-3, h.params).unwrap();
        let (freq, residual) = riewe_form_check(&traj, h.params).unwrap();
        assert!(
            (freq - h.omega).abs() <= 1e-3 * h.omega,
            "measured {freq} vs {}",
            h.omega
        );
        assert!(residual <= 1e-4, "harmonic residual {residual}");
    }

    #[test]
    fn riewe_on_other_frequencies() {
        // ω = 1 with A = −5, a = 1: k₀ = 1, r = 1, γ = √2.
        let h = helix(params(1.0, -5.0), 1.0, 0.3).unwrap();
        assert!((h.radius - 1.0).abs() < 1e-12);
        let rhs = |s: &CanonicalState| reduced_rhs(s, h.params);
        let traj = integrate(&rhs, &h.state(0.0), 15.0, 1e-3, h.params).unwrap();
        let (freq, _) = riewe_form_check(&traj, h.params).unwrap();
        assert!((freq - 1.0).abs() <= 1e-3, "measured {freq}");
    }

    #[test]
    fn riewe_degenerate_free_particle() {
        let pr = params(1.0, 2.0);
        let s0 = make_initial_state(
            FourVector::new(1.0, 0.0, 0.0, 0.0),
            FourVector::zero(),
            FourVector::zero(),
            pr,
        )
        .unwrap();
        let rhs = |s: &CanonicalState| reduced_rhs(s, pr);
        let traj = integrate(&rhs, &s0, 2.0, 1e-2, pr).unwrap();
        assert_eq!(riewe_form_check(&traj, pr).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn bracket_reproduces_the_canonical_flow() {
        let h = reference_helix();
        let s = h.state(0.9);
        let d = reduced_rhs(&s, h.params).unwrap();
        let h_fn = HomogeneousH { params: h.params };
        for comp in 0..4 {
            let f = StateComponent {
                block: StateBlock::Velocity,
                comp,
            };
            let bracket = poisson_bracket(&f, &h_fn, &s);
            assert!(
                (bracket - d.du.component(comp)).abs() <= 1e-12,
                "{{u^{comp}, 𝓗}} = {bracket} vs {}",
                d.du.component(comp)
            );
            let f = StateComponent {
                block: StateBlock::SecondMomentum,
                comp,
            };
            let bracket = poisson_bracket(&f, &h_fn, &s);
            assert!(
                (bracket - d.dwp1.component(comp)).abs() <= 1e-12,
                "{{℘′^{comp}, 𝓗}} = {bracket} vs {}",
                d.dwp1.component(comp)
            );
        }
    }

    #[test]
    fn poisson_evolution_residuals() {
        let h = reference_helix();
        let rhs = |s: &CanonicalState| reduced_rhs(s, h.params);
        let traj = integrate(&rhs, &h.state(0.0), 2.0, 1e-3, h.params).unwrap();

        for comp in 0..4 {
            let f = StateComponent {
                block: StateBlock::Momentum,
                comp,
            };
            let r = poisson_evolution_residual(&f, &traj, h.params);
            assert!(r <= 1e-8, "℘ evolution residual {r}");
        }
        let r = poisson_evolution_residual(&HomogeneousH { params: h.params }, &traj, h.params);
        assert!(r <= 1e-8, "𝓗 evolution residual {r}");
        let f = StateComponent {
            block: StateBlock::Velocity,
            comp: 1,
        };
        let r = poisson_evolution_residual(&f, &traj, h.params);
        assert!(r <= 1e-5, "u¹ evolution residual {r}");
    }

    #[test]
    fn convergence_is_fourth_order() {
        let h = reference_helix();
        let mut errors = Vec::new();
        for step in [4e-3, 2e-3, 1e-3] {
            let rhs = |s: &CanonicalState| reduced_rhs_tol(s, h.params, 1e-4);
            let traj = integrate(&rhs, &h.state(0.0), 2.0, step, h.params).unwrap();
            let mut worst = 0.0f64;
            for (tau, s) in &traj.samples {
                let expect = h.position(*tau);
                for (g, w) in s.x.to_array().iter().zip(expect.to_array()) {
                    worst = worst.max((g - w).abs());
                }
            }
            errors.push(worst);
        }
        for pair in errors.windows(2) {
            let ratio = pair[0] / pair[1];
            assert!(
                (8.0..32.0).contains(&ratio),
                "step-halving error ratio {ratio} (errors {errors:?})"
            );
        }
    }
}
