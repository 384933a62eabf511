//! Ostrohradskyj momenta on both sides of the chart projection, and the
//! identities that tie them together.
//!
//! The worldline-parameter (homogeneous) side carries two momentum levels,
//!
//! ```text
//! ℘′ = ∂𝓛/∂u̇,            ℘ = ∂𝓛/∂u − D_τ℘′,
//! ```
//!
//! and the coordinate-time side likewise carries (𝐩, 𝐩′) for the chart
//! density.  For the Bopp Lagrangian both have closed forms; the generic
//! dual-number route reproduces them and serves as the oracle.
//!
//! Index bookkeeping: all momenta are **stored contravariantly**, in the
//! same component convention as positions and velocities, so that every
//! identity can be read off with [`dot4`]/[`dot3`] contractions.  The
//! dual-number gradients produce covector components; [`momenta_ad`] applies
//! the single explicit index raise, and that is the only place the two
//! conventions meet.

use crate::dual::JetScalar;
use crate::error::{Error, Result};
use crate::jetcalc::{
    advance_seed, grad_jet, project_contact, seed_component, JetFunction, JetPoint,
};
use crate::lagrangians::{contact_density, BoppParams};
use crate::minkowski::{dot3, dot4, raise_index, FourVector, FourVectorOf, ThreeVector};

/// A point of the homogeneous phase space `(x, u, ℘, ℘′)`, over any scalar
/// so Hamiltonian gradients can run under dual numbers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalStateOf<S> {
    pub x: FourVectorOf<S>,
    pub u: FourVectorOf<S>,
    /// First-level momentum ℘ (conserved along the canonical flow).
    pub wp: FourVectorOf<S>,
    /// Second-level momentum ℘′ (conjugate to the velocity level).
    pub wp1: FourVectorOf<S>,
}

/// Plain-float canonical state.
pub type CanonicalState = CanonicalStateOf<f64>;

impl CanonicalState {
    /// Embed into any scalar type (derivative channels zero).
    pub fn lift<S: JetScalar>(&self) -> CanonicalStateOf<S> {
        CanonicalStateOf {
            x: self.x.map(S::from_f64),
            u: self.u.map(S::from_f64),
            wp: self.wp.map(S::from_f64),
            wp1: self.wp1.map(S::from_f64),
        }
    }
}

/// Coordinate-time momenta `(𝐩, 𝐩′)` of the chart density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactMomenta {
    pub p: ThreeVector,
    pub p1: ThreeVector,
}

fn check_timelike(p: &JetPoint) -> Result<f64> {
    let q = dot4(p.u, p.u);
    if q < 1e-12 {
        return Err(Error::NonTimelike {
            u_sq: q,
            min: 1e-12,
        });
    }
    Ok(q)
}

/// Second-level Bopp momentum alone (needs only u, u̇):
/// `℘′ = a[(u·u)u̇ − (u·u̇)u]/‖u‖⁵`.
pub(crate) fn wp1_explicit(p: &JetPoint, params: BoppParams) -> Result<FourVector> {
    params.validate()?;
    let q = check_timelike(p)?;
    let pp = dot4(p.u, p.udot);
    let norm5 = q * q * q.sqrt();
    Ok((p.udot.scale(q) - p.u.scale(pp)).scale(params.a / norm5))
}

/// Closed-form Bopp momenta at a jet:
///
/// ```text
/// ℘′ = a[(u·u)u̇ − (u·u̇)u]/‖u‖⁵
/// ℘  = (A/2)u/‖u‖ − a[ü/‖u‖³ − 3(u·u̇)u̇/‖u‖⁵ − (u·ü)u/‖u‖⁵
///                     + (u̇·u̇)u/(2‖u‖⁵) + (5/2)(u·u̇)²u/‖u‖⁷]
/// ```
///
/// Returned as `(℘, ℘′)`.
pub fn momenta_explicit(p: &JetPoint, params: BoppParams) -> Result<(FourVector, FourVector)> {
    if p.order < 3 {
        return Err(Error::OrderTooLow {
            order: p.order,
            required: 3,
        });
    }
    let q = check_timelike(p)?;
    let wp1 = wp1_explicit(p, params)?;
    let norm = q.sqrt();
    let norm3 = q * norm;
    let norm5 = q * norm3;
    let norm7 = q * norm5;
    let pp = dot4(p.u, p.udot);
    let r = dot4(p.udot, p.udot);
    let s = dot4(p.u, p.uddot);
    let bracket =
        p.uddot.scale(1.0 / norm3) - p.udot.scale(3.0 * pp / norm5) - p.u.scale(s / norm5)
            + p.u.scale(r / (2.0 * norm5))
            + p.u.scale(2.5 * pp * pp / norm7);
    let wp = p.u.scale(params.big_a / (2.0 * norm)) - bracket.scale(params.a);
    Ok((wp, wp1))
}

/// Momenta of an arbitrary second-order Lagrangian by forward-mode
/// differentiation, raised to the stored (contravariant) convention.
///
/// Returned as `(℘, ℘′)`.
pub fn momenta_ad(l: &impl JetFunction, p: &JetPoint) -> Result<(FourVector, FourVector)> {
    if p.order < 3 {
        return Err(Error::OrderTooLow {
            order: p.order,
            required: 3,
        });
    }
    let (_, gu, gud) = grad_jet(l, p);
    let mut wp_raw = [0.0; 4];
    for (comp, w) in wp_raw.iter_mut().enumerate() {
        // D_τ(∂𝓛/∂u̇^α): advance channel inside, component channel outside.
        let dt = l.eval(&seed_component(&advance_seed(p), 2, comp)).eps.eps;
        *w = gu.component(comp) - dt;
    }
    Ok((
        raise_index(FourVector::from_array(wp_raw)),
        raise_index(gud),
    ))
}

/// Momentum form of the parameter-homogeneity conditions:
/// `(u·℘′, u·℘ + u̇·℘′ − 𝓛)`, both ≈ 0 for a Zermelo Lagrangian.
pub fn zermelo_momentum_residuals(p: &JetPoint, l: &impl JetFunction) -> Result<(f64, f64)> {
    let (wp, wp1) = momenta_ad(l, p)?;
    let value = l.eval(&p.lift::<f64>());
    Ok((dot4(p.u, wp1), dot4(p.u, wp) + dot4(p.udot, wp1) - value))
}

/// Closed-form contact momenta of the Bopp density, with `W = 1 + 𝐯²`:
///
/// ```text
/// 𝐩′ = a[𝐯′/W^{3/2} − (𝐯·𝐯′)𝐯/W^{5/2}]
/// 𝐩  = a[−𝐯″/W^{3/2} + 3(𝐯·𝐯′)𝐯′/W^{5/2} + (𝐯·𝐯″)𝐯/W^{5/2}
///        − 𝐯′²𝐯/(2W^{5/2}) − (5/2)(𝐯·𝐯′)²𝐯/W^{7/2}] + (A/2)𝐯/W^{1/2}
/// ```
pub fn contact_momenta(
    c: &crate::jetcalc::ContactJet,
    params: BoppParams,
) -> Result<ContactMomenta> {
    params.validate()?;
    if c.order < 3 {
        return Err(Error::OrderTooLow {
            order: c.order,
            required: 3,
        });
    }
    let w = 1.0 + dot3(c.v, c.v);
    if w <= 0.0 {
        return Err(Error::SuperluminalVelocity { factor: w });
    }
    let root = w.sqrt();
    let w32 = w * root;
    let w52 = w * w32;
    let w72 = w * w52;
    let vv1 = dot3(c.v, c.vdot);
    let vv2 = dot3(c.v, c.vddot);
    let v1v1 = dot3(c.vdot, c.vdot);
    let p1 = (c.vdot.scale(1.0 / w32) - c.v.scale(vv1 / w52)).scale(params.a);
    let p_r = -c.vddot.scale(1.0 / w32) + c.vdot.scale(3.0 * vv1 / w52) + c.v.scale(vv2 / w52)
        - c.v.scale(v1v1 / (2.0 * w52))
        - c.v.scale(2.5 * vv1 * vv1 / w72);
    let p = p_r.scale(params.a) + c.v.scale(params.big_a / (2.0 * root));
    Ok(ContactMomenta { p, p1 })
}

/// Residuals of the four pullback relations between the homogeneous momenta
/// and the contact momenta at the projected jet:
///
/// 1. `℘′₀ + (1/u⁰²)·𝐮·(𝐩′∘pr)`
/// 2. `max-abs of 𝐰℘′ − (1/u⁰)(𝐩′∘pr)`
/// 3. `℘₀ − (L − 𝐯·𝐩 − 𝐯′·𝐩′)∘pr`
/// 4. `max-abs of 𝐰℘ − 𝐩∘pr`
///
/// All four vanish on the future-pointing (`u⁰ > 0`) chart sheet.
pub fn pullback_residuals(p: &JetPoint, params: BoppParams) -> Result<[f64; 4]> {
    if p.u.t == 0.0 {
        return Err(Error::ZeroTimeComponent);
    }
    let (wp, wp1) = momenta_explicit(p, params)?;
    let c = project_contact(p)?;
    let m = contact_momenta(&c, params)?;
    let density = contact_density(&c, params)?;
    let u0 = p.u.t;

    let r1 = wp1.t + dot3(p.u.spatial(), m.p1) / (u0 * u0);
    let d2 = wp1.spatial() - m.p1.scale(1.0 / u0);
    let r2 = d2.to_array().iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    let r3 = wp.t - (density - dot3(c.v, m.p) - dot3(c.vdot, m.p1));
    let d4 = wp.spatial() - m.p;
    let r4 = d4.to_array().iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    Ok([r1, r2, r3, r4])
}

/// Residuals of the two elimination identities that remove u̇ from the
/// Hamiltonian construction:
/// `℘′·u̇ − ‖u‖³℘′²/a` and `𝓛_r − ‖u‖³℘′²/(2a²)`
/// (𝓛_r is the curvature part of the Lagrangian alone).
pub fn elimination_identities(p: &JetPoint, params: BoppParams) -> Result<(f64, f64)> {
    let q = check_timelike(p)?;
    let wp1 = wp1_explicit(p, params)?;
    let norm3 = q * q.sqrt();
    let wp1_sq = dot4(wp1, wp1);
    let pp = dot4(p.u, p.udot);
    let r = dot4(p.udot, p.udot);
    let l_r = (q * r - pp * pp) / (2.0 * norm3 * q);
    Ok((
        dot4(wp1, p.udot) - norm3 * wp1_sq / params.a,
        l_r - norm3 * wp1_sq / (2.0 * params.a * params.a),
    ))
}

/// Full Legendre map: jet ↦ canonical state `(x, u, ℘, ℘′)`.
pub fn legendre_map(p: &JetPoint, params: BoppParams) -> Result<CanonicalState> {
    let (wp, wp1) = momenta_explicit(p, params)?;
    Ok(CanonicalState {
        x: p.x,
        u: p.u,
        wp,
        wp1,
    })
}
