//! The Bopp spinning-particle Lagrangian and parameter-homogeneity checks.
//!
//! The Lagrangian combines a worldline-curvature term with the free-particle
//! mass term,
//!
//! ```text
//! 𝓛 = (a/2)‖u‖k² + (A/2)‖u‖,        k = ‖u̇∧u‖/‖u‖³,
//! ```
//!
//! and is degree-1 homogeneous in the parameter, which is what the Zermelo
//! residuals verify.  In terms of the invariants Q = u·u, P = u·u̇, R = u̇·u̇
//! the curvature part is the signed Gram combination
//!
//! ```text
//! 𝓛_r = (QR − P²) / (2 Q^{5/2}),
//! ```
//!
//! which is ≤ 0 on timelike-u jets (the wedge radicand P² − QR is their
//! non-negative invariant).  This sign is forced by the chart density: the
//! factorization 𝓛 = u⁰·(L∘pr) and every momentum formula downstream hold
//! for the signed combination, not for its absolute value.

use crate::dual::JetScalar;
use crate::error::{Error, Result};
use crate::jetcalc::{
    grad_jet, ContactFunction, ContactJet, ContactJetOf, JetFunction, JetPoint, JetPointOf,
};
use crate::minkowski::{dot3, dot4, FourVector};

/// Couplings of the Bopp Lagrangian: `a` weights the curvature term, `A`
/// the mass term.
///
/// `a = 0` would collapse the rank of the Hessian in the second velocities
/// and with it the whole canonical construction, so operations that divide
/// by `a` reject it via [`Error::RankDeficient`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoppParams {
    /// Curvature coupling (must be nonzero).
    pub a: f64,
    /// Mass-term coupling.
    pub big_a: f64,
}

impl BoppParams {
    pub fn new(a: f64, big_a: f64) -> Result<Self> {
        if a == 0.0 {
            return Err(Error::RankDeficient);
        }
        Ok(BoppParams { a, big_a })
    }

    /// Check the rank condition `a ≠ 0`.
    pub fn validate(&self) -> Result<()> {
        if self.a == 0.0 {
            return Err(Error::RankDeficient);
        }
        Ok(())
    }
}

/// The Bopp Lagrangian as a generic jet function (reads u and u̇).
///
/// The trait path performs no domain checking — it exists so the dual-number
/// machinery can differentiate the Lagrangian.  Use [`bopp_lagrangian`] for
/// checked evaluation.
#[derive(Debug, Clone, Copy)]
pub struct BoppLagrangian {
    pub params: BoppParams,
}

impl JetFunction for BoppLagrangian {
    fn order(&self) -> usize {
        2
    }

    fn eval<S: JetScalar>(&self, p: &JetPointOf<S>) -> S {
        let q = dot4(p.u, p.u);
        let pp = dot4(p.u, p.udot);
        let r = dot4(p.udot, p.udot);
        let norm = q.sqrt();
        let q2 = q * q;
        // (a/2)·(QR − P²)/Q^{5/2} + (A/2)·√Q
        S::from_f64(self.params.a / 2.0) * (q * r - pp * pp) / (q2 * norm)
            + S::from_f64(self.params.big_a / 2.0) * norm
    }
}

/// Checked evaluation of the Bopp Lagrangian at a jet.
///
/// Rejects near-null velocities (`u·u < 1e−12`) rather than riding the
/// ‖u‖³ pole of the curvature.
pub fn bopp_lagrangian(p: &JetPoint, params: BoppParams) -> Result<f64> {
    params.validate()?;
    if p.order < 2 {
        return Err(Error::OrderTooLow {
            order: p.order,
            required: 2,
        });
    }
    let q = dot4(p.u, p.u);
    if q < 1e-12 {
        return Err(Error::NonTimelike {
            u_sq: q,
            min: 1e-12,
        });
    }
    Ok(BoppLagrangian { params }.eval(&p.lift::<f64>()))
}

/// The chart density of the Bopp Lagrangian as a generic contact function
/// (reads 𝐯 and 𝐯′):
///
/// ```text
/// L = (a/2)√(1+𝐯²)·(𝐯′²/(1+𝐯²)² − (𝐯·𝐯′)²/(1+𝐯²)³) + (A/2)√(1+𝐯²)
/// ```
///
/// with every bold dot the spatial metric contraction.
#[derive(Debug, Clone, Copy)]
pub struct ContactDensity {
    pub params: BoppParams,
}

impl ContactFunction for ContactDensity {
    fn order(&self) -> usize {
        2
    }

    fn eval<S: JetScalar>(&self, c: &ContactJetOf<S>) -> S {
        let one = S::from_f64(1.0);
        let w = one + dot3(c.v, c.v);
        let root = w.sqrt();
        let w2 = w * w;
        let vv1 = dot3(c.v, c.vdot);
        let shape = dot3(c.vdot, c.vdot) / w2 - vv1 * vv1 / (w2 * w);
        S::from_f64(self.params.a / 2.0) * root * shape
            + S::from_f64(self.params.big_a / 2.0) * root
    }
}

/// Checked evaluation of the chart density at a contact jet.
pub fn contact_density(c: &ContactJet, params: BoppParams) -> Result<f64> {
    params.validate()?;
    let w = 1.0 + dot3(c.v, c.v);
    if w <= 0.0 {
        return Err(Error::SuperluminalVelocity { factor: w });
    }
    Ok(ContactDensity { params }.eval(&c.lift::<f64>()))
}

/// Plain component-sum contraction (chain-rule pairing of a vector with a
/// raw gradient — no metric).
fn component_sum(a: FourVector, b: FourVector) -> f64 {
    a.t * b.t + a.s1 * b.s1 + a.s2 * b.s2 + a.s3 * b.s3
}

/// Parameter-homogeneity residuals of a second-order Lagrangian:
///
/// ```text
/// Z₁ = u^α ∂𝓛/∂u̇^α,     Z₂ = u^α ∂𝓛/∂u^α + 2 u̇^α ∂𝓛/∂u̇^α − 𝓛,
/// ```
///
/// both zero exactly when the action is invariant under worldline
/// reparametrization.
pub fn zermelo_residuals(l: &impl JetFunction, p: &JetPoint) -> (f64, f64) {
    let (_, gu, gud) = grad_jet(l, p);
    let value = l.eval(&p.lift::<f64>());
    let z1 = component_sum(p.u, gud);
    let z2 = component_sum(p.u, gu) + 2.0 * component_sum(p.udot, gud) - value;
    (z1, z2)
}
