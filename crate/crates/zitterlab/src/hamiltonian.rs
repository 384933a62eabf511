//! Hamilton functions on both sides of the chart, and the relations that
//! pin the homogeneous one to the constant 1.
//!
//! The coordinate-time Hamilton function (after eliminating 𝐯′ through the
//! momenta) is
//!
//! ```text
//! H = 𝐩·𝐯 + (1/2a)(1+𝐯²)^{3/2}(𝐩′² + (𝐩′·𝐯)²) − (A/2)√(1+𝐯²),
//! ```
//!
//! and its homogeneous counterpart on the worldline-parameter side is
//!
//! ```text
//! 𝓗 = ℘·u + (1/2a)‖u‖³℘′² − (A/2)‖u‖ + 1.
//! ```
//!
//! Composed with the Legendre map, 𝓗 is identically 1 — the normalization
//! constant is chosen to be exactly 1.  Three independent routes confirm the
//! expression: the direct identity `𝓗 = ℘u + ℘′u̇ − 𝓛 + 1` (u̇ eliminated by
//! the momentum identities), the chart lift `𝓗 = u⁰·(H∘pr) + u⁰℘₀ + 1`, and
//! evaluation on closed-form solutions.

use crate::dual::JetScalar;
use crate::error::{Error, Result};
use crate::jetcalc::{project_contact, JetPoint};
use crate::lagrangians::{bopp_lagrangian, BoppParams};
use crate::legendre::{contact_momenta, legendre_map, CanonicalState, CanonicalStateOf};
use crate::minkowski::{dot3, dot4, ThreeVector};

/// A point of the coordinate-time phase space `(x⁰, 𝐱, 𝐯, 𝐩, 𝐩′)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactState {
    pub x0: f64,
    pub x: ThreeVector,
    pub v: ThreeVector,
    pub p: ThreeVector,
    pub p1: ThreeVector,
}

/// A scalar function of the canonical state, evaluable over any
/// [`JetScalar`] so Poisson-bracket gradients can run under dual numbers.
pub trait StateFunction {
    fn eval<S: JetScalar>(&self, s: &CanonicalStateOf<S>) -> S;
}

/// The homogeneous Hamilton function as a generic state function.
#[derive(Debug, Clone, Copy)]
pub struct HomogeneousH {
    pub params: BoppParams,
}

impl StateFunction for HomogeneousH {
    fn eval<S: JetScalar>(&self, s: &CanonicalStateOf<S>) -> S {
        let q = dot4(s.u, s.u);
        let norm = q.sqrt();
        let norm3 = q * norm;
        dot4(s.wp, s.u) + S::from_f64(0.5 / self.params.a) * norm3 * dot4(s.wp1, s.wp1)
            - S::from_f64(self.params.big_a / 2.0) * norm
            + S::from_f64(1.0)
    }
}

/// Coordinate-time Hamilton function at a contact state.
pub fn contact_h(s: &ContactState, params: BoppParams) -> Result<f64> {
    params.validate()?;
    let w = 1.0 + dot3(s.v, s.v);
    if w <= 0.0 {
        return Err(Error::SuperluminalVelocity { factor: w });
    }
    let root = w.sqrt();
    let pv = dot3(s.p1, s.v);
    Ok(
        dot3(s.p, s.v) + (w * root / (2.0 * params.a)) * (dot3(s.p1, s.p1) + pv * pv)
            - params.big_a / 2.0 * root,
    )
}

/// Homogeneous Hamilton function at a canonical state.
pub fn homogeneous_h(s: &CanonicalState, params: BoppParams) -> Result<f64> {
    params.validate()?;
    let q = dot4(s.u, s.u);
    if q < 1e-12 {
        return Err(Error::NonTimelike {
            u_sq: q,
            min: 1e-12,
        });
    }
    Ok(HomogeneousH { params }.eval(&s.lift::<f64>()))
}

/// `𝓗∘Le − 1` at a jet: the normalization identity under test.
pub fn h_on_legendre_residual(p: &JetPoint, params: BoppParams) -> Result<f64> {
    let state = legendre_map(p, params)?;
    Ok(homogeneous_h(&state, params)? - 1.0)
}

/// Residual of the chart lift `𝓗 = u⁰·(H∘pr) + u⁰℘₀ + 1` at a jet
/// (holds on the future-pointing sheet `u⁰ > 0`).
pub fn lift_relation_residual(p: &JetPoint, params: BoppParams) -> Result<f64> {
    let state = legendre_map(p, params)?;
    let c = project_contact(p)?;
    let m = contact_momenta(&c, params)?;
    let contact = ContactState {
        x0: c.x0,
        x: c.x,
        v: c.v,
        p: m.p,
        p1: m.p1,
    };
    let lifted = p.u.t * contact_h(&contact, params)? + p.u.t * state.wp.t + 1.0;
    Ok(homogeneous_h(&state, params)? - lifted)
}

/// Residual of the direct form `℘·u + ℘′·u̇ − 𝓛 + 1` against the
/// u̇-eliminated Hamilton function.
pub fn direct_form_residual(p: &JetPoint, params: BoppParams) -> Result<f64> {
    let state = legendre_map(p, params)?;
    let l = bopp_lagrangian(p, params)?;
    let direct = dot4(state.wp, p.u) + dot4(state.wp1, p.udot) - l + 1.0;
    Ok(direct - homogeneous_h(&state, params)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jetcalc::ContactFunction;
    use crate::jetcalc::{reparametrize, sample_future_timelike_jet, sample_timelike_jet};
    use crate::lagrangians::ContactDensity;
    use crate::minkowski::FourVector;
    use crate::rng::XorShift64Star;

    fn params(a: f64, big_a: f64) -> BoppParams {
        BoppParams { a, big_a }
    }

    #[test]
    fn contact_h_examples() {
        let rest = ContactState {
            x0: 0.0,
            x: ThreeVector::zero(),
            v: ThreeVector::zero(),
            p: ThreeVector::zero(),
            p1: ThreeVector::zero(),
        };
        assert_eq!(contact_h(&rest, params(1.0, 3.0)).unwrap(), -1.5);

        let kicked = ContactState {
            p1: ThreeVector::new(1.0, 0.0, 0.0),
            ..rest
        };
        assert_eq!(contact_h(&kicked, params(1.0, 0.0)).unwrap(), -0.5);
    }

    #[test]
    fn contact_h_ignores_position() {
        let s1 = ContactState {
            x0: 0.0,
            x: ThreeVector::zero(),
            v: ThreeVector::new(0.3, -0.2, 0.1),
            p: ThreeVector::new(1.0, 2.0, -0.5),
            p1: ThreeVector::new(-0.4, 0.8, 0.3),
        };
        let s2 = ContactState {
            x0: 17.5,
            x: ThreeVector::new(-3.0, 9.0, 2.5),
            ..s1
        };
        let pr = params(1.3, -0.8);
        assert_eq!(contact_h(&s1, pr).unwrap(), contact_h(&s2, pr).unwrap());
    }

    #[test]
    fn contact_h_agrees_with_its_pre_elimination_form() {
        // H must equal 𝐩𝐯 + 𝐩′𝐯′ − L when the momenta come from the density
        // at an actual contact jet — the elimination of 𝐯′ is exact.
        let pr = params(1.0, 1.0);
        let mut rng = XorShift64Star::new(13);
        for _ in 0..500 {
            let p = sample_future_timelike_jet(&mut rng, 3);
            let c = crate::jetcalc::project_contact(&p).unwrap();
            let m = contact_momenta(&c, pr).unwrap();
            let state = ContactState {
                x0: c.x0,
                x: c.x,
                v: c.v,
                p: m.p,
                p1: m.p1,
            };
            let h = contact_h(&state, pr).unwrap();
            let density = ContactDensity { params: pr };
            let legendre = dot3(m.p, c.v) + dot3(m.p1, c.vdot) - density.eval(&c.lift::<f64>());
            assert!(
                (h - legendre).abs() <= 1e-8 * legendre.abs().max(1.0),
                "H = {h} vs 𝐩𝐯+𝐩′𝐯′−L = {legendre}"
            );
        }
    }

    #[test]
    fn homogeneous_h_examples() {
        let free = CanonicalState {
            x: FourVector::zero(),
            u: FourVector::new(1.0, 0.0, 0.0, 0.0),
            wp: FourVector::new(1.0, 0.0, 0.0, 0.0),
            wp1: FourVector::zero(),
        };
        assert_eq!(homogeneous_h(&free, params(1.0, 2.0)).unwrap(), 1.0);

        let bare = CanonicalState {
            wp: FourVector::zero(),
            ..free
        };
        assert_eq!(homogeneous_h(&bare, params(1.0, 0.0)).unwrap(), 1.0);
    }

    #[test]
    fn normalization_holds_on_legendre_images() {
        let pr = params(1.0, 1.0);
        let mut rng = XorShift64Star::new(19);
        for _ in 0..1000 {
            let p = sample_timelike_jet(&mut rng, 3);
            let r = h_on_legendre_residual(&p, pr).unwrap();
            assert!(r.abs() <= 1e-8, "𝓗∘Le − 1 = {r}");
        }
    }

    #[test]
    fn normalization_at_rest() {
        let rest = JetPoint::order3(
            FourVector::zero(),
            FourVector::new(1.0, 0.0, 0.0, 0.0),
            FourVector::zero(),
            FourVector::zero(),
        );
        let r = h_on_legendre_residual(&rest, params(1.0, 2.0)).unwrap();
        assert!(r.abs() < 1e-15);
    }

    #[test]
    fn lift_relation_on_future_jets() {
        let pr = params(1.0, 1.0);
        let mut rng = XorShift64Star::new(23);
        for _ in 0..1000 {
            let p = sample_future_timelike_jet(&mut rng, 3);
            let r = lift_relation_residual(&p, pr).unwrap();
            assert!(r.abs() <= 1e-7, "lift residual {r}");
        }

        let rest = JetPoint::order3(
            FourVector::zero(),
            FourVector::new(1.0, 0.0, 0.0, 0.0),
            FourVector::zero(),
            FourVector::zero(),
        );
        assert!(lift_relation_residual(&rest, pr).unwrap().abs() <= 1e-12);

        let boosted = JetPoint::order3(
            FourVector::zero(),
            FourVector::new(1f64.cosh(), 1f64.sinh(), 0.0, 0.0),
            FourVector::zero(),
            FourVector::zero(),
        );
        assert!(lift_relation_residual(&boosted, pr).unwrap().abs() <= 1e-10);
    }

    #[test]
    fn direct_form_on_random_jets() {
        let pr = params(1.0, 1.0);
        let mut rng = XorShift64Star::new(37);
        for _ in 0..1000 {
            let p = sample_timelike_jet(&mut rng, 3);
            let r = direct_form_residual(&p, pr).unwrap();
            assert!(r.abs() <= 1e-9, "direct-form residual {r}");
        }
        // u̇ ∝ u: the ℘′ = 0 branch.
        let u = FourVector::new(1.4, 0.2, -0.3, 0.6);
        let p = JetPoint::order3(FourVector::zero(), u, u.scale(0.8), FourVector::zero());
        assert!(direct_form_residual(&p, pr).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn h_is_reparametrization_invariant_on_legendre_images() {
        let pr = params(1.0, 1.0);
        let mut rng = XorShift64Star::new(41);
        for _ in 0..300 {
            let p = sample_timelike_jet(&mut rng, 3);
            let q = reparametrize(
                &p,
                0.5 + rng.uniform(0.0, 1.5),
                rng.uniform(-1.0, 1.0),
                rng.uniform(-1.0, 1.0),
            );
            let hp = homogeneous_h(&legendre_map(&p, pr).unwrap(), pr).unwrap();
            let hq = homogeneous_h(&legendre_map(&q, pr).unwrap(), pr).unwrap();
            assert!((hp - hq).abs() <= 1e-9, "{hp} vs {hq}");
        }
    }
}
