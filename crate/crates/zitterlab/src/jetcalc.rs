//! Worldline jets, contact-chart jets, and forward-mode jet calculus.
//!
//! A [`JetPoint`] holds the derivative levels (x, u, u̇, ü, u⃛) of a
//! worldline at one parameter value; a [`ContactJet`] holds the graph
//! coordinates (x⁰, 𝐱, 𝐯, 𝐯′, 𝐯″) of the same curve reparametrized by
//! coordinate time.  Scalar functions of either are differentiated with
//! dual numbers:
//!
//! * gradients seed a single component ([`grad_jet`]);
//! * total derivatives seed every level with the level above it — the
//!   "advance" seeding of [`total_derivative_tau`] and
//!   [`total_derivative_t`];
//! * nesting the two gives iterated derivatives, which is how
//!   [`euler_poisson_residual_oracle`] obtains `D_τ` and `D_τ²` of momentum
//!   components without symbolic work.
//!
//! Gradient components returned here are raw partial derivatives with
//! respect to components (covector entries).  Contractions of the chain-rule
//! kind (`u^α ∂f/∂u^α`) are therefore plain component sums; to compare a
//! gradient against stored (contravariant) vectors, raise it first with
//! [`crate::minkowski::raise_index`].

use crate::dual::{Dual, JetScalar};
use crate::error::{Error, Result};
use crate::minkowski::{raise_index, FourVector, FourVectorOf, ThreeVectorOf};

/// Derivative levels of a worldline at one parameter value, over any scalar.
///
/// `order` counts the meaningful velocity levels (1 = u, … 4 = u⃛); levels
/// above `order` are zero-filled by the constructors.  The position level is
/// always present.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JetPointOf<S> {
    pub x: FourVectorOf<S>,
    pub u: FourVectorOf<S>,
    pub udot: FourVectorOf<S>,
    pub uddot: FourVectorOf<S>,
    pub utdot: FourVectorOf<S>,
    pub order: usize,
}

/// Plain-float jet point.
pub type JetPoint = JetPointOf<f64>;

impl<S: JetScalar> JetPointOf<S> {
    /// Jet carrying position and velocity only.
    pub fn order1(x: FourVectorOf<S>, u: FourVectorOf<S>) -> Self {
        JetPointOf {
            x,
            u,
            udot: FourVectorOf::zero(),
            uddot: FourVectorOf::zero(),
            utdot: FourVectorOf::zero(),
            order: 1,
        }
    }

    /// Jet through the acceleration level u̇.
    pub fn order2(x: FourVectorOf<S>, u: FourVectorOf<S>, udot: FourVectorOf<S>) -> Self {
        JetPointOf {
            x,
            u,
            udot,
            uddot: FourVectorOf::zero(),
            utdot: FourVectorOf::zero(),
            order: 2,
        }
    }

    /// Jet through ü.
    pub fn order3(
        x: FourVectorOf<S>,
        u: FourVectorOf<S>,
        udot: FourVectorOf<S>,
        uddot: FourVectorOf<S>,
    ) -> Self {
        JetPointOf {
            x,
            u,
            udot,
            uddot,
            utdot: FourVectorOf::zero(),
            order: 3,
        }
    }

    /// Jet through u⃛.
    pub fn order4(
        x: FourVectorOf<S>,
        u: FourVectorOf<S>,
        udot: FourVectorOf<S>,
        uddot: FourVectorOf<S>,
        utdot: FourVectorOf<S>,
    ) -> Self {
        JetPointOf {
            x,
            u,
            udot,
            uddot,
            utdot,
            order: 4,
        }
    }

    /// Level `k` of the jet: 0 = x, 1 = u, …, 4 = u⃛.
    pub fn level(&self, k: usize) -> FourVectorOf<S> {
        match k {
            0 => self.x,
            1 => self.u,
            2 => self.udot,
            3 => self.uddot,
            4 => self.utdot,
            _ => panic!("jet level {k} out of range"),
        }
    }

    fn set_level(&mut self, k: usize, v: FourVectorOf<S>) {
        match k {
            0 => self.x = v,
            1 => self.u = v,
            2 => self.udot = v,
            3 => self.uddot = v,
            4 => self.utdot = v,
            _ => panic!("jet level {k} out of range"),
        }
    }
}

impl JetPoint {
    /// Embed the jet into any scalar type (derivative channels zero).
    pub fn lift<S: JetScalar>(&self) -> JetPointOf<S> {
        JetPointOf {
            x: self.x.map(S::from_f64),
            u: self.u.map(S::from_f64),
            udot: self.udot.map(S::from_f64),
            uddot: self.uddot.map(S::from_f64),
            utdot: self.utdot.map(S::from_f64),
            order: self.order,
        }
    }
}

/// Coordinate-time jet of a worldline graph, over any scalar.
///
/// `order` counts meaningful velocity levels (1 = 𝐯, 2 = 𝐯′, 3 = 𝐯″);
/// higher levels are zero-filled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactJetOf<S> {
    pub x0: S,
    pub x: ThreeVectorOf<S>,
    pub v: ThreeVectorOf<S>,
    pub vdot: ThreeVectorOf<S>,
    pub vddot: ThreeVectorOf<S>,
    pub order: usize,
}

/// Plain-float contact jet.
pub type ContactJet = ContactJetOf<f64>;

impl<S: JetScalar> ContactJetOf<S> {
    pub fn order1(x0: S, x: ThreeVectorOf<S>, v: ThreeVectorOf<S>) -> Self {
        ContactJetOf {
            x0,
            x,
            v,
            vdot: ThreeVectorOf::zero(),
            vddot: ThreeVectorOf::zero(),
            order: 1,
        }
    }

    pub fn order2(x0: S, x: ThreeVectorOf<S>, v: ThreeVectorOf<S>, vdot: ThreeVectorOf<S>) -> Self {
        ContactJetOf {
            x0,
            x,
            v,
            vdot,
            vddot: ThreeVectorOf::zero(),
            order: 2,
        }
    }

    pub fn order3(
        x0: S,
        x: ThreeVectorOf<S>,
        v: ThreeVectorOf<S>,
        vdot: ThreeVectorOf<S>,
        vddot: ThreeVectorOf<S>,
    ) -> Self {
        ContactJetOf {
            x0,
            x,
            v,
            vdot,
            vddot,
            order: 3,
        }
    }
}

impl ContactJet {
    /// Embed the contact jet into any scalar type.
    pub fn lift<S: JetScalar>(&self) -> ContactJetOf<S> {
        ContactJetOf {
            x0: S::from_f64(self.x0),
            x: self.x.map(S::from_f64),
            v: self.v.map(S::from_f64),
            vdot: self.vdot.map(S::from_f64),
            vddot: self.vddot.map(S::from_f64),
            order: self.order,
        }
    }
}

/// A scalar function of a worldline jet, evaluable over any [`JetScalar`].
///
/// `order` declares the highest level the function reads: 0 = position only,
/// 1 = up to u, 2 = up to u̇.  Total derivatives use it to demand one more
/// level from the jet than the function consumes.
pub trait JetFunction {
    fn order(&self) -> usize;
    fn eval<S: JetScalar>(&self, p: &JetPointOf<S>) -> S;
}

/// A scalar function of a contact jet, evaluable over any [`JetScalar`].
///
/// `order` declares the highest level read: 0 = (x⁰, 𝐱) only, 1 = up to 𝐯,
/// 2 = up to 𝐯′, 3 = up to 𝐯″.
pub trait ContactFunction {
    fn order(&self) -> usize;
    fn eval<S: JetScalar>(&self, c: &ContactJetOf<S>) -> S;
}

fn dual_pair<S: JetScalar>(a: FourVectorOf<S>, b: FourVectorOf<S>) -> FourVectorOf<Dual<S>> {
    FourVectorOf::new(
        Dual::new(a.t, b.t),
        Dual::new(a.s1, b.s1),
        Dual::new(a.s2, b.s2),
        Dual::new(a.s3, b.s3),
    )
}

fn dual_pair3<S: JetScalar>(a: ThreeVectorOf<S>, b: ThreeVectorOf<S>) -> ThreeVectorOf<Dual<S>> {
    ThreeVectorOf::new(
        Dual::new(a.s1, b.s1),
        Dual::new(a.s2, b.s2),
        Dual::new(a.s3, b.s3),
    )
}

/// Seed every jet level with the level above it, so that the `eps` channel
/// of any function value is its total derivative in the worldline parameter.
///
/// Composable: applying this twice represents the underlying curve to second
/// order, so `.eps.eps` extracts second total derivatives.
pub(crate) fn advance_seed<S: JetScalar>(p: &JetPointOf<S>) -> JetPointOf<Dual<S>> {
    JetPointOf {
        x: dual_pair(p.x, p.u),
        u: dual_pair(p.u, p.udot),
        udot: dual_pair(p.udot, p.uddot),
        uddot: dual_pair(p.uddot, p.utdot),
        utdot: dual_pair(p.utdot, FourVectorOf::zero()),
        order: p.order,
    }
}

/// Contact-side advance seeding for the coordinate-time total derivative:
/// x⁰ is the curve parameter, so its seed is 1.
pub(crate) fn advance_seed_contact<S: JetScalar>(c: &ContactJetOf<S>) -> ContactJetOf<Dual<S>> {
    ContactJetOf {
        x0: Dual::new(c.x0, S::from_f64(1.0)),
        x: dual_pair3(c.x, c.v),
        v: dual_pair3(c.v, c.vdot),
        vdot: dual_pair3(c.vdot, c.vddot),
        vddot: dual_pair3(c.vddot, ThreeVectorOf::zero()),
        order: c.order,
    }
}

/// Lift a jet so every scalar is a dual constant, then seed component
/// `comp` of level `level` with derivative 1.
pub(crate) fn seed_component<S: JetScalar>(
    p: &JetPointOf<S>,
    level: usize,
    comp: usize,
) -> JetPointOf<Dual<S>> {
    let mut q = JetPointOf {
        x: p.x.map(Dual::constant),
        u: p.u.map(Dual::constant),
        udot: p.udot.map(Dual::constant),
        uddot: p.uddot.map(Dual::constant),
        utdot: p.utdot.map(Dual::constant),
        order: p.order,
    };
    let lv = q.level(level);
    let seeded = lv.with_component(comp, Dual::new(lv.component(comp).re, S::from_f64(1.0)));
    q.set_level(level, seeded);
    q
}

/// Contact analogue of [`seed_component`]: lift to dual constants, then seed
/// component `comp` of level `level` (0 = 𝐱, 1 = 𝐯, 2 = 𝐯′, 3 = 𝐯″).
/// Only the momentum cross-check tests differentiate in chart coordinates.
#[cfg(test)]
pub(crate) fn seed_contact_component<S: JetScalar>(
    c: &ContactJetOf<S>,
    level: usize,
    comp: usize,
) -> ContactJetOf<Dual<S>> {
    let mut q = ContactJetOf {
        x0: Dual::constant(c.x0),
        x: c.x.map(Dual::constant),
        v: c.v.map(Dual::constant),
        vdot: c.vdot.map(Dual::constant),
        vddot: c.vddot.map(Dual::constant),
        order: c.order,
    };
    let lv = match level {
        0 => &mut q.x,
        1 => &mut q.v,
        2 => &mut q.vdot,
        3 => &mut q.vddot,
        _ => panic!("contact level {level} out of range"),
    };
    *lv = lv.with_component(comp, Dual::new(lv.component(comp).re, S::from_f64(1.0)));
    q
}

/// Raw partial gradients of `f` with respect to (x, u, u̇) components.
///
/// Each returned four-vector holds plain component derivatives (covector
/// entries); see the module docs for the index convention.
pub fn grad_jet(f: &impl JetFunction, p: &JetPoint) -> (FourVector, FourVector, FourVector) {
    let mut grads = [[0.0; 4]; 3];
    for (level, grad) in grads.iter_mut().enumerate() {
        for (comp, g) in grad.iter_mut().enumerate() {
            *g = f.eval(&seed_component(p, level, comp)).eps;
        }
    }
    (
        FourVector::from_array(grads[0]),
        FourVector::from_array(grads[1]),
        FourVector::from_array(grads[2]),
    )
}

/// Total derivative of `f` along the worldline parameter:
/// `u·∂f/∂x + u̇·∂f/∂u + ü·∂f/∂u̇` (component sums, no metric).
///
/// Requires one more jet level than `f` reads.
pub fn total_derivative_tau(f: &impl JetFunction, p: &JetPoint) -> Result<f64> {
    let required = f.order() + 1;
    if p.order < required {
        return Err(Error::OrderTooLow {
            order: p.order,
            required,
        });
    }
    Ok(f.eval(&advance_seed(p)).eps)
}

/// Total derivative of a contact function with respect to coordinate time:
/// `∂f/∂x⁰ + vⁱ∂f/∂xⁱ + v′ⁱ∂f/∂vⁱ + v″ⁱ∂f/∂v′ⁱ`.
pub fn total_derivative_t(f: &impl ContactFunction, c: &ContactJet) -> Result<f64> {
    let required = f.order() + 1;
    if c.order < required {
        return Err(Error::OrderTooLow {
            order: c.order,
            required,
        });
    }
    Ok(f.eval(&advance_seed_contact(&c.lift::<f64>())).eps)
}

/// Chart projection of a worldline jet onto coordinate-time jets, generic
/// over the scalar so it can run under dual numbers.
///
/// The caller is responsible for `u⁰ ≠ 0`.
pub(crate) fn project_contact_generic<S: JetScalar>(p: &JetPointOf<S>) -> ContactJetOf<S> {
    let u0 = p.u.t;
    let uu = p.u.spatial();
    let u02 = u0 * u0;
    let u03 = u02 * u0;
    let v = uu.scale(S::from_f64(1.0) / u0);
    let mut out = ContactJetOf {
        x0: p.x.t,
        x: p.x.spatial(),
        v,
        vdot: ThreeVectorOf::zero(),
        vddot: ThreeVectorOf::zero(),
        order: p.order.min(3),
    };
    if p.order >= 2 {
        let ud0 = p.udot.t;
        let udd = p.udot.spatial();
        out.vdot = udd.scale(S::from_f64(1.0) / u02) - uu.scale(ud0 / u03);
    }
    if p.order >= 3 {
        let ud0 = p.udot.t;
        let udd0 = p.uddot.t;
        let udd = p.udot.spatial();
        let uddd = p.uddot.spatial();
        let u04 = u03 * u0;
        let u05 = u04 * u0;
        // Time-derivative chain rule applied twice to 𝐮/u⁰; the coefficient
        // of the ü⁰𝐮/u⁰⁴ term is 1 (only the (u̇⁰)² term carries the 3).
        out.vddot = uddd.scale(S::from_f64(1.0) / u03) - udd.scale(S::from_f64(3.0) * ud0 / u04)
            + uu.scale(S::from_f64(3.0) * ud0 * ud0 / u05 - udd0 / u04);
    }
    out
}

/// Project a worldline jet to its contact (coordinate-time) jet.
///
/// Fills `𝐯` from order 1, `𝐯′` from order 2, `𝐯″` from order 3; errors with
/// [`Error::ZeroTimeComponent`] when the chart breaks down at `u⁰ = 0`.
pub fn project_contact(p: &JetPoint) -> Result<ContactJet> {
    if p.u.t == 0.0 {
        return Err(Error::ZeroTimeComponent);
    }
    Ok(project_contact_generic(p))
}

/// Residual of the two routes of total differentiation:
/// `D_τ(f∘pr)(p) − u⁰·(D_t f)(pr(p))`, which vanishes identically for any
/// contact function `f` reading at most the 𝐯′ level.
pub fn correspondence_residual(f: &impl ContactFunction, p: &JetPoint) -> Result<f64> {
    if p.u.t == 0.0 {
        return Err(Error::ZeroTimeComponent);
    }
    if p.order < 3 {
        return Err(Error::OrderTooLow {
            order: p.order,
            required: 3,
        });
    }
    debug_assert!(
        f.order() <= 2,
        "correspondence check needs the v‴-free range"
    );
    // D_τ(f∘pr): advance-seed the jet and push the dual scalars through the
    // projection and the function.
    let along_tau = f.eval(&project_contact_generic(&advance_seed(p))).eps;
    // u⁰ · D_t f at the projected point.
    let c = project_contact_generic(p);
    let along_t = f.eval(&advance_seed_contact(&c)).eps;
    Ok(along_tau - p.u.t * along_t)
}

/// Brute-force variational residual
/// `E = ∂𝓛/∂x − D_τ(∂𝓛/∂u) + D_τ²(∂𝓛/∂u̇)`,
/// assembled from nested dual numbers and returned with the index raised to
/// the stored-vector convention.  Vanishes on extremals of `𝓛`.
pub fn euler_poisson_residual_oracle(l: &impl JetFunction, p: &JetPoint) -> Result<FourVector> {
    if p.order < 4 {
        return Err(Error::OrderTooLow {
            order: p.order,
            required: 4,
        });
    }
    let mut raw = [0.0; 4];
    for (comp, r) in raw.iter_mut().enumerate() {
        // ∂𝓛/∂x^α
        let dx = l.eval(&seed_component(p, 0, comp)).eps;
        // D_τ(∂𝓛/∂u^α): inner channel advances the jet, outer channel seeds
        // the component; mixed term sits at .eps.eps.
        let dtu = l.eval(&seed_component(&advance_seed(p), 1, comp)).eps.eps;
        // D_τ²(∂𝓛/∂u̇^α): two advance channels, one component channel.
        let dt2ud = l
            .eval(&seed_component(&advance_seed(&advance_seed(p)), 2, comp))
            .eps
            .eps
            .eps;
        *r = dx - dtu + dt2ud;
    }
    Ok(raise_index(FourVector::from_array(raw)))
}

/// Apply the reparametrization-group element with derivatives
/// `(σ′, σ″, σ‴) = (c, b, e)` (and `σ⁗ = 0`) at the point:
///
/// ```text
/// u ↦ cu,   u̇ ↦ c²u̇ + bu,   ü ↦ c³ü + 3cb·u̇ + e·u,
/// u⃛ ↦ c⁴u⃛ + 6c²b·ü + (4ce + 3b²)·u̇
/// ```
///
/// Levels beyond the jet's order stay zero; the position is untouched.
pub fn reparametrize(p: &JetPoint, c: f64, b: f64, e: f64) -> JetPoint {
    let mut q = *p;
    q.u = p.u.scale(c);
    if p.order >= 2 {
        q.udot = p.udot.scale(c * c) + p.u.scale(b);
    }
    if p.order >= 3 {
        q.uddot = p.uddot.scale(c * c * c) + p.udot.scale(3.0 * c * b) + p.u.scale(e);
    }
    if p.order >= 4 {
        q.utdot = p.utdot.scale(c * c * c * c)
            + p.uddot.scale(6.0 * c * c * b)
            + p.udot.scale(4.0 * c * e + 3.0 * b * b);
    }
    q
}

/// Draw a random jet with components uniform in [−2, 2], resampling the
/// velocity until `u·u ≥ 0.25` keeps it clear of the curvature singularity.
pub fn sample_timelike_jet(rng: &mut crate::rng::XorShift64Star, order: usize) -> JetPoint {
    let vec4 = |r: &mut crate::rng::XorShift64Star| {
        FourVector::new(
            r.uniform(-2.0, 2.0),
            r.uniform(-2.0, 2.0),
            r.uniform(-2.0, 2.0),
            r.uniform(-2.0, 2.0),
        )
    };
    let x = vec4(rng);
    let u = loop {
        let u = vec4(rng);
        if crate::minkowski::dot4(u, u) >= 0.25 {
            break u;
        }
    };
    match order {
        1 => JetPoint::order1(x, u),
        2 => JetPoint::order2(x, u, vec4(rng)),
        3 => JetPoint::order3(x, u, vec4(rng), vec4(rng)),
        4 => JetPoint::order4(x, u, vec4(rng), vec4(rng), vec4(rng)),
        _ => panic!("jet order {order} out of range"),
    }
}

/// Like [`sample_timelike_jet`], but additionally future-pointing (`u⁰ > 0`,
/// hence `u⁰ ≥ 0.5` given the timelike bound).
///
/// The coordinate-time chart covers worldlines traversed with increasing
/// x⁰; identities that relate worldline-parameter quantities to chart
/// quantities (density factorization, momentum pullbacks, the Hamiltonian
/// lift) hold on that sheet and flip sign under u → −u, so their test
/// suites sample from here.
pub fn sample_future_timelike_jet(rng: &mut crate::rng::XorShift64Star, order: usize) -> JetPoint {
    loop {
        let p = sample_timelike_jet(rng, order);
        if p.u.t > 0.0 {
            return p;
        }
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::minkowski::{dot3, dot4, ThreeVector};
    use crate::rng::XorShift64Star;

    /// u·u — reads the velocity level only.
    struct VelocitySquare;
    impl JetFunction for VelocitySquare {
        fn order(&self) -> usize {
            1
        }
        fn eval<S: JetScalar>(&self, p: &JetPointOf<S>) -> S {
            dot4(p.u, p.u)
        }
    }

    /// u·u̇ — reads through the u̇ level.
    struct VelocityAccelDot;
    impl JetFunction for VelocityAccelDot {
        fn order(&self) -> usize {
            2
        }
        fn eval<S: JetScalar>(&self, p: &JetPointOf<S>) -> S {
            dot4(p.u, p.udot)
        }
    }

    /// u⁰ coordinate extraction.
    struct TimeVelocity;
    impl JetFunction for TimeVelocity {
        fn order(&self) -> usize {
            1
        }
        fn eval<S: JetScalar>(&self, p: &JetPointOf<S>) -> S {
            p.u.t
        }
    }

    struct ConstantFn;
    impl JetFunction for ConstantFn {
        fn order(&self) -> usize {
            0
        }
        fn eval<S: JetScalar>(&self, _p: &JetPointOf<S>) -> S {
            S::from_f64(2.5)
        }
    }

    /// (A/2)·‖u‖ — the mass term alone.
    struct MassTerm {
        big_a: f64,
    }
    impl JetFunction for MassTerm {
        fn order(&self) -> usize {
            1
        }
        fn eval<S: JetScalar>(&self, p: &JetPointOf<S>) -> S {
            S::from_f64(self.big_a / 2.0) * dot4(p.u, p.u).sqrt()
        }
    }

    fn rest_frame_jet() -> JetPoint {
        JetPoint::order3(
            FourVector::zero(),
            FourVector::new(1.0, 0.0, 0.0, 0.0),
            FourVector::new(0.0, 1.0, 0.0, 0.0),
            FourVector::zero(),
        )
    }

    #[test]
    fn grad_of_velocity_square() {
        let (gx, gu, gud) = grad_jet(&VelocitySquare, &rest_frame_jet());
        assert_eq!(gx, FourVector::zero());
        assert_eq!(gu, FourVector::new(2.0, 0.0, 0.0, 0.0));
        assert_eq!(gud, FourVector::zero());
    }

    #[test]
    fn grad_carries_metric_signs_through_dot4() {
        let p = JetPoint::order2(
            FourVector::zero(),
            FourVector::new(1.5, 0.25, -0.5, 1.0),
            FourVector::new(0.5, -1.0, 2.0, 0.75),
        );
        let (_, gu, gud) = grad_jet(&VelocityAccelDot, &p);
        // Raw component derivatives of u·u̇ are the lowered partners.
        assert_eq!(raise_index(gu), p.udot);
        assert_eq!(raise_index(gud), p.u);
    }

    #[test]
    fn grad_matches_finite_differences_on_random_jets() {
        let mut rng = XorShift64Star::new(7);
        for _ in 0..200 {
            let p = sample_timelike_jet(&mut rng, 3);
            let (ax, au, aud) = grad_jet(&VelocityAccelDot, &p);
            let (fx, fu, fud) = test_support::fd_grad_jet(&VelocityAccelDot, &p);
            for (a, f) in ax
                .to_array()
                .iter()
                .chain(au.to_array().iter())
                .chain(aud.to_array().iter())
                .zip(
                    fx.to_array()
                        .iter()
                        .chain(fu.to_array().iter())
                        .chain(fud.to_array().iter()),
                )
            {
                assert!((a - f).abs() <= 1e-6 * a.abs().max(1.0), "ad {a} vs fd {f}");
            }
        }
    }

    #[test]
    fn total_derivative_examples() {
        let p = JetPoint::order3(
            FourVector::zero(),
            FourVector::new(2.0, 0.3, -0.4, 0.1),
            FourVector::new(0.7, -0.2, 0.5, 0.9),
            FourVector::new(-0.3, 0.8, 0.2, -0.6),
        );
        assert_eq!(total_derivative_tau(&TimeVelocity, &p).unwrap(), p.udot.t);
        assert_eq!(total_derivative_tau(&ConstantFn, &p).unwrap(), 0.0);
        let d = total_derivative_tau(&VelocitySquare, &p).unwrap();
        assert!((d - 2.0 * dot4(p.u, p.udot)).abs() < 1e-14);
    }

    #[test]
    fn total_derivative_rejects_shallow_jets() {
        let p = JetPoint::order2(
            FourVector::zero(),
            FourVector::new(1.0, 0.0, 0.0, 0.0),
            FourVector::zero(),
        );
        assert!(matches!(
            total_derivative_tau(&VelocityAccelDot, &p),
            Err(Error::OrderTooLow {
                order: 2,
                required: 3
            })
        ));
    }

    #[test]
    fn second_total_derivative_by_nested_advance() {
        // D_τ²(u·u) = 2(u̇·u̇ + u·ü).
        let p = JetPoint::order3(
            FourVector::zero(),
            FourVector::new(2.0, 0.3, -0.4, 0.1),
            FourVector::new(0.7, -0.2, 0.5, 0.9),
            FourVector::new(-0.3, 0.8, 0.2, -0.6),
        );
        let twice = VelocitySquare
            .eval(&advance_seed(&advance_seed(&p)))
            .eps
            .eps;
        let expect = 2.0 * (dot4(p.udot, p.udot) + dot4(p.u, p.uddot));
        assert!((twice - expect).abs() < 1e-13, "{twice} vs {expect}");
    }

    #[test]
    fn projection_examples() {
        let p = JetPoint::order2(
            FourVector::zero(),
            FourVector::new(2.0, 4.0, 0.0, 0.0),
            FourVector::zero(),
        );
        let c = project_contact(&p).unwrap();
        assert_eq!(c.v, ThreeVector::new(2.0, 0.0, 0.0));
        assert_eq!(c.vdot, ThreeVector::zero());

        let p = JetPoint::order2(
            FourVector::zero(),
            FourVector::new(2.0, 4.0, 0.0, 0.0),
            FourVector::new(1.0, 0.0, 0.0, 0.0),
        );
        let c = project_contact(&p).unwrap();
        assert_eq!(c.vdot, ThreeVector::new(-0.5, 0.0, 0.0));
    }

    #[test]
    fn projection_second_level_matches_polynomial_curve() {
        // x⁰(τ) = τ + τ³/6, x¹(τ) = τ²; at τ=1 the true coordinate-time jet
        // has v″ = (2τ³ − 8τ)/(1 + τ²/2)⁵ = −6/1.5⁵.
        let p = JetPoint::order3(
            FourVector::zero(),
            FourVector::new(1.5, 2.0, 0.0, 0.0),
            FourVector::new(1.0, 2.0, 0.0, 0.0),
            FourVector::new(1.0, 0.0, 0.0, 0.0),
        );
        let c = project_contact(&p).unwrap();
        let expect = -6.0 / 1.5f64.powi(5);
        assert!(
            (c.vddot.s1 - expect).abs() < 1e-14,
            "{} vs {expect}",
            c.vddot.s1
        );
    }

    #[test]
    fn projection_chart_breakdown() {
        let p = JetPoint::order1(FourVector::zero(), FourVector::new(0.0, 1.0, 0.0, 0.0));
        assert!(matches!(project_contact(&p), Err(Error::ZeroTimeComponent)));
    }

    #[test]
    fn projection_is_reparametrization_invariant() {
        let mut rng = XorShift64Star::new(11);
        for _ in 0..300 {
            let p = sample_timelike_jet(&mut rng, 3);
            if p.u.t.abs() < 0.3 {
                continue;
            }
            let q = reparametrize(
                &p,
                1.0 + rng.uniform(0.0, 1.0),
                rng.uniform(-1.0, 1.0),
                rng.uniform(-1.0, 1.0),
            );
            let (a, b) = (project_contact(&p).unwrap(), project_contact(&q).unwrap());
            for (x, y) in [
                (a.v.to_array(), b.v.to_array()),
                (a.vdot.to_array(), b.vdot.to_array()),
                (a.vddot.to_array(), b.vddot.to_array()),
            ] {
                for (xi, yi) in x.iter().zip(y.iter()) {
                    assert!(
                        (xi - yi).abs() <= 1e-10 * xi.abs().max(yi.abs()).max(1.0),
                        "{xi} vs {yi}"
                    );
                }
            }
        }
    }

    /// vⁱ extraction.
    struct VComponent(usize);
    impl ContactFunction for VComponent {
        fn order(&self) -> usize {
            1
        }
        fn eval<S: JetScalar>(&self, c: &ContactJetOf<S>) -> S {
            c.v.component(self.0)
        }
    }

    /// 1 + 𝐯² (bold square via the spatial metric).
    struct OnePlusVSquare;
    impl ContactFunction for OnePlusVSquare {
        fn order(&self) -> usize {
            1
        }
        fn eval<S: JetScalar>(&self, c: &ContactJetOf<S>) -> S {
            S::from_f64(1.0) + dot3(c.v, c.v)
        }
    }

    /// v′ⁱ·vⁱ product mixing the first two levels.
    struct MixedProduct;
    impl ContactFunction for MixedProduct {
        fn order(&self) -> usize {
            2
        }
        fn eval<S: JetScalar>(&self, c: &ContactJetOf<S>) -> S {
            dot3(c.v, c.vdot)
        }
    }

    struct ConstantContact;
    impl ContactFunction for ConstantContact {
        fn order(&self) -> usize {
            0
        }
        fn eval<S: JetScalar>(&self, _c: &ContactJetOf<S>) -> S {
            S::from_f64(-3.5)
        }
    }

    #[test]
    fn correspondence_residual_vanishes_for_test_basis() {
        let mut rng = XorShift64Star::new(5);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let p = sample_timelike_jet(&mut rng, 3);
            if p.u.t.abs() < 0.3 {
                continue;
            }
            for f in [0usize, 1, 2] {
                let r = correspondence_residual(&VComponent(f), &p).unwrap();
                worst = worst.max(r.abs());
            }
            worst = worst.max(correspondence_residual(&OnePlusVSquare, &p).unwrap().abs());
            worst = worst.max(correspondence_residual(&MixedProduct, &p).unwrap().abs());
            assert_eq!(correspondence_residual(&ConstantContact, &p).unwrap(), 0.0);
        }
        assert!(worst <= 1e-8, "worst correspondence residual {worst}");
    }

    #[test]
    fn euler_poisson_vanishes_on_straight_worldline() {
        let p = JetPoint::order4(
            FourVector::new(0.3, -0.2, 0.9, 0.0),
            FourVector::new(1.3, 0.2, -0.4, 0.1),
            FourVector::zero(),
            FourVector::zero(),
            FourVector::zero(),
        );
        let e = euler_poisson_residual_oracle(&MassTerm { big_a: 2.0 }, &p).unwrap();
        for c in e.to_array() {
            assert!(c.abs() < 1e-14, "component {c}");
        }
    }

    #[test]
    fn euler_poisson_nonzero_off_extremal() {
        let p = JetPoint::order4(
            FourVector::zero(),
            FourVector::new(2.0, 1.0, 0.0, 0.0),
            FourVector::new(0.0, 1.0, 0.0, 0.0),
            FourVector::zero(),
            FourVector::zero(),
        );
        let e = euler_poisson_residual_oracle(&MassTerm { big_a: 2.0 }, &p).unwrap();
        assert!(e.to_array().iter().any(|c| c.abs() > 1e-3));
    }

    #[test]
    fn euler_poisson_requires_full_jet() {
        let p = rest_frame_jet();
        assert!(matches!(
            euler_poisson_residual_oracle(&MassTerm { big_a: 2.0 }, &p),
            Err(Error::OrderTooLow {
                order: 3,
                required: 4
            })
        ));
    }

    #[test]
    fn sampled_jets_stay_timelike() {
        let mut rng = XorShift64Star::new(42);
        for _ in 0..500 {
            let p = sample_timelike_jet(&mut rng, 4);
            assert!(dot4(p.u, p.u) >= 0.25);
            assert_eq!(p.order, 4);
            for lvl in 0..=4 {
                assert!(p.level(lvl).to_array().iter().all(|c| c.abs() <= 2.0));
            }
        }
    }
}
