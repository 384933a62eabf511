//! Four-vector algebra in Minkowski signature (+,−,−,−).
//!
//! Conventions used throughout the crate:
//!
//! * `dot4` contracts with the diagonal metric (1,−1,−1,−1).
//! * The "bold" three-vector dot `dot3` is the same contraction restricted
//!   to spatial indices, i.e. the **negative** Euclidean dot.  With this
//!   convention `1 + v·v` is the usual free-particle factor `1 − |v|²`.
//! * The bivector norm squared is `‖u̇∧u‖² = (u·u̇)² − (u·u)(u̇·u̇)`, which is
//!   non-negative whenever `u` is timelike, so worldline curvatures are real.
//!
//! Vectors and covectors share one representation; every contraction goes
//! through [`dot4`]/[`dot3`].

use std::ops::{Add, Neg, Sub};

use crate::dual::JetScalar;
use crate::error::{Error, Result};

/// A space-time vector `(t, s1, s2, s3)` over any [`JetScalar`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourVectorOf<S> {
    /// Time (index-0) component.
    pub t: S,
    /// Spatial components.
    pub s1: S,
    pub s2: S,
    pub s3: S,
}

/// A spatial vector `(s1, s2, s3)` over any [`JetScalar`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeVectorOf<S> {
    pub s1: S,
    pub s2: S,
    pub s3: S,
}

/// Plain-float four-vector (units with c = 1).
pub type FourVector = FourVectorOf<f64>;
/// Plain-float spatial vector.
pub type ThreeVector = ThreeVectorOf<f64>;

impl<S: JetScalar> FourVectorOf<S> {
    pub fn new(t: S, s1: S, s2: S, s3: S) -> Self {
        FourVectorOf { t, s1, s2, s3 }
    }

    pub fn zero() -> Self {
        Self::splat(S::from_f64(0.0))
    }

    pub fn splat(v: S) -> Self {
        FourVectorOf {
            t: v,
            s1: v,
            s2: v,
            s3: v,
        }
    }

    pub fn from_array(c: [S; 4]) -> Self {
        FourVectorOf {
            t: c[0],
            s1: c[1],
            s2: c[2],
            s3: c[3],
        }
    }

    pub fn to_array(self) -> [S; 4] {
        [self.t, self.s1, self.s2, self.s3]
    }

    /// Spatial part as a three-vector.
    pub fn spatial(self) -> ThreeVectorOf<S> {
        ThreeVectorOf {
            s1: self.s1,
            s2: self.s2,
            s3: self.s3,
        }
    }

    pub fn scale(self, c: S) -> Self {
        FourVectorOf {
            t: self.t * c,
            s1: self.s1 * c,
            s2: self.s2 * c,
            s3: self.s3 * c,
        }
    }

    pub fn map<T: JetScalar>(self, f: impl Fn(S) -> T) -> FourVectorOf<T> {
        FourVectorOf {
            t: f(self.t),
            s1: f(self.s1),
            s2: f(self.s2),
            s3: f(self.s3),
        }
    }

    /// Component by index 0..4 (0 = time).
    pub fn component(self, i: usize) -> S {
        self.to_array()[i]
    }

    /// Copy with component `i` replaced.
    pub fn with_component(self, i: usize, v: S) -> Self {
        let mut c = self.to_array();
        c[i] = v;
        Self::from_array(c)
    }
}

impl FourVector {
    /// True when every component is finite.
    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|c| c.is_finite())
    }
}

impl<S: JetScalar> ThreeVectorOf<S> {
    pub fn new(s1: S, s2: S, s3: S) -> Self {
        ThreeVectorOf { s1, s2, s3 }
    }

    pub fn zero() -> Self {
        let z = S::from_f64(0.0);
        ThreeVectorOf {
            s1: z,
            s2: z,
            s3: z,
        }
    }

    pub fn from_array(c: [S; 3]) -> Self {
        ThreeVectorOf {
            s1: c[0],
            s2: c[1],
            s3: c[2],
        }
    }

    pub fn to_array(self) -> [S; 3] {
        [self.s1, self.s2, self.s3]
    }

    pub fn scale(self, c: S) -> Self {
        ThreeVectorOf {
            s1: self.s1 * c,
            s2: self.s2 * c,
            s3: self.s3 * c,
        }
    }

    pub fn map<T: JetScalar>(self, f: impl Fn(S) -> T) -> ThreeVectorOf<T> {
        ThreeVectorOf {
            s1: f(self.s1),
            s2: f(self.s2),
            s3: f(self.s3),
        }
    }

    /// Component by index 0..3.
    pub fn component(self, i: usize) -> S {
        self.to_array()[i]
    }

    /// Copy with component `i` replaced.
    pub fn with_component(self, i: usize, v: S) -> Self {
        let mut c = self.to_array();
        c[i] = v;
        Self::from_array(c)
    }
}

impl<S: JetScalar> Add for FourVectorOf<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        FourVectorOf {
            t: self.t + rhs.t,
            s1: self.s1 + rhs.s1,
            s2: self.s2 + rhs.s2,
            s3: self.s3 + rhs.s3,
        }
    }
}

impl<S: JetScalar> Sub for FourVectorOf<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        FourVectorOf {
            t: self.t - rhs.t,
            s1: self.s1 - rhs.s1,
            s2: self.s2 - rhs.s2,
            s3: self.s3 - rhs.s3,
        }
    }
}

impl<S: JetScalar> Neg for FourVectorOf<S> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(S::from_f64(-1.0))
    }
}

impl<S: JetScalar> Add for ThreeVectorOf<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        ThreeVectorOf {
            s1: self.s1 + rhs.s1,
            s2: self.s2 + rhs.s2,
            s3: self.s3 + rhs.s3,
        }
    }
}

impl<S: JetScalar> Sub for ThreeVectorOf<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        ThreeVectorOf {
            s1: self.s1 - rhs.s1,
            s2: self.s2 - rhs.s2,
            s3: self.s3 - rhs.s3,
        }
    }
}

impl<S: JetScalar> Neg for ThreeVectorOf<S> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(S::from_f64(-1.0))
    }
}

/// Metric contraction `a₀b₀ − a₁b₁ − a₂b₂ − a₃b₃`.
pub fn dot4<S: JetScalar>(a: FourVectorOf<S>, b: FourVectorOf<S>) -> S {
    a.t * b.t - a.s1 * b.s1 - a.s2 * b.s2 - a.s3 * b.s3
}

/// Spatial metric contraction `−(a₁b₁ + a₂b₂ + a₃b₃)`.
///
/// The bold square `𝐮² = dot3(𝐮,𝐮)` is therefore ≤ 0; `1 + 𝐯²` plays the
/// role of `1 − |v|²` in ordinary notation.
pub fn dot3<S: JetScalar>(a: ThreeVectorOf<S>, b: ThreeVectorOf<S>) -> S {
    -(a.s1 * b.s1 + a.s2 * b.s2 + a.s3 * b.s3)
}

/// `‖u‖ = sqrt(u·u)` for timelike `u`.
///
/// Errors with [`Error::NonTimelike`] when `u·u ≤ 0`.
pub fn norm_timelike(u: FourVector) -> Result<f64> {
    let q = dot4(u, u);
    if q <= 0.0 {
        return Err(Error::NonTimelike { u_sq: q, min: 0.0 });
    }
    Ok(q.sqrt())
}

/// Bivector norm `‖u̇∧u‖ = sqrt((u·u̇)² − (u·u)(u̇·u̇))`.
///
/// The radicand is the Gram determinant with the sign that makes it
/// non-negative for timelike `u` (reverse Cauchy-Schwarz).  Radicands in
/// `[−ε, 0]` with `ε = 1e−12·scale` are treated as rounding noise and
/// clamped to zero; anything more negative is a genuinely non-spacelike
/// wedge and errors with [`Error::NegativeRadicand`].
pub fn wedge_norm(udot: FourVector, u: FourVector) -> Result<f64> {
    let p = dot4(u, udot);
    let q = dot4(u, u);
    let r = dot4(udot, udot);
    let radicand = p * p - q * r;
    let scale = (p * p).abs().max((q * r).abs()).max(1.0);
    let tolerance = 1e-12 * scale;
    if radicand < -tolerance {
        return Err(Error::NegativeRadicand {
            radicand,
            tolerance,
        });
    }
    Ok(radicand.max(0.0).sqrt())
}

/// First curvature of a worldline: `k = ‖u̇∧u‖ / ‖u‖³`.
pub fn curvature(u: FourVector, udot: FourVector) -> Result<f64> {
    let n = norm_timelike(u)?;
    Ok(wedge_norm(udot, u)? / (n * n * n))
}

/// Raise (equivalently lower) the index of raw component-derivatives.
///
/// Gradients with respect to raw vector components are covector components;
/// negating the spatial entries converts them to the contravariant
/// convention in which every vector of this crate is stored, so that all
/// pairings can go through [`dot4`].  The metric is its own inverse, so the
/// same map lowers indices.
pub fn raise_index(c: FourVector) -> FourVector {
    FourVector::new(c.t, -c.s1, -c.s2, -c.s3)
}

/// Spatial analogue of [`raise_index`]: all three entries flip sign.
pub fn raise_index3(c: ThreeVector) -> ThreeVector {
    ThreeVector::new(-c.s1, -c.s2, -c.s3)
}
