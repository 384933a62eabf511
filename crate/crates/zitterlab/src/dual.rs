//! Forward-mode dual numbers, nestable for higher derivatives.
//!
//! A `Dual<f64>` carries one derivative channel; `Dual<Dual<f64>>` carries
//! second derivatives, and so on.  Every arithmetic routine in the crate is
//! written against the [`JetScalar`] trait so it can run on plain floats or
//! on any nesting depth without change.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Scalar interface required by the geometric kernels.
///
/// Implemented by `f64` and by [`Dual<S>`] for any `S: JetScalar`, so a
/// single generic function body serves both plain evaluation and
/// forward-mode differentiation at arbitrary nesting depth.
pub trait JetScalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Embed a constant (derivative channels zero).
    fn from_f64(x: f64) -> Self;
    /// The underlying real value, dropping all derivative channels.
    fn real(self) -> f64;
    /// Square root, propagated through every derivative channel.
    fn sqrt(self) -> Self;
}

impl JetScalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn real(self) -> f64 {
        self
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
}

/// A number `re + eps·ε` with `ε² = 0`.
///
/// `eps` tracks the derivative of `re` with respect to whatever parameter
/// the caller seeded.  Nesting (`Dual<Dual<…>>`) composes channels: each
/// level differentiates everything below it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual<S> {
    /// Value part.
    pub re: S,
    /// Derivative part.
    pub eps: S,
}

impl<S: JetScalar> Dual<S> {
    /// A constant: value `re`, derivative zero.
    pub fn constant(re: S) -> Self {
        Dual {
            re,
            eps: S::from_f64(0.0),
        }
    }

    /// A seeded variable: value `re`, derivative `eps`.
    pub fn new(re: S, eps: S) -> Self {
        Dual { re, eps }
    }
}

impl<S: JetScalar> Add for Dual<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Dual {
            re: self.re + rhs.re,
            eps: self.eps + rhs.eps,
        }
    }
}

impl<S: JetScalar> Sub for Dual<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Dual {
            re: self.re - rhs.re,
            eps: self.eps - rhs.eps,
        }
    }
}

impl<S: JetScalar> Mul for Dual<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Dual {
            re: self.re * rhs.re,
            eps: self.re * rhs.eps + self.eps * rhs.re,
        }
    }
}

impl<S: JetScalar> Div for Dual<S> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let q = self.re / rhs.re;
        Dual {
            re: q,
            eps: (self.eps - q * rhs.eps) / rhs.re,
        }
    }
}

impl<S: JetScalar> Neg for Dual<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Dual {
            re: -self.re,
            eps: -self.eps,
        }
    }
}

impl<S: JetScalar> JetScalar for Dual<S> {
    fn from_f64(x: f64) -> Self {
        Dual::constant(S::from_f64(x))
    }
    fn real(self) -> f64 {
        self.re.real()
    }
    fn sqrt(self) -> Self {
        let r = self.re.sqrt();
        Dual {
            re: r,
            eps: self.eps / (S::from_f64(2.0) * r),
        }
    }
}
