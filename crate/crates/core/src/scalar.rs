//! Scalar abstractions.
//!
//! Drift algebra only needs an ordered field, so it works over exact
//! rationals as well as floats. Anything that samples or simulates needs
//! [`Real`], which adds the transcendental functions and random draws.

use std::fmt::Debug;

use num_rational::Rational64;
use num_traits::{Float, FromPrimitive, Num, Signed};
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

/// Ordered field used by the drift algebra.
pub trait Scalar:
    Num + Signed + Copy + PartialOrd + FromPrimitive + Debug + Send + Sync + 'static
{
    /// False for NaN and infinities; always true for exact types.
    fn is_finite_value(&self) -> bool;

    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }
}

impl Scalar for f64 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for f32 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for Rational64 {
    fn is_finite_value(&self) -> bool {
        true
    }
}

/// Floating-point scalar that the simulators run on.
pub trait Real: Scalar + Float {
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;
    fn standard_exponential<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn from_f64_lossy(x: f64) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("finite f64 converts")
    }

    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("float converts to f64")
    }
}

impl Real for f64 {
    #[inline]
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }

    #[inline]
    fn standard_exponential<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(Exp1)
    }
}

impl Real for f32 {
    #[inline]
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(StandardNormal)
    }

    #[inline]
    fn standard_exponential<R: Rng + ?Sized>(rng: &mut R) -> Self {
        rng.sample(Exp1)
    }
}
