//! Scalar abstraction for the numeric core.
//!
//! Everything numerical in this crate is generic over [`Scalar`], which is
//! `f32` or `f64` in practice. The trait bundles the `num-traits` float
//! surface with the couple of sampling primitives the simulator needs, so
//! call sites never mention a concrete distribution type.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StandardUniform};

/// Floating-point scalar: `f32` or `f64`.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum<Self>
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant into this scalar type.
    fn cast(x: f64) -> Self;

    /// Widens to `f64` (lossless for both supported types in the ranges we use).
    fn to_f64_lossy(self) -> f64;

    /// One standard normal draw.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// One draw uniform on [-1, 1].
    fn uniform_pm1<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

macro_rules! impl_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            #[inline]
            fn cast(x: f64) -> Self {
                x as $t
            }

            #[inline]
            fn to_f64_lossy(self) -> f64 {
                self as f64
            }

            #[inline]
            fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                <StandardNormal as Distribution<$t>>::sample(&StandardNormal, rng)
            }

            #[inline]
            fn uniform_pm1<R: Rng + ?Sized>(rng: &mut R) -> Self {
                let u: $t = <StandardUniform as Distribution<$t>>::sample(&StandardUniform, rng);
                <$t>::cast(2.0) * u - <$t>::cast(1.0)
            }
        }
    };
}

impl_scalar!(f32);
impl_scalar!(f64);
