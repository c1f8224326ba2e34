// Copyright 2026 The ROA Authors
// SPDX-License-Identifier: Apache-2.0

//! Scalar abstraction shared by every numerical kernel.

use std::fmt::{Debug, Display, LowerExp};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating point type the dynamics can be instantiated with.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` constant or parameter into this type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex amplitude over a [`Real`] scalar.
pub type C<R> = Complex<R>;

#[inline]
pub(crate) fn c<R: Real>(re: R, im: R) -> C<R> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn czero<R: Real>() -> C<R> {
    Complex::new(R::zero(), R::zero())
}

#[inline]
pub(crate) fn cone<R: Real>() -> C<R> {
    Complex::new(R::one(), R::zero())
}

/// Lifts an `f64` complex number into `C<R>`.
#[inline]
pub fn c_from_f64<R: Real>(z: Complex<f64>) -> C<R> {
    Complex::new(R::lit(z.re), R::lit(z.im))
}

/// Lowers a `C<R>` into `f64` precision.
#[inline]
pub fn c_to_f64<R: Real>(z: C<R>) -> Complex<f64> {
    Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy())
}
