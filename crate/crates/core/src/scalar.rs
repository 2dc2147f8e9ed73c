// SPDX-License-Identifier: Apache-2.0

//! Floating point abstraction shared by every numerical module.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Storage scalar for rasters, spectra and tensors: `f32` or `f64`.
///
/// Reductions (sums, moments, histograms) are always carried out in `f64`
/// regardless of the storage type.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + rustfft::FftNum
    + Default
    + Debug
    + Display
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Lossy conversion from `f64`.
    #[inline]
    fn of(v: f64) -> Self {
        // Never fails for f32/f64; out-of-range values saturate to +-inf.
        <Self as FromPrimitive>::from_f64(v).unwrap()
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap()
    }

    #[inline]
    fn as_f32(self) -> f32 {
        self.to_f32().unwrap()
    }
}

impl Real for f32 {}
impl Real for f64 {}
