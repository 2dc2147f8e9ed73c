// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use super::{check_dims, BinaryMask, SegError};
use crate::qpi::PhaseImage;
use crate::Real;

/// Refraction increment in µm³/pg (0.2 mL/g).
pub const DEFAULT_GAMMA: f64 = 0.2;

/// `m = λ / (2πγ) · Σ_mask φ · pixel_area`, in picograms.
pub fn dry_mass<T: Real>(phase: &PhaseImage<T>, mask: &BinaryMask, gamma: f64) -> Result<f64, SegError> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(SegError::InvalidGamma(gamma));
    }
    let r = &phase.raster;
    check_dims("dry_mass", (r.width(), r.height()), mask.dims())?;
    let sum: f64 = r.data().iter().zip(mask.mask.bits()).filter(|(_, &m)| m).map(|(v, _)| v.as_f64()).sum();
    Ok(f64::from(phase.meta.wavelength) / (2.0 * PI * gamma) * sum * r.pixel_area())
}

/// Subtracts the mean phase over the pixels outside `foreground`.
pub fn subtract_background<T: Real>(phase: &PhaseImage<T>, foreground: &BinaryMask) -> Result<PhaseImage<T>, SegError> {
    let r = &phase.raster;
    check_dims("subtract_background", (r.width(), r.height()), foreground.dims())?;
    let (mut sum, mut n) = (0.0, 0usize);
    for (v, &fg) in r.data().iter().zip(foreground.mask.bits()) {
        if !fg {
            sum += v.as_f64();
            n += 1;
        }
    }
    if n == 0 {
        return Err(SegError::EmptyBackground);
    }
    let offset = sum / n as f64;
    let raster = r.map(|v| T::of(v.as_f64() - offset))?;
    Ok(PhaseImage::new(raster, phase.meta))
}
