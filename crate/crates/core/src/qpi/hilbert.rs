// SPDX-License-Identifier: Apache-2.0

//! Integration of the sheared phase difference along x in k-space.
//!
//! The measured image is `dphi = shear * d(phi)/dx`, so its spectrum is
//! `i k_x shear Phi(k)`. Both modes divide this back out with a kernel
//! whose phase is the Hilbert sign `-i sgn(k_x)`:
//!
//! * `Sgn`:    `H = -i sgn(k_x) / (|k_x| shear)` (exact inverse off the `k_x = 0` column)
//! * `Wiener`: `H = -i sgn(k_x) / ((|k_x| + l_reg) shear)`
//!
//! `k_x` is the angular wavenumber in rad/um. The `k_x = 0` column carries no
//! information about phi and is zeroed, so every output row has zero mean.
//! The result is the real part of the inverse transform (equivalently the
//! imaginary part of the inverse of the un-rotated `sgn(k_x)/|k_x|` filter).

use std::f64::consts::PI;

use rustfft::num_complex::Complex;

use super::{GradientImage, PhaseImage, ReconError};
use crate::imagecore::{dft2, idft2_parts, signed_frequency, Raster};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegrationMode {
    Sgn,
    /// Regularized integrator; `l_reg` in rad/um.
    Wiener {
        l_reg: f64,
    },
}

impl IntegrationMode {
    /// Wiener mode with `l_reg` at 1e-3 of the Nyquist wavenumber `pi / pixel_size`.
    pub fn wiener_default(pixel_size: f32) -> Self {
        IntegrationMode::Wiener { l_reg: 1e-3 * PI / pixel_size as f64 }
    }
}

pub fn integrate_hilbert<T: Real>(g: &GradientImage<T>, mode: IntegrationMode) -> Result<PhaseImage<T>, ReconError> {
    Ok(integrate_hilbert_with_residue(g, mode)?.0)
}

/// Like [`integrate_hilbert`], also returning the imaginary residue of the
/// inverse transform (non-zero only through the unpaired Nyquist column).
pub fn integrate_hilbert_with_residue<T: Real>(
    g: &GradientImage<T>,
    mode: IntegrationMode,
) -> Result<(PhaseImage<T>, Raster<T>), ReconError> {
    let shear = g.shear() as f64;
    if !shear.is_finite() || shear == 0.0 {
        return Err(ReconError::ZeroShear(g.shear()));
    }
    let l_reg = match mode {
        IntegrationMode::Sgn => 0.0,
        IntegrationMode::Wiener { l_reg } => {
            if !(l_reg.is_finite() && l_reg > 0.0) {
                return Err(ReconError::InvalidRegularization(l_reg));
            }
            l_reg
        }
    };
    let w = g.raster.width();
    let dk = 2.0 * PI / (w as f64 * g.raster.pixel_size() as f64);
    let kernel: Vec<Complex<T>> = (0..w)
        .map(|i| {
            let f = signed_frequency(i, w);
            if f == 0 {
                return Complex::new(T::zero(), T::zero());
            }
            let k = f as f64 * dk;
            let magnitude = 1.0 / ((k.abs() + l_reg) * shear);
            Complex::new(T::zero(), T::of(-k.signum() * magnitude))
        })
        .collect();

    let mut spectrum = dft2(&g.raster);
    spectrum.apply(|kx, _| kernel[kx]);
    let (re, im) = idft2_parts(&spectrum)?;
    Ok((PhaseImage::new(re, g.meta), im))
}
