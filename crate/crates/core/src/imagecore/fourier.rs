// SPDX-License-Identifier: Apache-2.0

//! Unnormalized forward / `1/(W*H)`-normalized inverse 2-D DFT over
//! arbitrary sizes (rustfft picks mixed-radix or Bluestein plans).

use rustfft::num_complex::Complex;
use rustfft::{FftDirection, FftPlanner};

use super::{ImageError, Raster};
use crate::Real;

/// Row-major 2-D spectrum. Bin `(kx, ky)` follows the DFT index order; use
/// [`signed_frequency`] to map an index to its signed frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T = f32> {
    width: usize,
    height: usize,
    pixel_size: f32,
    data: Vec<Complex<T>>,
}

impl<T: Real> Spectrum<T> {
    pub fn new(width: usize, height: usize, pixel_size: f32, data: Vec<Complex<T>>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::ZeroDimension { width, height });
        }
        if data.len() != width * height {
            return Err(ImageError::DimensionMismatch { expected: width * height, found: data.len() });
        }
        if !(pixel_size.is_finite() && pixel_size > 0.0) {
            return Err(ImageError::InvalidPixelSize(pixel_size));
        }
        if let Some(index) = data.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(ImageError::NonFinite { index, x: index % width, y: index / width });
        }
        Ok(Self { width, height, pixel_size, data })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_size(&self) -> f32 {
        self.pixel_size
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn get(&self, kx: usize, ky: usize) -> Complex<T> {
        self.data[ky * self.width + kx]
    }

    /// Multiplies every bin by `filter(kx_index, ky_index)`.
    pub fn apply(&mut self, mut filter: impl FnMut(usize, usize) -> Complex<T>) {
        let w = self.width;
        for (i, c) in self.data.iter_mut().enumerate() {
            *c = *c * filter(i % w, i / w);
        }
    }

    /// Sum of squared magnitudes, accumulated in f64.
    pub fn energy(&self) -> f64 {
        self.data.iter().map(|c| c.re.as_f64().powi(2) + c.im.as_f64().powi(2)).sum()
    }
}

/// Signed frequency of DFT index `i` for a transform of length `n`:
/// `i` for `i < n/2`, `i - n` otherwise.
pub fn signed_frequency(i: usize, n: usize) -> i64 {
    if 2 * i < n {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

fn transform<T: Real>(width: usize, height: usize, buf: &mut [Complex<T>], direction: FftDirection) {
    let mut planner = FftPlanner::<T>::new();
    let row_fft = planner.plan_fft(width, direction);
    let mut scratch = vec![Complex::default(); row_fft.get_inplace_scratch_len()];
    for row in buf.chunks_exact_mut(width) {
        row_fft.process_with_scratch(row, &mut scratch);
    }

    let mut columns = vec![Complex::default(); width * height];
    for y in 0..height {
        for x in 0..width {
            columns[x * height + y] = buf[y * width + x];
        }
    }
    let col_fft = planner.plan_fft(height, direction);
    scratch.resize(col_fft.get_inplace_scratch_len(), Complex::default());
    for col in columns.chunks_exact_mut(height) {
        col_fft.process_with_scratch(col, &mut scratch);
    }
    for x in 0..width {
        for y in 0..height {
            buf[y * width + x] = columns[x * height + y];
        }
    }
}

/// Forward transform, `X[k] = sum_n x[n] exp(-2 pi i k.n / N)`, unnormalized.
///
/// Rasters are finite by construction, so the transform cannot fail.
pub fn dft2<T: Real>(r: &Raster<T>) -> Spectrum<T> {
    let (w, h) = (r.width(), r.height());
    let mut buf: Vec<Complex<T>> = r.data().iter().map(|&v| Complex::new(v, T::zero())).collect();
    transform(w, h, &mut buf, FftDirection::Forward);
    Spectrum { width: w, height: h, pixel_size: r.pixel_size(), data: buf }
}

fn inverse_complex<T: Real>(s: &Spectrum<T>) -> Vec<Complex<T>> {
    let mut buf = s.data.clone();
    transform(s.width, s.height, &mut buf, FftDirection::Inverse);
    let scale = T::of(1.0 / (s.width * s.height) as f64);
    for c in buf.iter_mut() {
        *c = *c * scale;
    }
    buf
}

/// Inverse transform; returns the real part.
pub fn idft2<T: Real>(s: &Spectrum<T>) -> Result<Raster<T>, ImageError> {
    Ok(idft2_parts(s)?.0)
}

/// Inverse transform returning `(real, imaginary)` parts separately.
pub fn idft2_parts<T: Real>(s: &Spectrum<T>) -> Result<(Raster<T>, Raster<T>), ImageError> {
    let buf = inverse_complex(s);
    let re = buf.iter().map(|c| c.re).collect();
    let im = buf.iter().map(|c| c.im).collect();
    Ok((Raster::new(s.width, s.height, re, s.pixel_size)?, Raster::new(s.width, s.height, im, s.pixel_size)?))
}
