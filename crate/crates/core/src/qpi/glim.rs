// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::{FRAC_PI_2, PI};

use super::{PhaseImage, ReconError};
use crate::imagecore::{ImageMeta, Mask, Raster};
use crate::Real;

/// Four phase-shifted GLIM intensity frames with their modulator offsets.
#[derive(Debug, Clone)]
pub struct FrameSet<T = f32> {
    frames: [Raster<T>; 4],
    offsets: [f64; 4],
    meta: ImageMeta,
}

const OFFSET_TOLERANCE: f64 = 1e-6;

impl<T: Real> FrameSet<T> {
    pub fn new(frames: [Raster<T>; 4], offsets: [f64; 4], meta: ImageMeta) -> Result<Self, ReconError> {
        let first = &frames[0];
        for (n, f) in frames.iter().enumerate().skip(1) {
            if !f.same_shape(first) || f.pixel_size() != first.pixel_size() {
                return Err(ReconError::ShapeMismatch(format!(
                    "frame {n} is {}x{} @ {} um, frame 0 is {}x{} @ {} um",
                    f.width(),
                    f.height(),
                    f.pixel_size(),
                    first.width(),
                    first.height(),
                    first.pixel_size()
                )));
            }
        }
        for (n, f) in frames.iter().enumerate() {
            if let Some(index) = f.data().iter().position(|v| *v < T::zero()) {
                return Err(ReconError::NegativeIntensity { frame: n, index });
            }
        }
        let bias = offsets[0];
        for (n, &eps) in offsets.iter().enumerate() {
            let expected = bias + n as f64 * FRAC_PI_2;
            if !eps.is_finite() || (eps - expected).abs() > OFFSET_TOLERANCE {
                return Err(ReconError::InvalidOffsets(offsets));
            }
        }
        Ok(Self { frames, offsets, meta })
    }

    /// Frames at the nominal offsets `0, pi/2, pi, 3pi/2`.
    pub fn quadrature(frames: [Raster<T>; 4], meta: ImageMeta) -> Result<Self, ReconError> {
        Self::new(frames, [0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2], meta)
    }

    pub fn frames(&self) -> &[Raster<T>; 4] {
        &self.frames
    }

    pub fn offsets(&self) -> [f64; 4] {
        self.offsets
    }

    /// Common modulator bias `eps0`.
    pub fn bias(&self) -> f64 {
        self.offsets[0]
    }

    pub fn meta(&self) -> &ImageMeta {
        &self.meta
    }

    /// Multiplies every intensity by `c`.
    pub fn scaled(&self, c: T) -> Result<Self, ReconError> {
        let frames = [0, 1, 2, 3].map(|n| self.frames[n].map(|v| v * c));
        let [a, b, d, e] = frames;
        Self::new([a?, b?, d?, e?], self.offsets, self.meta)
    }
}

/// Measured phase difference between the two sheared beams, in radians.
#[derive(Debug, Clone)]
pub struct GradientImage<T = f32> {
    pub raster: Raster<T>,
    pub meta: ImageMeta,
    /// False where the four frames carried no modulation and the gradient
    /// was forced to zero.
    pub quality: Mask,
}

impl<T: Real> GradientImage<T> {
    /// Wraps an already-computed gradient with every pixel marked valid.
    pub fn from_raster(raster: Raster<T>, meta: ImageMeta) -> Self {
        let quality = Mask::full(raster.width(), raster.height()).expect("raster is non-empty");
        Self { raster, meta, quality }
    }

    pub fn shear(&self) -> f32 {
        self.meta.shear
    }
}

/// Phase difference implied by the model for a phase map:
/// `dphi(x) = (phi(x+1) - phi(x)) * shear / pixel_size`, periodic in x.
pub fn model_gradient<T: Real>(phase: &PhaseImage<T>) -> Raster<T> {
    let r = &phase.raster;
    let (w, h) = (r.width(), r.height());
    let scale = phase.meta.shear as f64 / r.pixel_size() as f64;
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        let row = r.row(y);
        for x in 0..w {
            let next = row[(x + 1) % w].as_f64();
            out.push(T::of((next - row[x].as_f64()) * scale));
        }
    }
    Raster::from_parts(w, h, out, r.pixel_size())
}

/// Renders the four equal-arm GLIM frames
/// `I_n = 2b + 2b cos(dphi + n pi/2 + eps0)` for a phase map.
pub fn simulate_glim_frames<T: Real>(
    phase: &PhaseImage<T>,
    background: &Raster<T>,
    eps0: f64,
) -> Result<FrameSet<T>, ReconError> {
    if !phase.raster.same_shape(background) {
        return Err(ReconError::ShapeMismatch(format!(
            "phase is {}x{}, background is {}x{}",
            phase.raster.width(),
            phase.raster.height(),
            background.width(),
            background.height()
        )));
    }
    if let Some(index) = background.data().iter().position(|v| *v <= T::zero()) {
        return Err(ReconError::NonPositiveBackground { index, value: background.data()[index].as_f64() });
    }
    if !(phase.meta.shear.is_finite() && phase.meta.shear != 0.0) {
        return Err(ReconError::ZeroShear(phase.meta.shear));
    }
    let gradient = model_gradient(phase);
    let offsets = [0, 1, 2, 3].map(|n| eps0 + n as f64 * FRAC_PI_2);
    let (w, h, p) = (background.width(), background.height(), background.pixel_size());
    let frames = offsets.map(|eps| {
        let data = gradient
            .data()
            .iter()
            .zip(background.data())
            .map(|(&g, &b)| {
                let b = b.as_f64();
                // I + I_s + 2 sqrt(I I_s) cos(...) with I = I_s = b
                T::of(2.0 * b + 2.0 * b * (g.as_f64() + eps).cos())
            })
            .collect();
        Raster::from_parts(w, h, data, p)
    });
    FrameSet::new(frames, offsets, phase.meta)
}

/// Relative modulation below which a pixel is treated as unmodulated.
const MIN_MODULATION: f64 = 1e-7;

fn wrap_half_open(v: f64) -> f64 {
    let mut v = (v + PI).rem_euclid(2.0 * PI) - PI;
    if v <= -PI {
        v += 2.0 * PI;
    }
    v
}

/// Four-step retrieval `dphi = atan2(I3 - I1, I0 - I2) - eps0`, wrapped to
/// `(-pi, pi]`.
pub fn retrieve_gradient<T: Real>(fs: &FrameSet<T>) -> GradientImage<T> {
    let [i0, i1, i2, i3] = fs.frames();
    let (w, h, p) = (i0.width(), i0.height(), i0.pixel_size());
    let bias = fs.bias();
    let mut data = Vec::with_capacity(w * h);
    let mut quality = Vec::with_capacity(w * h);
    for k in 0..w * h {
        let (a, b, c, d) = (i0.data()[k].as_f64(), i1.data()[k].as_f64(), i2.data()[k].as_f64(), i3.data()[k].as_f64());
        let num = d - b;
        let den = a - c;
        let level = 0.25 * (a + b + c + d);
        let modulation = num.hypot(den);
        if modulation <= MIN_MODULATION * level.max(f64::MIN_POSITIVE) {
            data.push(T::zero());
            quality.push(false);
        } else {
            data.push(T::of(wrap_half_open(num.atan2(den) - bias)));
            quality.push(true);
        }
    }
    GradientImage {
        raster: Raster::from_parts(w, h, data, p),
        meta: *fs.meta(),
        quality: Mask::new(w, h, quality).expect("same geometry"),
    }
}
