// SPDX-License-Identifier: Apache-2.0

//! Synthetic phase objects for verification runs.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{PhaseImage, ReconError};
use crate::imagecore::{ImageMeta, Raster};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldGeometry {
    pub width: usize,
    pub height: usize,
    /// Micrometers per pixel.
    pub pixel_size: f32,
}

impl FieldGeometry {
    pub fn new(width: usize, height: usize, pixel_size: f32) -> Self {
        Self { width, height, pixel_size }
    }

    /// Stage coordinates (um) of pixel `(x, y)` relative to the field
    /// center pixel `(width/2, height/2)`.
    fn centered(&self, x: usize, y: usize) -> (f64, f64) {
        let p = self.pixel_size as f64;
        ((x as f64 - (self.width / 2) as f64) * p, (y as f64 - (self.height / 2) as f64) * p)
    }
}

/// `(2 pi d / lambda) (n_object - n_media)`.
pub fn bead_peak_phase(diameter: f64, wavelength: f64, n_object: f64, n_media: f64) -> f64 {
    2.0 * PI * diameter / wavelength * (n_object - n_media)
}

/// Projected phase of a sphere centred on pixel `(width/2, height/2)`:
/// thickness `2 sqrt((d/2)^2 - r^2)` times `(2 pi / lambda) (n_object - n_media)`.
pub fn make_bead_phantom<T: Real>(
    diameter: f64,
    n_object: f64,
    n_media: f64,
    meta: ImageMeta,
    geometry: FieldGeometry,
) -> Result<PhaseImage<T>, ReconError> {
    if !(diameter.is_finite() && diameter > 0.0) {
        return Err(ReconError::InvalidBead(format!("diameter must be positive, got {diameter}")));
    }
    if !(n_object.is_finite() && n_media.is_finite()) || n_object < n_media {
        return Err(ReconError::InvalidBead(format!(
            "object index {n_object} must not be below media index {n_media}"
        )));
    }
    meta.validate()?;
    let p = geometry.pixel_size as f64;
    let half_w = (geometry.width / 2) as f64 * p;
    let half_h = (geometry.height / 2) as f64 * p;
    let radius = 0.5 * diameter;
    // One pixel of background margin on the short side of the center.
    if radius > half_w - p || radius > half_h - p {
        return Err(ReconError::BeadTooLarge {
            diameter,
            width_um: geometry.width as f64 * p,
            height_um: geometry.height as f64 * p,
        });
    }
    let k = 2.0 * PI / meta.wavelength as f64 * (n_object - n_media);
    let raster = Raster::from_fn(geometry.width, geometry.height, geometry.pixel_size, |x, y| {
        let (dx, dy) = geometry.centered(x, y);
        let r2 = dx * dx + dy * dy;
        let t = if r2 < radius * radius { 2.0 * (radius * radius - r2).sqrt() } else { 0.0 };
        T::of(k * t)
    })?;
    Ok(PhaseImage::new(raster, meta))
}

/// Random band-limited periodic phase map whose every x-row has zero mean
/// (all modes have `kx >= 1`). `max_mode` bounds both mode indices.
pub fn smooth_phase<T: Real>(
    geometry: FieldGeometry,
    meta: ImageMeta,
    seed: u64,
    max_mode: usize,
    amplitude: f64,
) -> Result<PhaseImage<T>, ReconError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes: Vec<(f64, f64, f64, f64)> = (0..6)
        .map(|_| {
            let kx = rng.random_range(1..=max_mode.max(1)) as f64;
            let ky = rng.random_range(0..=max_mode) as f64;
            let a = amplitude * rng.random_range(0.3..1.0);
            let theta = rng.random_range(0.0..2.0 * PI);
            (kx, ky, a, theta)
        })
        .collect();
    let (w, h) = (geometry.width as f64, geometry.height as f64);
    let raster = Raster::from_fn(geometry.width, geometry.height, geometry.pixel_size, |x, y| {
        let v: f64 = modes
            .iter()
            .map(|&(kx, ky, a, theta)| a * (2.0 * PI * (kx * x as f64 / w + ky * y as f64 / h) + theta).cos())
            .sum();
        T::of(v)
    })?;
    Ok(PhaseImage::new(raster, meta))
}

/// One synthetic adherent cell: a flattened cytoplasm dome carrying a
/// denser nucleus dome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellSpec {
    /// Center in um from the top-left corner of the field.
    pub x: f64,
    pub y: f64,
    pub radius: f64,
    pub nucleus_radius: f64,
    /// Peak phase of the cytoplasm dome, rad.
    pub cytoplasm_phase: f64,
    /// Extra peak phase of the nucleus dome, rad.
    pub nucleus_phase: f64,
}

fn dome(r2: f64, radius: f64) -> f64 {
    if r2 < radius * radius {
        (1.0 - r2 / (radius * radius)).sqrt()
    } else {
        0.0
    }
}

pub fn cell_phantom<T: Real>(
    geometry: FieldGeometry,
    meta: ImageMeta,
    cells: &[CellSpec],
) -> Result<PhaseImage<T>, ReconError> {
    let p = geometry.pixel_size as f64;
    let raster = Raster::from_fn(geometry.width, geometry.height, geometry.pixel_size, |x, y| {
        let (px, py) = ((x as f64 + 0.5) * p, (y as f64 + 0.5) * p);
        let v: f64 = cells
            .iter()
            .map(|c| {
                let r2 = (px - c.x).powi(2) + (py - c.y).powi(2);
                c.cytoplasm_phase * dome(r2, c.radius) + c.nucleus_phase * dome(r2, c.nucleus_radius)
            })
            .sum();
        T::of(v)
    })?;
    Ok(PhaseImage::new(raster, meta))
}

/// Non-overlapping cells placed uniformly at random inside the field.
pub fn random_cells(geometry: FieldGeometry, count: usize, seed: u64) -> Vec<CellSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = geometry.pixel_size as f64;
    let (w, h) = (geometry.width as f64 * p, geometry.height as f64 * p);
    let max_r = 0.12 * w.min(h);
    let mut cells: Vec<CellSpec> = Vec::with_capacity(count);
    let mut attempts = 0;
    while cells.len() < count && attempts < 1000 * count.max(1) {
        attempts += 1;
        let radius = rng.random_range(0.5 * max_r..max_r);
        let (x, y) = (rng.random_range(radius + p..w - radius - p), rng.random_range(radius + p..h - radius - p));
        if cells.iter().any(|c| (c.x - x).hypot(c.y - y) < c.radius + radius + 2.0 * p) {
            continue;
        }
        cells.push(CellSpec {
            x,
            y,
            radius,
            nucleus_radius: radius * rng.random_range(0.35..0.5),
            cytoplasm_phase: rng.random_range(0.4..0.8),
            nucleus_phase: rng.random_range(0.5..1.0),
        });
    }
    cells
}

/// Reference nuclear (inside `nucleus_radius`) and membrane-bounded
/// (inside `radius`) stains: 1 on the stained set, 0.05 elsewhere, plus
/// uniform noise of half-width `noise`.
pub fn cell_stains<T: Real>(
    geometry: FieldGeometry,
    cells: &[CellSpec],
    seed: u64,
    noise: f64,
) -> Result<(Raster<T>, Raster<T>), ReconError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = geometry.pixel_size as f64;
    let mut render = |pick: fn(&CellSpec) -> f64| {
        Raster::from_fn(geometry.width, geometry.height, geometry.pixel_size, |x, y| {
            let (px, py) = ((x as f64 + 0.5) * p, (y as f64 + 0.5) * p);
            let inside = cells.iter().any(|c| (px - c.x).hypot(py - c.y) < pick(c));
            let jitter = if noise > 0.0 { rng.random_range(-noise..noise) } else { 0.0 };
            T::of(if inside { 1.0 } else { 0.05 } + jitter)
        })
    };
    let dapi = render(|c| c.nucleus_radius)?;
    let dii = render(|c| c.radius)?;
    Ok((dapi, dii))
}
