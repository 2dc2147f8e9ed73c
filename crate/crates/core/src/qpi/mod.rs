// SPDX-License-Identifier: Apache-2.0

//! GLIM forward model, four-frame gradient retrieval, Fourier-domain
//! integration along the shear axis, and synthetic phase phantoms.

mod glim;
mod hilbert;
mod phantom;

pub use glim::{model_gradient, retrieve_gradient, simulate_glim_frames, FrameSet, GradientImage};
pub use hilbert::{integrate_hilbert, integrate_hilbert_with_residue, IntegrationMode};
pub use phantom::{
    bead_peak_phase, cell_phantom, cell_stains, make_bead_phantom, random_cells, smooth_phase, CellSpec, FieldGeometry,
};

use thiserror::Error;

use crate::imagecore::{ImageError, ImageMeta, Raster};
use crate::Real;

/// Calibrated phase map in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseImage<T = f32> {
    pub raster: Raster<T>,
    pub meta: ImageMeta,
}

impl<T: Real> PhaseImage<T> {
    pub fn new(raster: Raster<T>, meta: ImageMeta) -> Self {
        Self { raster, meta }
    }

    pub fn cast<U: Real>(&self) -> PhaseImage<U> {
        PhaseImage { raster: self.raster.cast(), meta: self.meta }
    }
}

#[derive(Debug, Error)]
pub enum ReconError {
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error("frame/background geometry mismatch: {0}")]
    ShapeMismatch(String),
    #[error("background must be positive everywhere (pixel {index} = {value})")]
    NonPositiveBackground { index: usize, value: f64 },
    #[error("negative intensity in frame {frame} at pixel {index}")]
    NegativeIntensity { frame: usize, index: usize },
    #[error("modulator offsets {0:?} are not n*pi/2 + eps0")]
    InvalidOffsets([f64; 4]),
    #[error("shear must be finite and non-zero, got {0}")]
    ZeroShear(f32),
    #[error("regularization constant must be positive, got {0}")]
    InvalidRegularization(f64),
    #[error("invalid bead: {0}")]
    InvalidBead(String),
    #[error("bead of diameter {diameter} um does not fit a {width_um} x {height_um} um field")]
    BeadTooLarge { diameter: f64, width_um: f64, height_um: f64 },
}
