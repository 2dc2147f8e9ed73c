// SPDX-License-Identifier: Apache-2.0

//! Computational core for label-free phase imaging with digital stains.
//!
//! The numerical modules are generic over the storage scalar ([`Real`],
//! implemented for `f32` and `f64`). Files on disk are always `f32`; the
//! aliases below name the two concrete instantiations.

// `!(x > 0.0)` rejects NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod evalkit;
pub mod growth;
pub mod imagecore;
pub mod platescan;
pub mod qpi;
pub mod rtpipeline;
mod scalar;
pub mod specificity;
pub mod stain;

pub use scalar::Real;

pub use imagecore::{ChannelTag, ImageError, ImageMeta, Mask, Raster, Spectrum};
pub use qpi::{FrameSet, GradientImage, PhaseImage};
pub use stain::{NetSpec, StainMap, Tensor, UNet, WeightStore};

pub type Raster32 = Raster<f32>;
pub type Raster64 = Raster<f64>;
pub type Spectrum32 = Spectrum<f32>;
pub type Spectrum64 = Spectrum<f64>;
pub type PhaseImage32 = PhaseImage<f32>;
pub type PhaseImage64 = PhaseImage<f64>;
pub type FrameSet32 = FrameSet<f32>;
pub type GradientImage32 = GradientImage<f32>;
pub type Tensor32 = Tensor<f32>;
pub type Tensor64 = Tensor<f64>;
pub type StainMap32 = StainMap<f32>;
pub type WeightStore32 = WeightStore<f32>;
pub type UNet32 = UNet<f32>;
