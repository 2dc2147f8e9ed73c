// SPDX-License-Identifier: Apache-2.0

//! Raster data model, physical metadata, file formats and the 2-D DFT.

mod format;
mod fourier;
mod mask;
mod pgm;
mod raster;

pub use format::{decode_raster, encode_raster, load_raster, save_raster, PICSR1_HEADER_LEN, PICSR1_MAGIC};
pub use fourier::{dft2, idft2, idft2_parts, signed_frequency, Spectrum};
pub use mask::Mask;
pub use pgm::{encode_pgm16, encode_pgm8, write_pgm16, write_pgm8};
pub use raster::{ChannelTag, ImageMeta, Raster};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ImageError {
    #[error("raster dimensions must be at least 1x1, got {width}x{height}")]
    ZeroDimension { width: usize, height: usize },
    #[error("expected {expected} samples, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("pixel size must be finite and positive, got {0}")]
    InvalidPixelSize(f32),
    #[error("non-finite value at pixel index {index} (x={x}, y={y})")]
    NonFinite { index: usize, x: usize, y: usize },
    #[error("crop {width}x{height}+{x}+{y} exceeds {raster_width}x{raster_height} raster")]
    CropOutOfBounds { x: usize, y: usize, width: usize, height: usize, raster_width: usize, raster_height: usize },
    #[error("invalid metadata: {0}")]
    InvalidMeta(String),
    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: &'static str, found: Vec<u8> },
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },
    #[error("dimension overflow: {width}x{height} does not fit in memory")]
    DimensionOverflow { width: u32, height: u32 },
    #[error("{0} trailing bytes after payload")]
    TrailingBytes(usize),
    #[error("unknown channel tag {0}")]
    UnknownChannelTag(u8),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
