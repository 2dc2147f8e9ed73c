// SPDX-License-Identifier: Apache-2.0

//! PICSR1 raster container.
//!
//! ```text
//! offset  size  field
//!      0     6  magic "PICSR1"
//!      6     4  u32 width
//!     10     4  u32 height
//!     14     4  f32 pixel_size_um
//!     18     4  f32 wavelength_um
//!     22     4  f32 shear_um
//!     26     1  u8  channel_tag
//!     27     4  i32 z_index
//!     31     8  f64 timestamp_s
//!     39  4*W*H f32 samples, row-major
//! ```
//! All multi-byte fields are little-endian.

use std::fs;
use std::path::Path;

use super::{ChannelTag, ImageError, ImageMeta, Raster};

pub const PICSR1_MAGIC: &[u8; 6] = b"PICSR1";
pub const PICSR1_HEADER_LEN: usize = 39;

/// Largest payload accepted by the decoder (1 GiB of samples).
const MAX_SAMPLES: u64 = 1 << 28;

pub fn encode_raster(raster: &Raster<f32>, meta: &ImageMeta) -> Vec<u8> {
    let mut out = Vec::with_capacity(PICSR1_HEADER_LEN + 4 * raster.len());
    out.extend_from_slice(PICSR1_MAGIC);
    out.extend_from_slice(&(raster.width() as u32).to_le_bytes());
    out.extend_from_slice(&(raster.height() as u32).to_le_bytes());
    out.extend_from_slice(&raster.pixel_size().to_le_bytes());
    out.extend_from_slice(&meta.wavelength.to_le_bytes());
    out.extend_from_slice(&meta.shear.to_le_bytes());
    out.push(meta.channel.code());
    out.extend_from_slice(&meta.z_index.to_le_bytes());
    out.extend_from_slice(&meta.timestamp.to_le_bytes());
    for v in raster.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn take<const N: usize>(bytes: &[u8], at: usize) -> [u8; N] {
    bytes[at..at + N].try_into().unwrap()
}

pub fn decode_raster(bytes: &[u8]) -> Result<(Raster<f32>, ImageMeta), ImageError> {
    if bytes.len() < PICSR1_MAGIC.len() || &bytes[..6] != PICSR1_MAGIC {
        return Err(ImageError::BadMagic { expected: "PICSR1", found: bytes[..bytes.len().min(6)].to_vec() });
    }
    if bytes.len() < PICSR1_HEADER_LEN {
        return Err(ImageError::TruncatedPayload { expected: PICSR1_HEADER_LEN, found: bytes.len() });
    }
    let width = u32::from_le_bytes(take(bytes, 6));
    let height = u32::from_le_bytes(take(bytes, 10));
    let pixel_size = f32::from_le_bytes(take(bytes, 14));
    let meta = ImageMeta {
        wavelength: f32::from_le_bytes(take(bytes, 18)),
        shear: f32::from_le_bytes(take(bytes, 22)),
        channel: ChannelTag::from_code(bytes[26])?,
        z_index: i32::from_le_bytes(take(bytes, 27)),
        timestamp: f64::from_le_bytes(take(bytes, 31)),
    };

    let samples = width as u64 * height as u64;
    if samples > MAX_SAMPLES {
        return Err(ImageError::DimensionOverflow { width, height });
    }
    let expected = PICSR1_HEADER_LEN + 4 * samples as usize;
    if bytes.len() < expected {
        return Err(ImageError::TruncatedPayload { expected, found: bytes.len() });
    }
    if bytes.len() > expected {
        return Err(ImageError::TrailingBytes(bytes.len() - expected));
    }
    let data = bytes[PICSR1_HEADER_LEN..].chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect();
    let raster = Raster::new(width as usize, height as usize, data, pixel_size)?;
    Ok((raster, meta))
}

pub fn save_raster(raster: &Raster<f32>, meta: &ImageMeta, path: impl AsRef<Path>) -> Result<(), ImageError> {
    fs::write(path, encode_raster(raster, meta))?;
    Ok(())
}

pub fn load_raster(path: impl AsRef<Path>) -> Result<(Raster<f32>, ImageMeta), ImageError> {
    decode_raster(&fs::read(path)?)
}
