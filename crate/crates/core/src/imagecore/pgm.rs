// SPDX-License-Identifier: Apache-2.0

//! Binary PGM (P5) writers for label maps.

use std::fs;
use std::path::Path;

use super::ImageError;

pub fn encode_pgm8(width: usize, height: usize, pixels: &[u8]) -> Result<Vec<u8>, ImageError> {
    if pixels.len() != width * height {
        return Err(ImageError::DimensionMismatch { expected: width * height, found: pixels.len() });
    }
    let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
    out.extend_from_slice(pixels);
    Ok(out)
}

/// 16-bit P5; samples are big-endian as the format requires.
pub fn encode_pgm16(width: usize, height: usize, pixels: &[u16]) -> Result<Vec<u8>, ImageError> {
    if pixels.len() != width * height {
        return Err(ImageError::DimensionMismatch { expected: width * height, found: pixels.len() });
    }
    let mut out = format!("P5\n{width} {height}\n65535\n").into_bytes();
    for p in pixels {
        out.extend_from_slice(&p.to_be_bytes());
    }
    Ok(out)
}

pub fn write_pgm8(path: impl AsRef<Path>, width: usize, height: usize, pixels: &[u8]) -> Result<(), ImageError> {
    fs::write(path, encode_pgm8(width, height, pixels)?)?;
    Ok(())
}

pub fn write_pgm16(path: impl AsRef<Path>, width: usize, height: usize, pixels: &[u16]) -> Result<(), ImageError> {
    fs::write(path, encode_pgm16(width, height, pixels)?)?;
    Ok(())
}
