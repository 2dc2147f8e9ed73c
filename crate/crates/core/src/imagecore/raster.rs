// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::ImageError;
use crate::Real;

/// Single-channel row-major image with a physical pixel pitch in micrometers.
///
/// Every constructor rejects non-finite samples, so a `Raster` in hand is
/// always finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster<T = f32> {
    width: usize,
    height: usize,
    data: Vec<T>,
    pixel_size: f32,
}

fn check_pixel_size(pixel_size: f32) -> Result<(), ImageError> {
    if pixel_size.is_finite() && pixel_size > 0.0 {
        Ok(())
    } else {
        Err(ImageError::InvalidPixelSize(pixel_size))
    }
}

impl<T: Real> Raster<T> {
    pub fn new(width: usize, height: usize, data: Vec<T>, pixel_size: f32) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::ZeroDimension { width, height });
        }
        let expected = width
            .checked_mul(height)
            .ok_or(ImageError::DimensionMismatch { expected: usize::MAX, found: data.len() })?;
        if data.len() != expected {
            return Err(ImageError::DimensionMismatch { expected, found: data.len() });
        }
        check_pixel_size(pixel_size)?;
        if let Some(index) = data.iter().position(|v| !v.is_finite()) {
            return Err(ImageError::NonFinite { index, x: index % width, y: index / width });
        }
        Ok(Self { width, height, data, pixel_size })
    }

    pub fn filled(width: usize, height: usize, value: T, pixel_size: f32) -> Result<Self, ImageError> {
        Self::new(width, height, vec![value; width.saturating_mul(height)], pixel_size)
    }

    pub fn zeros(width: usize, height: usize, pixel_size: f32) -> Result<Self, ImageError> {
        Self::filled(width, height, T::zero(), pixel_size)
    }

    /// Builds a raster by evaluating `f(x, y)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        pixel_size: f32,
        mut f: impl FnMut(usize, usize) -> T,
    ) -> Result<Self, ImageError> {
        let mut data = Vec::with_capacity(width.saturating_mul(height));
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data, pixel_size)
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn pixel_size(&self) -> f32 {
        self.pixel_size
    }

    /// Area of one pixel in square micrometers.
    pub fn pixel_area(&self) -> f64 {
        let p = self.pixel_size as f64;
        p * p
    }

    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> T {
        self.data[y * self.width + x]
    }

    pub fn row(&self, y: usize) -> &[T] {
        &self.data[y * self.width..(y + 1) * self.width]
    }

    pub fn same_shape<U: Real>(&self, other: &Raster<U>) -> bool {
        self.width == other.width() && self.height == other.height()
    }

    pub fn with_pixel_size(mut self, pixel_size: f32) -> Result<Self, ImageError> {
        check_pixel_size(pixel_size)?;
        self.pixel_size = pixel_size;
        Ok(self)
    }

    /// Applies `f` per pixel; fails if any result is non-finite.
    pub fn map<U: Real>(&self, f: impl Fn(T) -> U) -> Result<Raster<U>, ImageError> {
        Raster::new(self.width, self.height, self.data.iter().map(|&v| f(v)).collect(), self.pixel_size)
    }

    /// Pixel-wise combination of two rasters of identical shape.
    pub fn zip_map(&self, other: &Raster<T>, f: impl Fn(T, T) -> T) -> Result<Raster<T>, ImageError> {
        if !self.same_shape(other) {
            return Err(ImageError::DimensionMismatch { expected: self.len(), found: other.len() });
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Raster::new(self.width, self.height, data, self.pixel_size)
    }

    pub fn cast<U: Real>(&self) -> Raster<U> {
        Raster {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|v| U::of(v.as_f64())).collect(),
            pixel_size: self.pixel_size,
        }
    }

    pub fn crop(&self, x0: usize, y0: usize, width: usize, height: usize) -> Result<Self, ImageError> {
        if width == 0 || height == 0 || x0 + width > self.width || y0 + height > self.height {
            return Err(ImageError::CropOutOfBounds {
                x: x0,
                y: y0,
                width,
                height,
                raster_width: self.width,
                raster_height: self.height,
            });
        }
        let mut data = Vec::with_capacity(width * height);
        for y in y0..y0 + height {
            data.extend_from_slice(&self.data[y * self.width + x0..y * self.width + x0 + width]);
        }
        Ok(Self { width, height, data, pixel_size: self.pixel_size })
    }

    pub fn sum_f64(&self) -> f64 {
        self.data.iter().map(|v| v.as_f64()).sum()
    }

    pub fn mean_f64(&self) -> f64 {
        self.sum_f64() / self.len() as f64
    }

    /// Smallest and largest sample.
    pub fn min_max(&self) -> (T, T) {
        self.data.iter().fold((self.data[0], self.data[0]), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    /// Trusted constructor for internal hot paths whose inputs are finite by
    /// construction.
    pub(crate) fn from_parts(width: usize, height: usize, data: Vec<T>, pixel_size: f32) -> Self {
        debug_assert_eq!(data.len(), width * height);
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Self { width, height, data, pixel_size }
    }
}

/// Imaging channel a raster was acquired (or inferred) for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelTag {
    Phase,
    Dapi,
    Dii,
    Brightfield,
    Dic,
}

impl ChannelTag {
    pub fn code(self) -> u8 {
        match self {
            ChannelTag::Phase => 0,
            ChannelTag::Dapi => 1,
            ChannelTag::Dii => 2,
            ChannelTag::Brightfield => 3,
            ChannelTag::Dic => 4,
        }
    }

    pub fn from_code(code: u8) -> Result<Self, ImageError> {
        Ok(match code {
            0 => ChannelTag::Phase,
            1 => ChannelTag::Dapi,
            2 => ChannelTag::Dii,
            3 => ChannelTag::Brightfield,
            4 => ChannelTag::Dic,
            other => return Err(ImageError::UnknownChannelTag(other)),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            ChannelTag::Phase => "phase",
            ChannelTag::Dapi => "dapi",
            ChannelTag::Dii => "dii",
            ChannelTag::Brightfield => "brightfield",
            ChannelTag::Dic => "dic",
        }
    }
}

impl std::str::FromStr for ChannelTag {
    type Err = ImageError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "phase" => Ok(ChannelTag::Phase),
            "dapi" => Ok(ChannelTag::Dapi),
            "dii" => Ok(ChannelTag::Dii),
            "brightfield" => Ok(ChannelTag::Brightfield),
            "dic" => Ok(ChannelTag::Dic),
            other => Err(ImageError::InvalidMeta(format!("unknown channel {other:?}"))),
        }
    }
}

/// Acquisition metadata that travels with a raster.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImageMeta {
    /// Illumination wavelength in micrometers.
    pub wavelength: f32,
    /// DIC shear in micrometers; only meaningful for phase channels.
    pub shear: f32,
    pub channel: ChannelTag,
    pub z_index: i32,
    /// Acquisition time in seconds.
    pub timestamp: f64,
}

impl ImageMeta {
    pub fn phase(wavelength: f32, shear: f32) -> Self {
        Self { wavelength, shear, channel: ChannelTag::Phase, z_index: 0, timestamp: 0.0 }
    }

    pub fn validate(&self) -> Result<(), ImageError> {
        if !(self.wavelength.is_finite() && self.wavelength > 0.0) {
            return Err(ImageError::InvalidMeta(format!("wavelength must be positive, got {}", self.wavelength)));
        }
        if self.channel == ChannelTag::Phase && !(self.shear.is_finite() && self.shear > 0.0) {
            return Err(ImageError::InvalidMeta(format!("phase channel requires positive shear, got {}", self.shear)));
        }
        if !self.timestamp.is_finite() {
            return Err(ImageError::InvalidMeta("timestamp must be finite".into()));
        }
        Ok(())
    }

    pub fn with_channel(mut self, channel: ChannelTag) -> Self {
        self.channel = channel;
        self
    }
}

impl Default for ImageMeta {
    fn default() -> Self {
        Self::phase(0.78, 0.3)
    }
}
