// SPDX-License-Identifier: Apache-2.0

use super::StainError;
use crate::imagecore::Raster;
use crate::Real;

/// Channel-major feature map `[channels, height, width]` for a single sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor<T = f32> {
    channels: usize,
    height: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: Real> Tensor<T> {
    pub fn new(channels: usize, height: usize, width: usize, data: Vec<T>) -> Result<Self, StainError> {
        if data.len() != channels * height * width {
            return Err(StainError::ShapeMismatch {
                op: "tensor",
                expected: format!("{} values for [{channels}, {height}, {width}]", channels * height * width),
                found: data.len().to_string(),
            });
        }
        Ok(Self { channels, height, width, data })
    }

    pub fn zeros(channels: usize, height: usize, width: usize) -> Self {
        Self { channels, height, width, data: vec![T::zero(); channels * height * width] }
    }

    pub fn from_raster(r: &Raster<T>) -> Self {
        Self { channels: 1, height: r.height(), width: r.width(), data: r.data().to_vec() }
    }

    /// Channel 0 as a raster with the given pixel pitch.
    pub fn to_raster(&self, pixel_size: f32) -> Result<Raster<T>, StainError> {
        Ok(Raster::new(self.width, self.height, self.plane(0).to_vec(), pixel_size)?)
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.channels
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn shape(&self) -> [usize; 3] {
        [self.channels, self.height, self.width]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn plane(&self, c: usize) -> &[T] {
        let n = self.height * self.width;
        &self.data[c * n..(c + 1) * n]
    }

    #[inline]
    pub fn get(&self, c: usize, y: usize, x: usize) -> T {
        self.data[(c * self.height + y) * self.width + x]
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        Self { data: self.data.iter().map(|&v| f(v)).collect(), ..*self }
    }

    pub(crate) fn from_planes(height: usize, width: usize, planes: Vec<Vec<T>>) -> Self {
        let channels = planes.len();
        let mut data = Vec::with_capacity(channels * height * width);
        for p in planes {
            debug_assert_eq!(p.len(), height * width);
            data.extend_from_slice(&p);
        }
        Self { channels, height, width, data }
    }
}

impl<T: Real> Tensor<T> {
    /// `[c, y, x]` view helper used by the layer kernels.
    #[inline]
    pub(crate) fn plane_len(&self) -> usize {
        self.height * self.width
    }
}

impl<T: Copy> Tensor<T> {
    pub fn into_data(self) -> Vec<T> {
        self.data
    }
}
