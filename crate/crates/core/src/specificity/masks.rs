// SPDX-License-Identifier: Apache-2.0

use super::{check_dims, SegError};
use crate::imagecore::{ChannelTag, Mask, Raster};
use crate::stain::StainMap;
use crate::Real;

/// Thresholded stain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    pub mask: Mask,
    pub channel: ChannelTag,
}

impl BinaryMask {
    pub fn new(mask: Mask, channel: ChannelTag) -> Self {
        Self { mask, channel }
    }

    pub fn width(&self) -> usize {
        self.mask.width()
    }

    pub fn height(&self) -> usize {
        self.mask.height()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.mask.width(), self.mask.height())
    }

    /// `{0, 1}` rendering with the given pixel pitch.
    pub fn to_raster<T: Real>(&self, pixel_size: f32) -> Result<Raster<T>, SegError> {
        let data = self.mask.bits().iter().map(|&b| if b { T::one() } else { T::zero() }).collect();
        Ok(Raster::new(self.width(), self.height(), data, pixel_size)?)
    }
}

/// Pixel set iff `value >= threshold`.
pub fn binarize<T: Real>(stain: &StainMap<T>, threshold: f64) -> Result<BinaryMask, SegError> {
    if !threshold.is_finite() {
        return Err(SegError::NonFiniteThreshold(threshold));
    }
    let r = &stain.raster;
    let bits = r.data().iter().map(|v| v.as_f64() >= threshold).collect();
    Ok(BinaryMask::new(Mask::new(r.width(), r.height(), bits)?, stain.channel))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Compartment {
    Background = 0,
    Cytoplasm = 1,
    Nucleus = 2,
}

impl Compartment {
    /// Grey level used when writing 8-bit maps.
    pub fn grey(self) -> u8 {
        match self {
            Compartment::Background => 0,
            Compartment::Cytoplasm => 128,
            Compartment::Nucleus => 255,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemanticMask {
    width: usize,
    height: usize,
    labels: Vec<Compartment>,
}

impl SemanticMask {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[Compartment] {
        &self.labels
    }

    pub fn get(&self, x: usize, y: usize) -> Compartment {
        self.labels[y * self.width + x]
    }

    /// Pixel counts for background, cytoplasm, nucleus.
    pub fn counts(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for &l in &self.labels {
            c[l as usize] += 1;
        }
        c
    }

    pub fn compartment(&self, which: Compartment) -> Mask {
        Mask::new(self.width, self.height, self.labels.iter().map(|&l| l == which).collect()).expect("non-empty map")
    }

    pub fn to_grey(&self) -> Vec<u8> {
        self.labels.iter().map(|l| l.grey()).collect()
    }
}

/// Nucleus where dapi is set, cytoplasm where only dii is set.
pub fn compose_semantic(dapi: &BinaryMask, dii: &BinaryMask) -> Result<SemanticMask, SegError> {
    check_dims("compose_semantic", dapi.dims(), dii.dims())?;
    let labels = dapi
        .mask
        .bits()
        .iter()
        .zip(dii.mask.bits())
        .map(|(&n, &c)| match (n, c) {
            (true, _) => Compartment::Nucleus,
            (false, true) => Compartment::Cytoplasm,
            (false, false) => Compartment::Background,
        })
        .collect();
    Ok(SemanticMask { width: dapi.width(), height: dapi.height(), labels })
}
