// SPDX-License-Identifier: Apache-2.0

//! Stain masks, semantic compartment maps, dry mass and instance
//! segmentation.

mod masks;
mod mass;
mod threshold;
mod watershed;

pub use masks::{binarize, compose_semantic, BinaryMask, Compartment, SemanticMask};
pub use mass::{dry_mass, subtract_background, DEFAULT_GAMMA};
pub use threshold::{inflection_threshold, threshold_with, ThresholdRule, DEFAULT_BINS};
pub use watershed::{distance_transform, watershed_instances, InstanceLabels, DEFAULT_H};

use thiserror::Error;

use crate::imagecore::ImageError;

#[derive(Debug, Error)]
pub enum SegError {
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error("no histogram structure: stain is constant")]
    ConstantStain,
    #[error("histogram needs at least 16 bins, got {0}")]
    TooFewBins(usize),
    #[error("threshold must be finite, got {0}")]
    NonFiniteThreshold(f64),
    #[error("{what}: {a_width}x{a_height} vs {b_width}x{b_height}")]
    DimensionMismatch { what: &'static str, a_width: usize, a_height: usize, b_width: usize, b_height: usize },
    #[error("refraction increment must be positive, got {0}")]
    InvalidGamma(f64),
    #[error("background region is empty")]
    EmptyBackground,
}

pub(crate) fn check_dims(what: &'static str, a: (usize, usize), b: (usize, usize)) -> Result<(), SegError> {
    if a != b {
        return Err(SegError::DimensionMismatch { what, a_width: a.0, a_height: a.1, b_width: b.0, b_height: b.1 });
    }
    Ok(())
}
