// SPDX-License-Identifier: Apache-2.0

//! Digital-stain evaluation: correlation, mask-based mass agreement,
//! contrast diagnostics, fov-level k-fold splits and pair manifests.

mod agreement;
mod contrast;
mod correlation;
mod manifest;
mod report;
mod split;

pub use agreement::{mask_mass_agreement, mass_agreement};
pub use contrast::contrast_variance;
pub use correlation::{dataset_pearson, pearson, pearson_slices, CorrelationMode, DatasetPearson, PearsonAccumulator};
pub use manifest::{read_manifest, write_manifest, PairRecord, PairSet, Split, MANIFEST_COLUMNS};
pub use report::{evaluate_pairs, EvalMode, EvalReport, PairScore};
pub use split::{kfold_pairs, kfold_split, Fold, DEFAULT_K};

use thiserror::Error;

use crate::imagecore::ImageError;
use crate::specificity::SegError;
use crate::stain::StainError;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Seg(#[from] SegError),
    #[error(transparent)]
    Stain(#[from] StainError),
    #[error("{0}: input is constant, correlation undefined")]
    ConstantInput(&'static str),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("no samples")]
    Empty,
    #[error("reference mask is empty")]
    EmptyReferenceMask,
    #[error("reference dry mass is zero")]
    ZeroReferenceMass,
    #[error("region is empty")]
    EmptyRegion,
    #[error("k = {k} needs 2 <= k <= {count} fovs")]
    InvalidK { k: usize, count: usize },
    #[error("manifest line {line}: {message}")]
    Manifest { line: u64, message: String },
    #[error("fov {0:?} appears in more than one split")]
    FovInTwoSplits(String),
    #[error("fov {fov:?} lists z index {z} twice")]
    DuplicateSlice { fov: String, z: u32 },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
