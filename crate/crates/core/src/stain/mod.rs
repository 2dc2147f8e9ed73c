// SPDX-License-Identifier: Apache-2.0

//! Forward inference for the residual U-Net that maps phase images to
//! digital stains: preprocessing, layer primitives, weight I/O and the
//! full-image prediction path.

mod infer;
mod layers;
mod netspec;
mod preprocess;
mod tensor;
mod unet;
mod weights;

pub use infer::{infer_stain, InferParams, StainMap, INFERENCE_PAD};
pub use layers::{add, batchnorm_infer, concat_channels, conv2d, max_pool2, relu, up_conv2, PadMode};
pub use netspec::{LayerKind, LayerSpec, NetSpec};
pub use preprocess::{
    crop_center, mirror_pad, normalize_for_ml, reflect_index, reflect_pad, resample, rescale_to_network,
};
pub use tensor::Tensor;
pub use unet::{unet_forward, UNet};
pub use weights::{
    decode_weights, encode_weights, load_weights, save_weights, WeightRecord, WeightStore, PICSW1_MAGIC,
};

use thiserror::Error;

use crate::imagecore::ImageError;

#[derive(Debug, Error)]
pub enum StainError {
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error("{op}: shape mismatch, expected {expected}, got {found}")]
    ShapeMismatch { op: &'static str, expected: String, found: String },
    #[error("normalization range is empty: rho_min = {rho_min}, rho_max = {rho_max}")]
    EmptyNormalizationRange { rho_min: f64, rho_max: f64 },
    #[error("pad of {pad} px must be smaller than the {width}x{height} image")]
    PadTooLarge { pad: usize, width: usize, height: usize },
    #[error("rescale factor {0} outside [1/8, 8]; likely a mismatched objective")]
    ScaleOutOfRange(f64),
    #[error("batch-norm channel {channel}: {reason}")]
    InvalidNormStatistics { channel: usize, reason: String },
    #[error("stride must be at least 1")]
    ZeroStride,
    #[error("input {width}x{height} is not divisible by {multiple}")]
    InputNotAligned { width: usize, height: usize, multiple: usize },
    #[error("weights: missing record {0:?}")]
    MissingRecord(String),
    #[error("weights: duplicate record {0:?}")]
    DuplicateRecord(String),
    #[error("weights: record {0:?} is not part of the network")]
    UnexpectedRecord(String),
    #[error("weights: record {name:?} has shape {found:?}, expected {expected:?}")]
    RecordShape { name: String, expected: Vec<usize>, found: Vec<usize> },
    #[error("weights: {0}")]
    Format(String),
    #[error("weights: bad magic, expected \"PICSW1\", found {0:?}")]
    BadMagic(Vec<u8>),
    #[error("invalid network spec: {0}")]
    InvalidSpec(String),
    #[error("{stage}: {source}")]
    Stage { stage: &'static str, source: Box<StainError> },
}

impl StainError {
    pub(crate) fn at(stage: &'static str) -> impl FnOnce(StainError) -> StainError {
        move |e| StainError::Stage { stage, source: Box::new(e) }
    }
}
