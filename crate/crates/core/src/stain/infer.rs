// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::preprocess::{mirror_pad, normalize_for_ml, reflect_pad, resample, rescale_to_network};
use super::{StainError, Tensor, UNet};
use crate::imagecore::{ChannelTag, Raster};
use crate::qpi::PhaseImage;
use crate::Real;

/// Mirror pad applied around every inference tile.
pub const INFERENCE_PAD: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InferParams {
    /// Dataset-wide normalization range.
    pub rho_min: f64,
    pub rho_max: f64,
    /// Pixel pitch the weights were trained at; `None` skips rescaling.
    #[serde(default)]
    pub network_pixel_size: Option<f32>,
    #[serde(default = "default_pad")]
    pub pad: usize,
    #[serde(default = "default_channel")]
    pub channel: ChannelTag,
}

fn default_pad() -> usize {
    INFERENCE_PAD
}

fn default_channel() -> ChannelTag {
    ChannelTag::Dapi
}

impl InferParams {
    pub fn new(rho_min: f64, rho_max: f64) -> Self {
        Self { rho_min, rho_max, network_pixel_size: None, pad: INFERENCE_PAD, channel: ChannelTag::Dapi }
    }
}

/// A predicted fluorescence-equivalent image, same geometry as its source.
#[derive(Debug, Clone, PartialEq)]
pub struct StainMap<T = f32> {
    pub raster: Raster<T>,
    pub channel: ChannelTag,
}

impl<T: Real> StainMap<T> {
    pub fn new(raster: Raster<T>, channel: ChannelTag) -> Self {
        Self { raster, channel }
    }
}

/// normalize, rescale, mirror pad, align, network, crop, rescale back.
pub fn infer_stain<T: Real>(
    phase: &PhaseImage<T>,
    net: &UNet<T>,
    params: &InferParams,
) -> Result<StainMap<T>, StainError> {
    let src = &phase.raster;
    let x = normalize_for_ml(src, params.rho_min, params.rho_max).map_err(StainError::at("normalize"))?;
    let x = match params.network_pixel_size {
        Some(p) => rescale_to_network(&x, p).map_err(StainError::at("rescale"))?,
        None => x,
    };
    let (w, h) = (x.width(), x.height());
    let padded = mirror_pad(&x, params.pad).map_err(StainError::at("mirror_pad"))?;
    let m = net.spec().alignment();
    let extra_x = padded.width().next_multiple_of(m) - padded.width();
    let extra_y = padded.height().next_multiple_of(m) - padded.height();
    let aligned = reflect_pad(&padded, 0, 0, extra_x, extra_y).map_err(StainError::at("align"))?;

    let out = net.forward(&Tensor::from_raster(&aligned)).map_err(StainError::at("unet"))?;
    let out = out.to_raster(aligned.pixel_size()).map_err(StainError::at("unet"))?;
    let cropped = out.crop(params.pad, params.pad, w, h).map_err(|e| StainError::at("crop")(e.into()))?;
    let restored = if (w, h) == (src.width(), src.height()) {
        cropped
    } else {
        resample(&cropped, src.width(), src.height()).map_err(StainError::at("rescale_back"))?
    };
    let raster = restored.with_pixel_size(src.pixel_size()).map_err(|e| StainError::at("rescale_back")(e.into()))?;
    Ok(StainMap::new(raster, params.channel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stain::{NetSpec, WeightStore};
    use crate::ImageMeta;

    #[test]
    fn stage_names_are_reported() {
        let spec = NetSpec { depth: 2, base_filters: 2, ..NetSpec::default() };
        let net = UNet::new(spec.clone(), WeightStore::<f32>::zeros(&spec, 1e-5).unwrap()).unwrap();
        let phase = PhaseImage::new(Raster::filled(20, 20, 0.5f32, 0.3).unwrap(), ImageMeta::default());
        let err = infer_stain(&phase, &net, &InferParams::new(1.0, 1.0)).unwrap_err();
        assert!(err.to_string().starts_with("normalize:"), "{err}");
        let err = infer_stain(&phase, &net, &InferParams::new(0.0, 1.0)).unwrap_err();
        assert!(err.to_string().starts_with("mirror_pad:"), "{err}");
        let p = InferParams { pad: 4, ..InferParams::new(0.0, 1.0) };
        let s = infer_stain(&phase, &net, &p).unwrap();
        assert_eq!(s.raster, phase.raster);
    }
}
