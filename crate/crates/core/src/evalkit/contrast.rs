// SPDX-License-Identifier: Apache-2.0

use super::EvalError;
use crate::imagecore::{Mask, Raster};
use crate::Real;

/// Population variance of the pixels in `region` (all pixels if `None`).
/// With `range = Some((lo, hi))` values are first mapped by `(v − lo)/(hi − lo)`.
pub fn contrast_variance<T: Real>(
    r: &Raster<T>,
    region: Option<&Mask>,
    range: Option<(f64, f64)>,
) -> Result<f64, EvalError> {
    if let Some(m) = region {
        if m.len() != r.len() {
            return Err(EvalError::LengthMismatch(r.len(), m.len()));
        }
    }
    let scale = |v: f64| match range {
        Some((lo, hi)) => (v - lo) / (hi - lo),
        None => v,
    };
    let values: Vec<f64> = r
        .data()
        .iter()
        .enumerate()
        .filter(|(i, _)| region.is_none_or(|m| m.bits()[*i]))
        .map(|(_, v)| scale(v.as_f64()))
        .collect();
    if values.is_empty() {
        return Err(EvalError::EmptyRegion);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    Ok(values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n)
}
