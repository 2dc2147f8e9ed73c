// SPDX-License-Identifier: Apache-2.0

use super::EvalError;
use crate::qpi::PhaseImage;
use crate::specificity::{binarize, dry_mass, threshold_with, BinaryMask, ThresholdRule, DEFAULT_BINS, DEFAULT_GAMMA};
use crate::stain::StainMap;
use crate::Real;

/// `|m_pred − m_true| / m_true · 100` for dry mass inside two masks.
pub fn mask_mass_agreement<T: Real>(
    phase: &PhaseImage<T>,
    truth: &BinaryMask,
    pred: &BinaryMask,
) -> Result<f64, EvalError> {
    if !truth.mask.any() {
        return Err(EvalError::EmptyReferenceMask);
    }
    let m_true = dry_mass(phase, truth, DEFAULT_GAMMA)?;
    let m_pred = dry_mass(phase, pred, DEFAULT_GAMMA)?;
    if m_true == 0.0 {
        return Err(EvalError::ZeroReferenceMass);
    }
    Ok((m_pred - m_true).abs() / m_true.abs() * 100.0)
}

/// Thresholds both stains with `rule`, then compares the enclosed dry mass.
pub fn mass_agreement<T: Real>(
    phase: &PhaseImage<T>,
    stain_true: &StainMap<T>,
    stain_pred: &StainMap<T>,
    rule: ThresholdRule,
) -> Result<f64, EvalError> {
    let truth = binarize(stain_true, threshold_with(stain_true, DEFAULT_BINS, rule)?)?;
    let pred = binarize(stain_pred, threshold_with(stain_pred, DEFAULT_BINS, rule)?)?;
    mask_mass_agreement(phase, &truth, &pred)
}
