// SPDX-License-Identifier: Apache-2.0

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::{dataset_pearson, mass_agreement, CorrelationMode, EvalError, PairRecord};
use crate::imagecore::load_raster;
use crate::qpi::PhaseImage;
use crate::specificity::ThresholdRule;
use crate::stain::StainMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalMode {
    Pearson,
    Mass,
}

impl std::str::FromStr for EvalMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pearson" => Ok(EvalMode::Pearson),
            "mass" => Ok(EvalMode::Mass),
            other => Err(format!("unknown mode {other:?} (pearson|mass)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairScore {
    pub phase_path: String,
    pub stain_path: String,
    pub fov: String,
    pub z: u32,
    /// Pearson ρ or mass disagreement in percent.
    pub value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub mode: EvalMode,
    pub pairs: usize,
    pub pooled_pearson: Option<f64>,
    pub mean_per_image: Option<f64>,
    pub scores: Vec<PairScore>,
}

/// Loads each pair relative to `base`, predicts a stain from the phase
/// image and scores it against the stored stain.
pub fn evaluate_pairs<F>(
    records: &[PairRecord],
    base: &Path,
    mode: EvalMode,
    correlation: CorrelationMode,
    predict: F,
) -> Result<EvalReport, EvalError>
where
    F: Fn(&PhaseImage<f32>) -> Result<StainMap<f32>, EvalError> + Sync,
{
    if records.is_empty() {
        return Err(EvalError::Empty);
    }
    let loaded: Vec<(PhaseImage<f32>, StainMap<f32>, StainMap<f32>)> = records
        .par_iter()
        .map(|r| {
            let (p, pm) = load_raster(base.join(&r.phase_path))?;
            let (s, sm) = load_raster(base.join(&r.stain_path))?;
            let phase = PhaseImage::new(p, pm);
            let pred = predict(&phase)?;
            Ok((phase, StainMap::new(s, sm.channel), pred))
        })
        .collect::<Result<_, EvalError>>()?;

    let (pooled, values) = match mode {
        EvalMode::Pearson => {
            let pairs: Vec<_> = loaded.iter().map(|(_, t, p)| (p.raster.clone(), t.raster.clone())).collect();
            let d = dataset_pearson(&pairs, correlation)?;
            (Some(d.pooled), d.per_image)
        }
        EvalMode::Mass => {
            let v = loaded
                .par_iter()
                .map(|(phase, t, p)| mass_agreement(phase, t, p, ThresholdRule::Inflection).map(Some))
                .collect::<Result<Vec<_>, _>>()?;
            (None, v)
        }
    };
    let valid: Vec<f64> = values.iter().flatten().copied().collect();
    let mean_per_image = (!valid.is_empty()).then(|| valid.iter().sum::<f64>() / valid.len() as f64);
    let scores = records
        .iter()
        .zip(values)
        .map(|(r, value)| PairScore {
            phase_path: r.phase_path.display().to_string(),
            stain_path: r.stain_path.display().to_string(),
            fov: r.fov.clone(),
            z: r.z,
            value,
        })
        .collect();
    Ok(EvalReport { mode, pairs: records.len(), pooled_pearson: pooled, mean_per_image, scores })
}
