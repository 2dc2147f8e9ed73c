// SPDX-License-Identifier: Apache-2.0

use rayon::prelude::*;
use serde::Serialize;

use super::EvalError;
use crate::imagecore::Raster;
use crate::Real;

/// Two-pass sample Pearson correlation.
pub fn pearson_slices(a: &[f64], b: &[f64]) -> Result<f64, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(EvalError::Empty);
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    finish(sab, saa, sbb)
}

fn finish(sab: f64, saa: f64, sbb: f64) -> Result<f64, EvalError> {
    if saa <= 0.0 {
        return Err(EvalError::ConstantInput("first argument"));
    }
    if sbb <= 0.0 {
        return Err(EvalError::ConstantInput("second argument"));
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

pub fn pearson<T: Real>(a: &Raster<T>, b: &Raster<T>) -> Result<f64, EvalError> {
    if !a.same_shape(b) {
        return Err(EvalError::LengthMismatch(a.len(), b.len()));
    }
    let xa: Vec<f64> = a.data().iter().map(|v| v.as_f64()).collect();
    let xb: Vec<f64> = b.data().iter().map(|v| v.as_f64()).collect();
    pearson_slices(&xa, &xb)
}

/// Streaming co-moments; merging is associative.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PearsonAccumulator {
    n: f64,
    mean_a: f64,
    mean_b: f64,
    m2_a: f64,
    m2_b: f64,
    c: f64,
}

impl PearsonAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> u64 {
        self.n as u64
    }

    pub fn push(&mut self, a: f64, b: f64) {
        self.n += 1.0;
        let da = a - self.mean_a;
        self.mean_a += da / self.n;
        let db = b - self.mean_b;
        self.mean_b += db / self.n;
        self.m2_a += da * (a - self.mean_a);
        self.m2_b += db * (b - self.mean_b);
        self.c += da * (b - self.mean_b);
    }

    pub fn merge(&mut self, o: &Self) {
        if o.n == 0.0 {
            return;
        }
        if self.n == 0.0 {
            *self = *o;
            return;
        }
        let n = self.n + o.n;
        let da = o.mean_a - self.mean_a;
        let db = o.mean_b - self.mean_b;
        let w = self.n * o.n / n;
        self.m2_a += o.m2_a + da * da * w;
        self.m2_b += o.m2_b + db * db * w;
        self.c += o.c + da * db * w;
        self.mean_a += da * o.n / n;
        self.mean_b += db * o.n / n;
        self.n = n;
    }

    pub fn pearson(&self) -> Result<f64, EvalError> {
        if self.n == 0.0 {
            return Err(EvalError::Empty);
        }
        finish(self.c, self.m2_a, self.m2_b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationMode {
    /// Intensities as stored.
    #[default]
    Raw,
    /// Each image min-max scaled to [0, 1] before pooling.
    Normalized,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetPearson {
    /// Correlation over all pixels of all pairs.
    pub pooled: f64,
    /// Per-pair correlation; `None` where a pair is constant.
    pub per_image: Vec<Option<f64>>,
    pub mean_per_image: Option<f64>,
}

fn scaled<T: Real>(r: &Raster<T>, mode: CorrelationMode) -> Vec<f64> {
    let v = r.data().iter().map(|x| x.as_f64());
    match mode {
        CorrelationMode::Raw => v.collect(),
        CorrelationMode::Normalized => {
            let (lo, hi) = r.min_max();
            let (lo, span) = (lo.as_f64(), hi.as_f64() - lo.as_f64());
            v.map(|x| if span > 0.0 { (x - lo) / span } else { 0.0 }).collect()
        }
    }
}

/// `pairs` are (predicted, reference) stains.
pub fn dataset_pearson<T: Real>(
    pairs: &[(Raster<T>, Raster<T>)],
    mode: CorrelationMode,
) -> Result<DatasetPearson, EvalError> {
    if pairs.is_empty() {
        return Err(EvalError::Empty);
    }
    let parts: Vec<(PearsonAccumulator, Option<f64>)> = pairs
        .par_iter()
        .map(|(a, b)| {
            if !a.same_shape(b) {
                return Err(EvalError::LengthMismatch(a.len(), b.len()));
            }
            let (xa, xb) = (scaled(a, mode), scaled(b, mode));
            let mut acc = PearsonAccumulator::new();
            for (&x, &y) in xa.iter().zip(&xb) {
                acc.push(x, y);
            }
            Ok((acc, pearson_slices(&xa, &xb).ok()))
        })
        .collect::<Result<_, _>>()?;
    let mut total = PearsonAccumulator::new();
    for (acc, _) in &parts {
        total.merge(acc);
    }
    let per_image: Vec<Option<f64>> = parts.iter().map(|p| p.1).collect();
    let valid: Vec<f64> = per_image.iter().flatten().copied().collect();
    let mean_per_image = (!valid.is_empty()).then(|| valid.iter().sum::<f64>() / valid.len() as f64);
    Ok(DatasetPearson { pooled: total.pearson()?, per_image, mean_per_image })
}
