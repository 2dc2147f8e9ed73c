// SPDX-License-Identifier: Apache-2.0

//! Knee detection on the smoothed cumulative intensity histogram.

use super::SegError;
use crate::stain::StainMap;
use crate::Real;

pub const DEFAULT_BINS: usize = 256;

const SMOOTH: usize = 5;
/// Increments below this fraction of the largest one count as flat.
const FLAT_FRACTION: f64 = 0.005;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdRule {
    /// Centre of the widest interior plateau of the smoothed cumulative
    /// histogram: midway between where it stops tracking one population and
    /// starts tracking the next. Without a plateau, the most concave bin.
    #[default]
    Inflection,
    /// Point of the smoothed cumulative histogram farthest above the chord
    /// from the mode to the last bin.
    Chord,
}

pub fn inflection_threshold<T: Real>(stain: &StainMap<T>, bins: usize) -> Result<f64, SegError> {
    threshold_with(stain, bins, ThresholdRule::Inflection)
}

pub fn threshold_with<T: Real>(stain: &StainMap<T>, bins: usize, rule: ThresholdRule) -> Result<f64, SegError> {
    if bins < 16 {
        return Err(SegError::TooFewBins(bins));
    }
    let (lo, hi) = stain.raster.min_max();
    let (lo, hi) = (lo.as_f64(), hi.as_f64());
    if !(hi > lo) {
        return Err(SegError::ConstantStain);
    }
    let width = (hi - lo) / bins as f64;
    let mut hist = vec![0.0f64; bins];
    for v in stain.raster.data() {
        let b = (((v.as_f64() - lo) / width) as usize).min(bins - 1);
        hist[b] += 1.0;
    }
    let pos = match rule {
        ThresholdRule::Inflection => plateau_centre(&hist).unwrap_or_else(|| knee_bin(&hist)),
        ThresholdRule::Chord => chord_bin(&hist),
    };
    Ok(lo + (pos + 0.5) * width)
}

fn smoothed_cumulative(hist: &[f64]) -> Vec<f64> {
    let n = hist.len();
    let mut c = Vec::with_capacity(n);
    let mut acc = 0.0;
    for h in hist {
        acc += h;
        c.push(acc);
    }
    let r = (SMOOTH / 2) as isize;
    (0..n as isize)
        .map(|i| (-r..=r).map(|d| c[(i + d).clamp(0, n as isize - 1) as usize]).sum::<f64>() / SMOOTH as f64)
        .collect()
}

fn second_difference(c: &[f64]) -> Vec<f64> {
    let mut d2 = vec![0.0; c.len()];
    for i in 1..c.len() - 1 {
        d2[i] = c[i + 1] - 2.0 * c[i] + c[i - 1];
    }
    d2
}

fn mode(hist: &[f64]) -> usize {
    // first index of the maximum
    hist.iter().enumerate().fold(0, |best, (i, &h)| if h > hist[best] { i } else { best })
}

/// Widest run of flat increments bounded by rising ones on both sides.
fn plateau_centre(hist: &[f64]) -> Option<f64> {
    let c = smoothed_cumulative(hist);
    let inc: Vec<f64> = c.windows(2).map(|w| w[1] - w[0]).collect();
    let tol = FLAT_FRACTION * inc.iter().fold(0.0f64, |m, &v| m.max(v));
    let mut best: Option<(usize, usize)> = None;
    let mut i = 0;
    while i < inc.len() {
        if inc[i] > tol {
            i += 1;
            continue;
        }
        let start = i;
        while i < inc.len() && inc[i] <= tol {
            i += 1;
        }
        let interior = start > 0 && i < inc.len();
        if interior && best.is_none_or(|(a, b)| i - start > b - a) {
            best = Some((start, i));
        }
    }
    // increments start..end span bins start..=end of the cumulative curve
    best.map(|(a, b)| (a + b) as f64 / 2.0)
}

/// Most concave bin of the smoothed cumulative histogram.
fn knee_bin(hist: &[f64]) -> f64 {
    let d2 = second_difference(&smoothed_cumulative(hist));
    d2.iter().enumerate().fold(0, |best, (i, &v)| if v < d2[best] { i } else { best }) as f64
}

fn chord_bin(hist: &[f64]) -> f64 {
    let c = smoothed_cumulative(hist);
    let m = mode(hist);
    let last = c.len() - 1;
    if m == last {
        return knee_bin(hist);
    }
    let slope = (c[last] - c[m]) / (last - m) as f64;
    let best = (m..=last).fold((m, f64::NEG_INFINITY), |(bi, bv), i| {
        let gap = c[i] - (c[m] + slope * (i - m) as f64);
        if gap > bv {
            (i, gap)
        } else {
            (bi, bv)
        }
    });
    best.0 as f64
}
