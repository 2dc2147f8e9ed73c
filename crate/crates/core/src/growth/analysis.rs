// SPDX-License-Identifier: Apache-2.0

use super::{GrowthError, MassRecord, MassSeries, Quantity};
use crate::specificity::BinaryMask;

/// Baseline window in hours.
pub const DEFAULT_WINDOW: f64 = 6.0;

/// Set-pixel fraction.
pub fn confluence(mask: &BinaryMask) -> f64 {
    mask.mask.count() as f64 / mask.mask.len() as f64
}

/// Divides masses and areas of each fov by their mean over the first
/// `window` hours of that fov. Confluence is already a fraction and is kept.
/// The total mass of the result is the sum of the normalized compartments;
/// [`normalized_total`] gives the total divided by its own baseline.
pub fn normalize_series(s: &MassSeries, window: f64) -> Result<MassSeries, GrowthError> {
    let mut out = Vec::with_capacity(s.len());
    for fov in s.fovs() {
        let recs = s.fov(fov);
        let t0 = recs[0].t;
        let base: Vec<&MassRecord> = recs.iter().filter(|r| r.t - t0 < window).collect();
        if base.len() < 2 {
            return Err(GrowthError::EmptyWindow { fov: fov.to_string(), window, found: base.len() });
        }
        let mean = |q: Quantity| -> Result<f64, GrowthError> {
            let m = base.iter().map(|r| q.of(r).expect("mass fields are always set")).sum::<f64>() / base.len() as f64;
            if m == 0.0 {
                return Err(GrowthError::ZeroBaseline { fov: fov.to_string(), quantity: q.name() });
            }
            Ok(m)
        };
        let nm = mean(Quantity::NucleusMass)?;
        let cm = mean(Quantity::CytoplasmMass)?;
        let na = mean(Quantity::NucleusArea)?;
        let ca = mean(Quantity::CytoplasmArea)?;
        out.extend(recs.iter().map(|r| MassRecord {
            nucleus_mass: r.nucleus_mass / nm,
            cytoplasm_mass: r.cytoplasm_mass / cm,
            nucleus_area: r.nucleus_area / na,
            cytoplasm_area: r.cytoplasm_area / ca,
            ..r.clone()
        }));
    }
    MassSeries::new(out)
}

/// `(fov, t, total / baseline total)` with the baseline window of
/// [`normalize_series`].
pub fn normalized_total(s: &MassSeries, window: f64) -> Result<Vec<(String, f64, f64)>, GrowthError> {
    let mut out = Vec::with_capacity(s.len());
    for fov in s.fovs() {
        let recs = s.fov(fov);
        let t0 = recs[0].t;
        let base: Vec<f64> =
            recs.iter().filter(|r| r.t - t0 < window).map(|r| r.nucleus_mass + r.cytoplasm_mass).collect();
        if base.len() < 2 {
            return Err(GrowthError::EmptyWindow { fov: fov.to_string(), window, found: base.len() });
        }
        let m = base.iter().sum::<f64>() / base.len() as f64;
        if m == 0.0 {
            return Err(GrowthError::ZeroBaseline { fov: fov.to_string(), quantity: Quantity::TotalMass.name() });
        }
        out.extend(recs.iter().map(|r| (fov.to_string(), r.t, (r.nucleus_mass + r.cytoplasm_mass) / m)));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MedianMode {
    /// Median of the quantity itself.
    #[default]
    Level,
    /// Median of its backward finite-difference rate (per hour).
    Rate,
}

/// Per-timepoint medians on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MedianSeries {
    pub times: Vec<f64>,
    pub columns: Vec<(Quantity, Vec<f64>)>,
}

impl MedianSeries {
    pub fn get(&self, q: Quantity) -> Option<&[f64]> {
        self.columns.iter().find(|(c, _)| *c == q).map(|(_, v)| v.as_slice())
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn median_interval(times: &[f64]) -> f64 {
    if times.len() < 2 {
        return 0.0;
    }
    let mut d: Vec<f64> = times.windows(2).map(|w| w[1] - w[0]).collect();
    median(&mut d)
}

/// The grid is the first fov's sample times. Every fov contributes its
/// nearest sample within half of the grid's median interval; timepoints not
/// covered by every fov are dropped.
pub fn median_across_fovs(s: &MassSeries, mode: MedianMode) -> Result<MedianSeries, GrowthError> {
    let fovs = s.fovs();
    let first = *fovs.first().ok_or(GrowthError::Empty)?;
    let grid: Vec<f64> = s.fov(first).iter().map(|r| r.t).collect();
    let tol = 0.5 * median_interval(&grid);
    let quantities: Vec<Quantity> =
        Quantity::ALL.into_iter().filter(|q| s.records().iter().all(|r| q.of(r).is_some())).collect();

    // per fov: (t, values) with values in `quantities` order
    let tracks: Vec<Vec<(f64, Vec<f64>)>> = fovs
        .iter()
        .map(|f| {
            let recs = s.fov(f);
            let level = |r: &MassRecord| quantities.iter().map(|q| q.of(r).expect("filtered")).collect::<Vec<_>>();
            match mode {
                MedianMode::Level => recs.iter().map(|r| (r.t, level(r))).collect(),
                MedianMode::Rate => recs
                    .windows(2)
                    .map(|w| {
                        let dt = w[1].t - w[0].t;
                        let rate = level(&w[1]).iter().zip(level(&w[0])).map(|(b, a)| (b - a) / dt).collect();
                        (w[1].t, rate)
                    })
                    .collect(),
            }
        })
        .collect();

    let mut times = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); quantities.len()];
    for &t in &grid {
        let mut picks = Vec::with_capacity(tracks.len());
        for track in &tracks {
            let nearest = track.iter().min_by(|a, b| (a.0 - t).abs().total_cmp(&(b.0 - t).abs()));
            match nearest {
                Some(p) if (p.0 - t).abs() <= tol => picks.push(&p.1),
                _ => break,
            }
        }
        if picks.len() < tracks.len() {
            continue;
        }
        times.push(t);
        for (k, col) in columns.iter_mut().enumerate() {
            let mut v: Vec<f64> = picks.iter().map(|p| p[k]).collect();
            col.push(median(&mut v));
        }
    }
    if times.is_empty() {
        return Err(GrowthError::NoOverlap);
    }
    Ok(MedianSeries { times, columns: quantities.into_iter().zip(columns).collect() })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Doubling {
    Hours(f64),
    /// Zero fitted slope.
    NoGrowth,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoublingFit {
    pub doubling: Doubling,
    /// Fitted slope of log2(value) per hour.
    pub slope: f64,
    pub r_squared: f64,
    pub samples: usize,
}

/// Doubling time of one quantity over all records of `s` with `t` in
/// `t_range` (inclusive).
pub fn doubling_time(s: &MassSeries, quantity: Quantity, t_range: (f64, f64)) -> Result<DoublingFit, GrowthError> {
    fit_doubling(&s.values(quantity)?, quantity, t_range)
}

/// Least-squares fit of `log2(value)` against `t` over `t_range`
/// (inclusive).
pub fn fit_doubling(
    points: &[(f64, f64)],
    quantity: Quantity,
    t_range: (f64, f64),
) -> Result<DoublingFit, GrowthError> {
    let sel: Vec<(f64, f64)> = points.iter().copied().filter(|(t, _)| *t >= t_range.0 && *t <= t_range.1).collect();
    if sel.len() < 4 {
        return Err(GrowthError::TooFewSamples { found: sel.len() });
    }
    if let Some(&(t, value)) = sel.iter().find(|(_, v)| !(*v > 0.0)) {
        return Err(GrowthError::NonPositive { quantity: quantity.name(), t, value });
    }
    let n = sel.len() as f64;
    let ys: Vec<f64> = sel.iter().map(|(_, v)| v.log2()).collect();
    let tm = sel.iter().map(|p| p.0).sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let (mut stt, mut sty) = (0.0, 0.0);
    for ((t, _), y) in sel.iter().zip(&ys) {
        stt += (t - tm) * (t - tm);
        sty += (t - tm) * (y - ym);
    }
    let slope = sty / stt;
    let intercept = ym - slope * tm;
    let (mut ss_res, mut ss_tot) = (0.0, 0.0);
    for ((t, _), y) in sel.iter().zip(&ys) {
        ss_res += (y - (intercept + slope * t)).powi(2);
        ss_tot += (y - ym).powi(2);
    }
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    let doubling = if slope.abs() < 1e-12 { Doubling::NoGrowth } else { Doubling::Hours(1.0 / slope) };
    Ok(DoublingFit { doubling, slope, r_squared, samples: sel.len() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NcrTrace {
    /// `(fov, t, nucleus / cytoplasm)`.
    pub points: Vec<(String, f64, f64)>,
    /// Samples with zero cytoplasm mass.
    pub excluded: Vec<(String, f64)>,
}

pub fn ncr(s: &MassSeries) -> NcrTrace {
    let mut trace = NcrTrace { points: Vec::new(), excluded: Vec::new() };
    for r in s.records() {
        if r.cytoplasm_mass > 0.0 {
            trace.points.push((r.fov.clone(), r.t, r.nucleus_mass / r.cytoplasm_mass));
        } else {
            trace.excluded.push((r.fov.clone(), r.t));
        }
    }
    trace
}
