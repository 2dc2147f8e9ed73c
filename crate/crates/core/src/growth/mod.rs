// SPDX-License-Identifier: Apache-2.0

//! Per-fov compartment time series: normalization, cross-fov medians,
//! doubling times, confluence and nuclear-cytoplasmic ratio.

mod analysis;
mod table;

pub use analysis::{
    confluence, doubling_time, fit_doubling, median_across_fovs, ncr, normalize_series, normalized_total, Doubling,
    DoublingFit, MedianMode, MedianSeries, NcrTrace, DEFAULT_WINDOW,
};
pub use table::{read_mass_table, write_mass_table, MASS_TABLE_COLUMNS};

use std::collections::HashMap;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GrowthError {
    #[error("fov {fov:?}: time {t} does not increase (previous {previous})")]
    NonIncreasingTime { fov: String, t: f64, previous: f64 },
    #[error("fov {fov:?} at t = {t}: {field} = {value} is invalid")]
    InvalidValue { fov: String, t: f64, field: &'static str, value: f64 },
    #[error("fov {fov:?}: {found} samples in the first {window} h, need at least 2")]
    EmptyWindow { fov: String, window: f64, found: usize },
    #[error("fov {fov:?}: {quantity} baseline is zero")]
    ZeroBaseline { fov: String, quantity: &'static str },
    #[error("no timepoint is covered by every fov")]
    NoOverlap,
    #[error("series is empty")]
    Empty,
    #[error("{found} samples in range, need at least 4")]
    TooFewSamples { found: usize },
    #[error("{quantity} = {value} at t = {t} is not positive")]
    NonPositive { quantity: &'static str, t: f64, value: f64 },
    #[error("{quantity} is not recorded for every sample")]
    MissingQuantity { quantity: &'static str },
    #[error("mass table line {line}: {message}")]
    Table { line: u64, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// One field of view at one timepoint. Masses in pg, areas in µm², time in
/// hours.
#[derive(Debug, Clone, PartialEq)]
pub struct MassRecord {
    pub t: f64,
    pub fov: String,
    pub nucleus_mass: f64,
    pub cytoplasm_mass: f64,
    pub nucleus_area: f64,
    pub cytoplasm_area: f64,
    pub confluence: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    NucleusMass,
    CytoplasmMass,
    TotalMass,
    NucleusArea,
    CytoplasmArea,
    Confluence,
}

impl Quantity {
    pub const ALL: [Quantity; 6] = [
        Quantity::NucleusMass,
        Quantity::CytoplasmMass,
        Quantity::TotalMass,
        Quantity::NucleusArea,
        Quantity::CytoplasmArea,
        Quantity::Confluence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::NucleusMass => "nucleus_mass",
            Quantity::CytoplasmMass => "cytoplasm_mass",
            Quantity::TotalMass => "total_mass",
            Quantity::NucleusArea => "nucleus_area",
            Quantity::CytoplasmArea => "cytoplasm_area",
            Quantity::Confluence => "confluence",
        }
    }

    pub fn of(self, r: &MassRecord) -> Option<f64> {
        match self {
            Quantity::NucleusMass => Some(r.nucleus_mass),
            Quantity::CytoplasmMass => Some(r.cytoplasm_mass),
            Quantity::TotalMass => Some(r.nucleus_mass + r.cytoplasm_mass),
            Quantity::NucleusArea => Some(r.nucleus_area),
            Quantity::CytoplasmArea => Some(r.cytoplasm_area),
            Quantity::Confluence => r.confluence,
        }
    }
}

impl std::str::FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| format!("unknown quantity {s:?}; expected one of {:?}", Quantity::ALL.map(Quantity::name)))
    }
}

/// Records grouped by fov (in order of first appearance), time strictly
/// increasing within each fov.
#[derive(Debug, Clone, PartialEq)]
pub struct MassSeries {
    records: Vec<MassRecord>,
}

impl MassSeries {
    pub fn new(mut records: Vec<MassRecord>) -> Result<Self, GrowthError> {
        let mut order: HashMap<String, usize> = HashMap::new();
        for r in &records {
            let next = order.len();
            order.entry(r.fov.clone()).or_insert(next);
            check_record(r)?;
        }
        // stable: keeps per-fov input order for the monotonicity check
        records.sort_by_key(|r| order[&r.fov]);
        for w in records.windows(2) {
            if w[0].fov == w[1].fov && !(w[1].t > w[0].t) {
                return Err(GrowthError::NonIncreasingTime { fov: w[1].fov.clone(), t: w[1].t, previous: w[0].t });
            }
        }
        Ok(Self { records })
    }

    pub fn records(&self) -> &[MassRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Fov ids in order of first appearance.
    pub fn fovs(&self) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for r in &self.records {
            if out.last() != Some(&r.fov.as_str()) {
                out.push(&r.fov);
            }
        }
        out
    }

    pub fn fov(&self, id: &str) -> &[MassRecord] {
        let start = self.records.iter().position(|r| r.fov == id).unwrap_or(self.records.len());
        let len = self.records[start..].iter().take_while(|r| r.fov == id).count();
        &self.records[start..start + len]
    }

    /// `(t, value)` pairs of one quantity over all records.
    pub fn values(&self, q: Quantity) -> Result<Vec<(f64, f64)>, GrowthError> {
        self.records
            .iter()
            .map(|r| q.of(r).map(|v| (r.t, v)).ok_or(GrowthError::MissingQuantity { quantity: q.name() }))
            .collect()
    }
}

fn check_record(r: &MassRecord) -> Result<(), GrowthError> {
    let bad = |field, value| GrowthError::InvalidValue { fov: r.fov.clone(), t: r.t, field, value };
    if !r.t.is_finite() {
        return Err(bad("t", r.t));
    }
    for (field, v) in [
        ("nucleus_mass", r.nucleus_mass),
        ("cytoplasm_mass", r.cytoplasm_mass),
        ("nucleus_area", r.nucleus_area),
        ("cytoplasm_area", r.cytoplasm_area),
    ] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(bad(field, v));
        }
    }
    if let Some(c) = r.confluence {
        if !(0.0..=1.0).contains(&c) {
            return Err(bad("confluence", c));
        }
    }
    Ok(())
}
