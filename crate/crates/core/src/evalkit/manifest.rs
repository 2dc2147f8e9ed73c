// SPDX-License-Identifier: Apache-2.0

//! Pair manifest CSV: `phase_path,stain_path,fov,z,split`.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::EvalError;

pub const MANIFEST_COLUMNS: [&str; 5] = ["phase_path", "stain_path", "fov", "z", "split"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

impl std::str::FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "validation" => Ok(Split::Validation),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split {other:?} (train|validation|test)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub phase_path: PathBuf,
    pub stain_path: PathBuf,
    pub fov: String,
    pub z: u32,
    pub split: Split,
}

/// Pair records where every fov sits in exactly one split and lists each
/// z slice once.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PairSet {
    records: Vec<PairRecord>,
}

impl PairSet {
    pub fn new(records: Vec<PairRecord>) -> Result<Self, EvalError> {
        let mut owner: BTreeMap<&str, Split> = BTreeMap::new();
        let mut slices: BTreeSet<(&str, u32)> = BTreeSet::new();
        for r in &records {
            if *owner.entry(&r.fov).or_insert(r.split) != r.split {
                return Err(EvalError::FovInTwoSplits(r.fov.clone()));
            }
            if !slices.insert((&r.fov, r.z)) {
                return Err(EvalError::DuplicateSlice { fov: r.fov.clone(), z: r.z });
            }
        }
        Ok(Self { records })
    }

    pub fn records(&self) -> &[PairRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Sorted distinct fov ids.
    pub fn fovs(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.records.iter().map(|r| &r.fov).collect();
        set.into_iter().cloned().collect()
    }

    pub fn split(&self, which: Split) -> PairSet {
        PairSet { records: self.records.iter().filter(|r| r.split == which).cloned().collect() }
    }
}

pub fn read_manifest(reader: impl Read) -> Result<PairSet, EvalError> {
    let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rd.headers()?.clone();
    for col in MANIFEST_COLUMNS {
        if !headers.iter().any(|h| h == col) {
            return Err(EvalError::Manifest { line: 1, message: format!("missing column {col:?}") });
        }
    }
    let mut records = Vec::new();
    for row in rd.deserialize::<PairRecord>() {
        match row {
            Ok(r) => records.push(r),
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                return Err(EvalError::Manifest { line, message: e.to_string() });
            }
        }
    }
    PairSet::new(records)
}

pub fn write_manifest(set: &PairSet, out: impl Write) -> Result<(), EvalError> {
    let mut wr = csv::Writer::from_writer(out);
    for r in set.records() {
        wr.serialize(r)?;
    }
    if set.is_empty() {
        wr.write_record(MANIFEST_COLUMNS)?;
    }
    wr.flush().map_err(csv::Error::from)?;
    Ok(())
}
