// SPDX-License-Identifier: Apache-2.0

//! Named weight records and the PICSW1 container.
//!
//! Layout (little-endian): magic `PICSW1`, `u32` record count, then per
//! record `u16` name length, UTF-8 name, `u8` rank, `rank x u32` dims and
//! `prod(dims)` `f32` values.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{LayerKind, NetSpec, StainError};
use crate::imagecore::ImageError;
use crate::Real;

pub const PICSW1_MAGIC: &[u8; 6] = b"PICSW1";

const MAX_RANK: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightRecord<T = f32> {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: Vec<T>,
}

impl<T> WeightRecord<T> {
    pub fn new(name: impl Into<String>, shape: Vec<usize>, data: Vec<T>) -> Result<Self, StainError> {
        let name = name.into();
        let n: usize = shape.iter().product();
        if n != data.len() {
            return Err(StainError::Format(format!(
                "record {name:?}: shape {shape:?} needs {n} values, found {}",
                data.len()
            )));
        }
        Ok(Self { name, shape, data })
    }
}

/// Ordered, name-indexed collection of weight records.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightStore<T = f32> {
    records: Vec<WeightRecord<T>>,
    index: HashMap<String, usize>,
}

impl<T: Real> WeightStore<T> {
    pub fn new(records: Vec<WeightRecord<T>>) -> Result<Self, StainError> {
        let mut index = HashMap::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if r.data.len() != r.shape.iter().product::<usize>() {
                return Err(StainError::Format(format!("record {:?} payload does not match its shape", r.name)));
            }
            if index.insert(r.name.clone(), i).is_some() {
                return Err(StainError::DuplicateRecord(r.name.clone()));
            }
        }
        Ok(Self { records, index })
    }

    pub fn records(&self) -> &[WeightRecord<T>] {
        &self.records
    }

    pub fn get(&self, name: &str) -> Option<&WeightRecord<T>> {
        self.index.get(name).map(|&i| &self.records[i])
    }

    pub(crate) fn require(&self, name: &str) -> Result<&WeightRecord<T>, StainError> {
        self.get(name).ok_or_else(|| StainError::MissingRecord(name.to_string()))
    }

    /// Scalars in records of rank >= 1.
    pub fn parameter_count(&self) -> usize {
        self.records.iter().filter(|r| !r.shape.is_empty()).map(|r| r.data.len()).sum()
    }

    /// Checks that the store holds exactly the records `spec` expects, with
    /// matching shapes and sane batch-norm statistics.
    pub fn validate(&self, spec: &NetSpec) -> Result<(), StainError> {
        spec.validate()?;
        let expected = spec.records();
        for (name, shape) in &expected {
            let r = self.require(name)?;
            if &r.shape != shape {
                return Err(StainError::RecordShape {
                    name: name.clone(),
                    expected: shape.clone(),
                    found: r.shape.clone(),
                });
            }
            if let Some(i) = r.data.iter().position(|v| !v.is_finite()) {
                return Err(StainError::Format(format!("record {name:?} has a non-finite value at {i}")));
            }
        }
        if self.records.len() != expected.len() {
            let known: std::collections::HashSet<&str> = expected.iter().map(|(n, _)| n.as_str()).collect();
            let extra = self.records.iter().find(|r| !known.contains(r.name.as_str())).expect("extra record");
            return Err(StainError::UnexpectedRecord(extra.name.clone()));
        }
        for layer in spec.layers().iter().filter(|l| l.kind == LayerKind::BatchNorm) {
            let var = &self.require(&format!("{}.var", layer.name))?.data;
            if let Some(c) = var.iter().position(|v| *v < T::zero()) {
                return Err(StainError::InvalidNormStatistics {
                    channel: c,
                    reason: format!("{}: running variance {} < 0", layer.name, var[c].as_f64()),
                });
            }
            let eps = self.require(&format!("{}.epsilon", layer.name))?.data[0];
            if !(eps > T::zero()) {
                return Err(StainError::InvalidNormStatistics {
                    channel: 0,
                    reason: format!("{}: epsilon {} must be positive", layer.name, eps.as_f64()),
                });
            }
        }
        Ok(())
    }

    /// All convolution weights and biases zero; batch norms are identity
    /// (`gamma = 1`, `beta = 0`, `mean = 0`, `var = 1`).
    pub fn zeros(spec: &NetSpec, epsilon: f64) -> Result<Self, StainError> {
        Self::build(spec, epsilon, None)
    }

    /// Seeded He-uniform convolution weights, small biases and perturbed
    /// batch-norm statistics.
    pub fn random(spec: &NetSpec, seed: u64, epsilon: f64) -> Result<Self, StainError> {
        Self::build(spec, epsilon, Some(ChaCha8Rng::seed_from_u64(seed)))
    }

    fn build(spec: &NetSpec, epsilon: f64, mut rng: Option<ChaCha8Rng>) -> Result<Self, StainError> {
        spec.validate()?;
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(StainError::InvalidNormStatistics {
                channel: 0,
                reason: format!("epsilon {epsilon} must be positive"),
            });
        }
        let mut records = Vec::new();
        for layer in spec.layers() {
            let fan_in = match layer.kind {
                LayerKind::Conv3 => layer.in_channels * 9,
                LayerKind::UpConv => layer.in_channels * 4,
                LayerKind::Head | LayerKind::BatchNorm => layer.in_channels,
            };
            for (name, shape) in layer.records() {
                let n: usize = shape.iter().product();
                let field = name.rsplit('.').next().unwrap_or_default();
                let data: Vec<T> = match (field, rng.as_mut()) {
                    ("epsilon", _) => vec![T::of(epsilon)],
                    ("gamma" | "var", None) => vec![T::one(); n],
                    (_, None) => vec![T::zero(); n],
                    (_, Some(rng)) => {
                        let range = match field {
                            "weight" => {
                                let a = (6.0 / fan_in as f64).sqrt();
                                -a..a
                            }
                            "gamma" | "var" => 0.5..1.5,
                            _ => -0.1..0.1,
                        };
                        (0..n).map(|_| T::of(rng.random_range(range.clone()))).collect()
                    }
                };
                records.push(WeightRecord { name, shape, data });
            }
        }
        Self::new(records)
    }

    pub fn cast<U: Real>(&self) -> WeightStore<U> {
        WeightStore {
            records: self
                .records
                .iter()
                .map(|r| WeightRecord {
                    name: r.name.clone(),
                    shape: r.shape.clone(),
                    data: r.data.iter().map(|v| U::of(v.as_f64())).collect(),
                })
                .collect(),
            index: self.index.clone(),
        }
    }
}

/// Serializes as PICSW1; values are written as `f32`.
pub fn encode_weights<T: Real>(store: &WeightStore<T>) -> Result<Vec<u8>, StainError> {
    let mut out = Vec::with_capacity(10 + store.parameter_count() * 4);
    out.extend_from_slice(PICSW1_MAGIC);
    let count = u32::try_from(store.records.len()).map_err(|_| StainError::Format("too many records".into()))?;
    out.extend_from_slice(&count.to_le_bytes());
    for r in &store.records {
        let name = r.name.as_bytes();
        let len = u16::try_from(name.len())
            .map_err(|_| StainError::Format(format!("record name of {} bytes is too long", name.len())))?;
        if r.shape.len() > MAX_RANK {
            return Err(StainError::Format(format!("record {:?} has rank {} > {MAX_RANK}", r.name, r.shape.len())));
        }
        out.extend_from_slice(&len.to_le_bytes());
        out.extend_from_slice(name);
        out.push(r.shape.len() as u8);
        for &d in &r.shape {
            let d = u32::try_from(d).map_err(|_| StainError::Format(format!("dimension {d} exceeds u32")))?;
            out.extend_from_slice(&d.to_le_bytes());
        }
        for v in &r.data {
            out.extend_from_slice(&v.as_f32().to_le_bytes());
        }
    }
    Ok(out)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8], StainError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| StainError::Format(format!("truncated at byte {} while reading {what}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self, what: &str) -> Result<u32, StainError> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().expect("4 bytes")))
    }
}

pub fn decode_weights(bytes: &[u8]) -> Result<WeightStore<f32>, StainError> {
    if bytes.len() < PICSW1_MAGIC.len() || &bytes[..6] != PICSW1_MAGIC {
        return Err(StainError::BadMagic(bytes[..bytes.len().min(6)].to_vec()));
    }
    let mut rd = Reader { buf: bytes, pos: 6 };
    let count = rd.u32("record count")? as usize;
    let mut records = Vec::with_capacity(count.min(4096));
    for _ in 0..count {
        let len = u16::from_le_bytes(rd.take(2, "name length")?.try_into().expect("2 bytes")) as usize;
        let name = std::str::from_utf8(rd.take(len, "record name")?)
            .map_err(|e| StainError::Format(format!("record name is not UTF-8: {e}")))?
            .to_string();
        let rank = rd.take(1, "rank")?[0] as usize;
        if rank > MAX_RANK {
            return Err(StainError::Format(format!("record {name:?} has rank {rank} > {MAX_RANK}")));
        }
        let mut shape = Vec::with_capacity(rank);
        let mut n: usize = 1;
        for _ in 0..rank {
            let d = rd.u32("dimension")? as usize;
            n = n.checked_mul(d).ok_or_else(|| StainError::Format(format!("record {name:?} is too large")))?;
            shape.push(d);
        }
        let nbytes = n.checked_mul(4).ok_or_else(|| StainError::Format(format!("record {name:?} is too large")))?;
        let raw = rd.take(nbytes, "payload")?;
        let data = raw.chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes"))).collect();
        records.push(WeightRecord { name, shape, data });
    }
    if rd.pos != bytes.len() {
        return Err(StainError::Format(format!("{} trailing bytes after the last record", bytes.len() - rd.pos)));
    }
    WeightStore::new(records)
}

pub fn save_weights<T: Real>(store: &WeightStore<T>, path: impl AsRef<Path>) -> Result<(), StainError> {
    let bytes = encode_weights(store)?;
    fs::write(path, bytes).map_err(|e| StainError::Image(ImageError::Io(e)))
}

pub fn load_weights(path: impl AsRef<Path>) -> Result<WeightStore<f32>, StainError> {
    let bytes = fs::read(path).map_err(|e| StainError::Image(ImageError::Io(e)))?;
    decode_weights(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> NetSpec {
        NetSpec { depth: 2, base_filters: 2, ..NetSpec::default() }
    }

    #[test]
    fn store_matches_spec_count() {
        let spec = NetSpec::default();
        let w = WeightStore::<f32>::zeros(&spec, 1e-5).unwrap();
        w.validate(&spec).unwrap();
        assert_eq!(w.parameter_count(), spec.parameter_count());
    }

    #[test]
    fn codec_round_trip_is_bit_exact() {
        let w = WeightStore::<f32>::random(&small(), 3, 1e-3).unwrap();
        let bytes = encode_weights(&w).unwrap();
        assert_eq!(&bytes[..6], b"PICSW1");
        assert_eq!(decode_weights(&bytes).unwrap(), w);
    }

    #[test]
    fn hand_built_file() {
        let mut b = b"PICSW1".to_vec();
        b.extend_from_slice(&1u32.to_le_bytes());
        b.extend_from_slice(&3u16.to_le_bytes());
        b.extend_from_slice(b"k.w");
        b.push(2);
        b.extend_from_slice(&1u32.to_le_bytes());
        b.extend_from_slice(&2u32.to_le_bytes());
        b.extend_from_slice(&1.5f32.to_le_bytes());
        b.extend_from_slice(&(-2.0f32).to_le_bytes());
        let w = decode_weights(&b).unwrap();
        assert_eq!(w.get("k.w").unwrap().shape, vec![1, 2]);
        assert_eq!(w.get("k.w").unwrap().data, vec![1.5, -2.0]);
        assert!(decode_weights(&b[..b.len() - 1]).is_err());
        let mut extra = b.clone();
        extra.push(0);
        assert!(decode_weights(&extra).is_err());
        assert!(matches!(decode_weights(b"PICSR1\0\0\0\0"), Err(StainError::BadMagic(_))));
    }

    #[test]
    fn validation_failures() {
        let spec = small();
        let good = WeightStore::<f32>::zeros(&spec, 1e-3).unwrap();

        let mut recs = good.records().to_vec();
        recs.retain(|r| r.name != "head.bias");
        let err = WeightStore::new(recs).unwrap().validate(&spec).unwrap_err();
        assert!(matches!(err, StainError::MissingRecord(n) if n == "head.bias"));

        let mut recs = good.records().to_vec();
        recs.push(WeightRecord::new("extra", vec![1], vec![0.0]).unwrap());
        assert!(matches!(WeightStore::new(recs).unwrap().validate(&spec), Err(StainError::UnexpectedRecord(_))));

        let mut recs = good.records().to_vec();
        recs.push(recs[0].clone());
        assert!(matches!(WeightStore::new(recs), Err(StainError::DuplicateRecord(_))));

        let mut recs = good.records().to_vec();
        recs[0] = WeightRecord::new(recs[0].name.clone(), vec![2, 1, 9], vec![0.0; 18]).unwrap();
        assert!(matches!(WeightStore::new(recs).unwrap().validate(&spec), Err(StainError::RecordShape { .. })));

        let mut recs = good.records().to_vec();
        let var = recs.iter_mut().find(|r| r.name == "enc0.bn1.var").unwrap();
        var.data[1] = -0.5;
        assert!(matches!(
            WeightStore::new(recs).unwrap().validate(&spec),
            Err(StainError::InvalidNormStatistics { .. })
        ));

        let mut recs = good.records().to_vec();
        let eps = recs.iter_mut().find(|r| r.name == "dec0.bn2.epsilon").unwrap();
        eps.data[0] = 0.0;
        assert!(WeightStore::new(recs).unwrap().validate(&spec).is_err());

        assert!(WeightStore::<f32>::zeros(&spec, 0.0).is_err());
    }
}
