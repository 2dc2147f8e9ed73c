// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{EvalError, PairSet, Split};

pub const DEFAULT_K: usize = 5;

/// Seeded partition of the distinct ids into `k` folds whose sizes differ by
/// at most one. Depends only on the id set and the seed.
pub fn kfold_split(ids: &[String], k: usize, seed: u64) -> Result<Vec<Vec<String>>, EvalError> {
    let mut ids: Vec<String> = ids.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    if k < 2 || k > ids.len() {
        return Err(EvalError::InvalidK { k, count: ids.len() });
    }
    ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (ids.len() / k, ids.len() % k);
    let mut folds = Vec::with_capacity(k);
    let mut it = ids.into_iter();
    for f in 0..k {
        let mut fold: Vec<String> = it.by_ref().take(base + usize::from(f < extra)).collect();
        fold.sort();
        folds.push(fold);
    }
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub train: PairSet,
    pub validation: PairSet,
    /// Identical in every fold.
    pub test: PairSet,
}

/// Folds over the non-test fovs of `set`; the test split is held fixed.
pub fn kfold_pairs(set: &PairSet, k: usize, seed: u64) -> Result<Vec<Fold>, EvalError> {
    let test = set.split(Split::Test);
    let pool: Vec<_> = set.records().iter().filter(|r| r.split != Split::Test).cloned().collect();
    let ids: Vec<String> = pool.iter().map(|r| r.fov.clone()).collect();
    let folds = kfold_split(&ids, k, seed)?;
    folds
        .iter()
        .map(|fold| {
            let (mut train, mut val) = (Vec::new(), Vec::new());
            for r in &pool {
                let mut r = r.clone();
                if fold.binary_search(&r.fov).is_ok() {
                    r.split = Split::Validation;
                    val.push(r);
                } else {
                    r.split = Split::Train;
                    train.push(r);
                }
            }
            Ok(Fold { train: PairSet::new(train)?, validation: PairSet::new(val)?, test: test.clone() })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_ids_five_folds_of_two() {
        let ids: Vec<String> = (0..10).map(|i| format!("f{i}")).collect();
        let folds = kfold_split(&ids, 5, 1).unwrap();
        assert!(folds.iter().all(|f| f.len() == 2));
        let mut all: Vec<String> = folds.concat();
        all.sort();
        let mut want = ids.clone();
        want.sort();
        assert_eq!(all, want);
        assert_eq!(folds, kfold_split(&ids, 5, 1).unwrap());
        assert!(matches!(kfold_split(&ids[..3], 5, 1), Err(EvalError::InvalidK { k: 5, count: 3 })));
    }
}
