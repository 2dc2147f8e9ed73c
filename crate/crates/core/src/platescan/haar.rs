// SPDX-License-Identifier: Apache-2.0

use super::PlanError;
use crate::imagecore::Raster;
use crate::Real;

/// One-level 2-D Haar decomposition; mean |detail| over LH, HL and HH
/// divided by mean |LL|. Odd trailing rows/columns are ignored.
pub fn haar_focus_metric<T: Real>(r: &Raster<T>) -> f64 {
    let (w, h) = (r.width() / 2, r.height() / 2);
    if w == 0 || h == 0 {
        return 0.0;
    }
    let (mut detail, mut approx) = (0.0, 0.0);
    for y in 0..h {
        let (r0, r1) = (r.row(2 * y), r.row(2 * y + 1));
        for x in 0..w {
            let (a, b) = (r0[2 * x].as_f64(), r0[2 * x + 1].as_f64());
            let (c, d) = (r1[2 * x].as_f64(), r1[2 * x + 1].as_f64());
            approx += (a + b + c + d).abs() * 0.5;
            detail += ((a - b + c - d).abs() + (a + b - c - d).abs() + (a - b - c + d).abs()) * 0.5;
        }
    }
    if approx == 0.0 {
        return 0.0;
    }
    (detail / 3.0) / approx
}

/// Indices of the `k` highest-scoring slices in ascending order; ties go to
/// the lower index.
pub fn select_in_focus<T: Real>(stack: &[Raster<T>], k: usize) -> Result<Vec<usize>, PlanError> {
    if k > stack.len() {
        return Err(PlanError::StackTooShort { len: stack.len(), k });
    }
    let scores: Vec<f64> = stack.iter().map(haar_focus_metric).collect();
    let mut idx: Vec<usize> = (0..stack.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut out = idx[..k].to_vec();
    out.sort_unstable();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_scores_zero_and_scale_invariance() {
        assert_eq!(haar_focus_metric(&Raster::filled(9, 7, 3.0f32, 1.0).unwrap()), 0.0);
        let r = Raster::from_fn(16, 16, 1.0, |x, y| 1.0 + ((x / 2 + y) % 3) as f64).unwrap();
        let s = haar_focus_metric(&r);
        let r2 = r.map(|v| v * 7.5).unwrap();
        assert!((haar_focus_metric(&r2) - s).abs() < 1e-12);
    }

    #[test]
    fn identical_stack_takes_first_indices() {
        let r = Raster::from_fn(8, 8, 1.0, |x, y| ((x + y) % 2) as f32).unwrap();
        let stack = vec![r; 5];
        assert_eq!(select_in_focus(&stack, 3).unwrap(), vec![0, 1, 2]);
        assert!(select_in_focus(&stack, 6).is_err());
    }
}
