// SPDX-License-Identifier: Apache-2.0

use super::StainError;
use crate::imagecore::Raster;
use crate::Real;

const MIN_SCALE: f64 = 0.125;
const MAX_SCALE: f64 = 8.0;

/// Per-pixel `clamp((v - rho_min) / (rho_max - rho_min), 0, 1)`.
pub fn normalize_for_ml<T: Real>(r: &Raster<T>, rho_min: f64, rho_max: f64) -> Result<Raster<T>, StainError> {
    if !(rho_max > rho_min) || !rho_min.is_finite() || !rho_max.is_finite() {
        return Err(StainError::EmptyNormalizationRange { rho_min, rho_max });
    }
    let span = rho_max - rho_min;
    let data = r.data().iter().map(|v| T::of(((v.as_f64() - rho_min) / span).clamp(0.0, 1.0))).collect();
    Ok(Raster::from_parts(r.width(), r.height(), data, r.pixel_size()))
}

/// Maps any integer index onto `0..n` by reflection without repeating the
/// edge sample (`-1 -> 1`, `n -> n - 2`).
#[inline]
pub fn reflect_index(i: isize, n: usize) -> usize {
    if n == 1 {
        return 0;
    }
    let period = 2 * (n as isize - 1);
    let m = i.rem_euclid(period);
    if m < n as isize {
        m as usize
    } else {
        (period - m) as usize
    }
}

/// Reflection padding with independent margins on each side.
pub fn reflect_pad<T: Real>(
    r: &Raster<T>,
    left: usize,
    top: usize,
    right: usize,
    bottom: usize,
) -> Result<Raster<T>, StainError> {
    let (w, h) = (r.width(), r.height());
    if left.max(right) >= w || top.max(bottom) >= h {
        let pad = left.max(right).max(top.max(bottom));
        return Err(StainError::PadTooLarge { pad, width: w, height: h });
    }
    let (ow, oh) = (w + left + right, h + top + bottom);
    let src = r.data();
    let mut data = Vec::with_capacity(ow * oh);
    for y in 0..oh {
        let sy = reflect_index(y as isize - top as isize, h);
        let row = &src[sy * w..(sy + 1) * w];
        for x in 0..ow {
            data.push(row[reflect_index(x as isize - left as isize, w)]);
        }
    }
    Ok(Raster::from_parts(ow, oh, data, r.pixel_size()))
}

/// Symmetric mirror pad; output is `(W + 2p) x (H + 2p)`.
pub fn mirror_pad<T: Real>(r: &Raster<T>, pad: usize) -> Result<Raster<T>, StainError> {
    if pad >= r.width().min(r.height()) {
        return Err(StainError::PadTooLarge { pad, width: r.width(), height: r.height() });
    }
    reflect_pad(r, pad, pad, pad, pad)
}

/// Inverse of [`mirror_pad`]: drops `pad` pixels from every side.
pub fn crop_center<T: Real>(r: &Raster<T>, pad: usize) -> Result<Raster<T>, StainError> {
    let (w, h) = (r.width().saturating_sub(2 * pad), r.height().saturating_sub(2 * pad));
    Ok(r.crop(pad, pad, w, h)?)
}

/// Bilinear resampling to an explicit size with pixel-center alignment.
/// The pixel pitch is scaled so the field of view is preserved.
pub fn resample<T: Real>(r: &Raster<T>, width: usize, height: usize) -> Result<Raster<T>, StainError> {
    if width == 0 || height == 0 {
        return Err(crate::ImageError::ZeroDimension { width, height }.into());
    }
    if width == r.width() && height == r.height() {
        return Ok(r.clone());
    }
    let (w, h) = (r.width(), r.height());
    let sx = w as f64 / width as f64;
    let sy = h as f64 / height as f64;
    let axis = |i: usize, scale: f64, n: usize| {
        let s = ((i as f64 + 0.5) * scale - 0.5).clamp(0.0, (n - 1) as f64);
        let i0 = s.floor() as usize;
        let i1 = (i0 + 1).min(n - 1);
        (i0, i1, s - i0 as f64)
    };
    let xs: Vec<_> = (0..width).map(|x| axis(x, sx, w)).collect();
    let src = r.data();
    let mut data = Vec::with_capacity(width * height);
    for y in 0..height {
        let (y0, y1, fy) = axis(y, sy, h);
        let (r0, r1) = (&src[y0 * w..(y0 + 1) * w], &src[y1 * w..(y1 + 1) * w]);
        for &(x0, x1, fx) in &xs {
            let top = r0[x0].as_f64() * (1.0 - fx) + r0[x1].as_f64() * fx;
            let bottom = r1[x0].as_f64() * (1.0 - fx) + r1[x1].as_f64() * fx;
            data.push(T::of(top * (1.0 - fy) + bottom * fy));
        }
    }
    let pixel_size = (f64::from(r.pixel_size()) * sx) as f32;
    Ok(Raster::new(width, height, data, pixel_size)?)
}

/// Resamples to the pixel pitch the network was trained at.
pub fn rescale_to_network<T: Real>(r: &Raster<T>, target_pixel_size: f32) -> Result<Raster<T>, StainError> {
    if !(target_pixel_size > 0.0 && target_pixel_size.is_finite()) {
        return Err(crate::ImageError::InvalidPixelSize(target_pixel_size).into());
    }
    let factor = f64::from(r.pixel_size()) / f64::from(target_pixel_size);
    if !(MIN_SCALE..=MAX_SCALE).contains(&factor) {
        return Err(StainError::ScaleOutOfRange(factor));
    }
    if r.pixel_size() == target_pixel_size {
        return Ok(r.clone());
    }
    let width = ((r.width() as f64 * factor).round() as usize).max(1);
    let height = ((r.height() as f64 * factor).round() as usize).max(1);
    Ok(resample(r, width, height)?.with_pixel_size(target_pixel_size)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(v: &[f32]) -> Raster<f32> {
        Raster::new(v.len(), 1, v.to_vec(), 1.0).unwrap()
    }

    #[test]
    fn normalize_endpoints_and_clamp() {
        let r = row(&[1.0, 3.0, 2.0, 10.0, -5.0]);
        let n = normalize_for_ml(&r, 1.0, 3.0).unwrap();
        assert_eq!(n.data(), &[0.0, 1.0, 0.5, 1.0, 0.0]);
        assert!(matches!(normalize_for_ml(&r, 2.0, 2.0), Err(StainError::EmptyNormalizationRange { .. })));
    }

    #[test]
    fn reflection_definition() {
        let r = Raster::new(3, 3, vec![1.0f32, 2.0, 3.0, 1.0, 2.0, 3.0, 1.0, 2.0, 3.0], 1.0).unwrap();
        let p = mirror_pad(&r, 2).unwrap();
        assert_eq!(p.width(), 7);
        assert_eq!(p.row(0), &[3.0, 2.0, 1.0, 2.0, 3.0, 2.0, 1.0]);
        assert_eq!(crop_center(&p, 2).unwrap(), r);
        assert!(mirror_pad(&r, 3).is_err());
        assert_eq!(reflect_index(-1, 1), 0);
        assert_eq!(reflect_index(7, 4), 1);
    }

    #[test]
    fn constant_pad_is_constant() {
        let r = Raster::filled(5, 4, 0.25f32, 0.5).unwrap();
        let p = reflect_pad(&r, 1, 2, 3, 0).unwrap();
        assert_eq!((p.width(), p.height()), (9, 6));
        assert!(p.data().iter().all(|&v| v == 0.25));
    }

    #[test]
    fn rescale_identity_constant_and_range() {
        let r = Raster::from_fn(10, 6, 0.3, |x, y| (x * y) as f32).unwrap();
        assert_eq!(rescale_to_network(&r, 0.3).unwrap(), r);
        let c = Raster::filled(16, 12, 0.7f32, 0.3).unwrap();
        let d = rescale_to_network(&c, 0.6).unwrap();
        assert_eq!((d.width(), d.height(), d.pixel_size()), (8, 6, 0.6));
        assert!(d.data().iter().all(|&v| (v - 0.7).abs() < 1e-6));
        assert!(matches!(rescale_to_network(&c, 0.03), Err(StainError::ScaleOutOfRange(_))));
        assert!(matches!(rescale_to_network(&c, 3.0), Err(StainError::ScaleOutOfRange(_))));
    }
}
