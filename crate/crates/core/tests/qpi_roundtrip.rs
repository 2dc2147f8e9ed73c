// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::PI;

use pics_core::imagecore::{ImageMeta, Raster};
use pics_core::qpi::*;
use pics_core::PhaseImage;
use proptest::prelude::*;

fn wrapped_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

fn rel_rms_interior(truth: &Raster<f64>, est: &Raster<f64>, margin: usize) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for y in margin..truth.height() - margin {
        for x in margin..truth.width() - margin {
            let (a, b) = (truth.get(x, y), est.get(x, y));
            num += (a - b).powi(2);
            den += a * a;
        }
    }
    (num / den).sqrt()
}

#[test]
fn retrieval_reproduces_forward_model_on_random_smooth_phase() {
    let g = FieldGeometry::new(64, 64, 0.3);
    for seed in 0..5 {
        let phi: PhaseImage<f64> = smooth_phase(g, ImageMeta::phase(0.78, 0.3), seed, 4, 1.5).unwrap();
        let bg = Raster::from_fn(64, 64, 0.3, |x, y| 0.5 + 0.01 * (x + y) as f64).unwrap();
        let truth = model_gradient(&phi);
        let est = retrieve_gradient(&simulate_glim_frames(&phi, &bg, 0.0).unwrap());
        for (a, b) in est.raster.data().iter().zip(truth.data()) {
            assert!(wrapped_diff(*a, *b) < 1e-4);
        }
        assert_eq!(est.quality.count(), 64 * 64);
    }
}

#[test]
fn retrieval_in_f32_stays_below_1e4_rad() {
    let g = FieldGeometry::new(64, 64, 0.3);
    let phi: PhaseImage<f32> = smooth_phase(g, ImageMeta::phase(0.78, 0.3), 2, 4, 1.5).unwrap();
    let bg = Raster::filled(64, 64, 1.0f32, 0.3).unwrap();
    let truth = model_gradient(&phi);
    let est = retrieve_gradient(&simulate_glim_frames(&phi, &bg, 0.0).unwrap());
    for (a, b) in est.raster.data().iter().zip(truth.data()) {
        assert!(wrapped_diff(*a as f64, *b as f64) < 1e-4);
    }
}

#[test]
fn end_to_end_round_trip_on_smooth_maps() {
    // Smooth = band-limited to wavelengths >= 256/3 px. The forward
    // difference registers the gradient half a pixel to the right, which
    // the integrator does not undo, giving a first-order error of
    // pi * mode / width.
    let g = FieldGeometry::new(256, 256, 0.3);
    for seed in 0..20 {
        let phi: PhaseImage<f64> = smooth_phase(g, ImageMeta::phase(0.78, 0.3), seed, 3, 1.0).unwrap();
        let bg = Raster::filled(256, 256, 1.0f64, 0.3).unwrap();
        let est =
            integrate_hilbert(&retrieve_gradient(&simulate_glim_frames(&phi, &bg, 0.0).unwrap()), IntegrationMode::Sgn)
                .unwrap();
        let err = rel_rms_interior(&phi.raster, &est.raster, 4);
        assert!(err < 0.05, "seed {seed}: relative rms {err}");
    }
}

#[test]
fn gaussian_bump_from_analytic_gradient() {
    let (w, h, p, shear) = (128usize, 96usize, 0.2f32, 0.25f64);
    let (amp, sigma) = (1.2f64, 2.0f64);
    let center = |x: usize, y: usize| ((x as f64 - 64.0) * p as f64, (y as f64 - 48.0) * p as f64);
    let truth = Raster::from_fn(w, h, p, |x, y| {
        let (dx, dy) = center(x, y);
        amp * (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp()
    })
    .unwrap();
    let grad = Raster::from_fn(w, h, p, |x, y| {
        let (dx, dy) = center(x, y);
        -shear * amp * dx / (sigma * sigma) * (-(dx * dx + dy * dy) / (2.0 * sigma * sigma)).exp()
    })
    .unwrap();
    let g = GradientImage::from_raster(grad, ImageMeta::phase(0.78, shear as f32));
    let est = integrate_hilbert(&g, IntegrationMode::Sgn).unwrap();
    // Remove per-row means from the truth: that component lies in the
    // integration null space.
    let zero_mean = Raster::from_fn(w, h, p, |x, y| {
        let m: f64 = truth.row(y).iter().sum::<f64>() / w as f64;
        truth.get(x, y) - m
    })
    .unwrap();
    let err = rel_rms_interior(&zero_mean, &est.raster, 0);
    assert!(err < 0.05, "relative rms {err}");
}

#[test]
fn bead_pipeline_recovers_peak_phase() {
    let meta = ImageMeta::phase(0.78, 0.1);
    let g = FieldGeometry::new(512, 512, 0.1);
    let phi: PhaseImage<f32> = make_bead_phantom(3.0, 1.579, 1.518, meta, g).unwrap();
    let bg = Raster::filled(512, 512, 1.0f32, 0.1).unwrap();
    let out =
        integrate_hilbert(&retrieve_gradient(&simulate_glim_frames(&phi, &bg, 0.0).unwrap()), IntegrationMode::Sgn)
            .unwrap();
    let row = out.raster.row(256);
    let mut sorted = row.to_vec();
    sorted.sort_by(f32::total_cmp);
    let background = sorted[sorted.len() / 2] as f64;
    let (_, peak) = out.raster.min_max();
    let recovered = peak as f64 - background;
    let expected = bead_peak_phase(3.0, 0.78, 1.579, 1.518);
    assert!((recovered - expected).abs() / expected < 0.05, "recovered {recovered}");
}

#[test]
fn wiener_mode_approaches_sgn_for_small_regularization() {
    let g = FieldGeometry::new(64, 64, 0.3);
    let phi: PhaseImage<f64> = smooth_phase(g, ImageMeta::phase(0.78, 0.3), 1, 2, 1.0).unwrap();
    let grad = GradientImage::from_raster(model_gradient(&phi), phi.meta);
    let a = integrate_hilbert(&grad, IntegrationMode::Sgn).unwrap();
    let b = integrate_hilbert(&grad, IntegrationMode::Wiener { l_reg: 1e-6 }).unwrap();
    let err = rel_rms_interior(&a.raster, &b.raster, 0);
    assert!(err < 1e-5);
    let c = integrate_hilbert(&grad, IntegrationMode::wiener_default(0.3)).unwrap();
    assert!(rel_rms_interior(&a.raster, &c.raster, 0) < 0.1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn retrieval_is_invariant_to_intensity_scaling(seed in 0u64..1000, c in 0.01f64..100.0) {
        let g = FieldGeometry::new(16, 12, 0.3);
        let phi: PhaseImage<f64> = smooth_phase(g, ImageMeta::phase(0.78, 0.3), seed, 3, 2.0).unwrap();
        let bg = Raster::filled(16, 12, 1.0f64, 0.3).unwrap();
        let fs = simulate_glim_frames(&phi, &bg, 0.0).unwrap();
        let a = retrieve_gradient(&fs);
        let b = retrieve_gradient(&fs.scaled(c).unwrap());
        for (x, y) in a.raster.data().iter().zip(b.raster.data()) {
            prop_assert!(wrapped_diff(*x, *y) < 1e-9);
        }
    }

    #[test]
    fn integration_is_linear(seed in 0u64..1000, a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let geo = FieldGeometry::new(20, 10, 0.25);
        let meta = ImageMeta::phase(0.78, 0.2);
        let x = model_gradient(&smooth_phase::<f64>(geo, meta, seed, 4, 1.0).unwrap());
        let y = model_gradient(&smooth_phase::<f64>(geo, meta, seed + 1, 4, 1.0).unwrap());
        let combo = x.zip_map(&y, |u, v| a * u + b * v).unwrap();
        for mode in [IntegrationMode::Sgn, IntegrationMode::Wiener { l_reg: 0.3 }] {
            let ix = integrate_hilbert(&GradientImage::from_raster(x.clone(), meta), mode).unwrap();
            let iy = integrate_hilbert(&GradientImage::from_raster(y.clone(), meta), mode).unwrap();
            let ic = integrate_hilbert(&GradientImage::from_raster(combo.clone(), meta), mode).unwrap();
            for k in 0..ic.raster.len() {
                let lin = a * ix.raster.data()[k] + b * iy.raster.data()[k];
                prop_assert!((ic.raster.data()[k] - lin).abs() < 1e-9);
            }
        }
    }
}
