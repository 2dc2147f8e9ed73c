// SPDX-License-Identifier: Apache-2.0

//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fail.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;
#[path = "../../core/tests/common/nn_oracle.rs"]
mod nn_oracle;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use nn_oracle::*;
use pics_core::evalkit::mass_agreement;
use pics_core::growth::{doubling_time, normalize_series, Doubling, MassRecord, MassSeries, Quantity, DEFAULT_WINDOW};
use pics_core::platescan::{focus_surface, FocusPoint};
use pics_core::qpi::{
    bead_peak_phase, integrate_hilbert, make_bead_phantom, model_gradient, retrieve_gradient, simulate_glim_frames,
    smooth_phase, FieldGeometry, IntegrationMode,
};
use pics_core::rtpipeline::{simulate, SimOptions, Stage, StageProfile};
use pics_core::specificity::{
    binarize, dry_mass, inflection_threshold, watershed_instances, BinaryMask, ThresholdRule, DEFAULT_BINS,
    DEFAULT_GAMMA, DEFAULT_H,
};
use pics_core::stain::{
    batchnorm_infer, conv2d, infer_stain, max_pool2, normalize_for_ml, up_conv2, InferParams, PadMode,
};
use pics_core::{ChannelTag, ImageMeta, Mask, NetSpec, PhaseImage, Raster, StainMap, Tensor, UNet, WeightStore};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn rel_rms_interior(truth: &Raster<f64>, est: &Raster<f64>, margin: usize) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for y in margin..truth.height() - margin {
        for x in margin..truth.width() - margin {
            num += (truth.get(x, y) - est.get(x, y)).powi(2);
            den += truth.get(x, y).powi(2);
        }
    }
    (num / den).sqrt()
}

fn wrapped_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::TAU);
    d.min(std::f64::consts::TAU - d)
}

fn bead_peak() -> Outcome {
    let start = Instant::now();
    let meta = ImageMeta::phase(0.78, 0.1);
    let phi: PhaseImage<f32> = make_bead_phantom(3.0, 1.579, 1.518, meta, FieldGeometry::new(512, 512, 0.1)).unwrap();
    let bg = Raster::filled(512, 512, 1.0f32, 0.1).unwrap();
    let out =
        integrate_hilbert(&retrieve_gradient(&simulate_glim_frames(&phi, &bg, 0.0).unwrap()), IntegrationMode::Sgn)
            .unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let mut row = out.raster.row(256).to_vec();
    row.sort_by(f32::total_cmp);
    let recovered = (out.raster.min_max().1 - row[row.len() / 2]) as f64;
    let expected = bead_peak_phase(3.0, 0.78, 1.579, 1.518);
    let err = (recovered - expected).abs() / expected;
    ensure!(err < 0.05, "peak {recovered:.4} vs {expected:.4}");
    ensure!(elapsed < 5.0, "took {elapsed:.2} s");
    Ok(format!("peak {recovered:.4} rad vs {expected:.4} ({:.2}%), {elapsed:.2} s", err * 100.0))
}

fn round_trip() -> Outcome {
    let g = FieldGeometry::new(256, 256, 0.3);
    let bg = Raster::filled(256, 256, 1.0f64, 0.3).unwrap();
    let (mut worst, mut worst_grad) = (0.0f64, 0.0f64);
    for seed in 0..20 {
        let phi: PhaseImage<f64> = smooth_phase(g, ImageMeta::phase(0.78, 0.3), seed, 3, 1.0).unwrap();
        let grad = retrieve_gradient(&simulate_glim_frames(&phi, &bg, 0.0).unwrap());
        for (a, b) in grad.raster.data().iter().zip(model_gradient(&phi).data()) {
            worst_grad = worst_grad.max(wrapped_diff(*a, *b));
        }
        let est = integrate_hilbert(&grad, IntegrationMode::Sgn).unwrap();
        worst = worst.max(rel_rms_interior(&phi.raster, &est.raster, 4));
    }
    ensure!(worst < 0.05, "worst relative rms {worst}");
    ensure!(worst_grad < 1e-4, "worst gradient error {worst_grad}");
    Ok(format!("20 seeds, worst rel rms {:.2}%, gradient err {worst_grad:.1e} rad", worst * 100.0))
}

fn parameter_count() -> Outcome {
    let spec = NetSpec::default();
    let n = spec.parameter_count();
    let stored = WeightStore::<f32>::zeros(&spec, 1e-5).unwrap().parameter_count();
    ensure!(n == stored, "spec {n} vs store {stored}");
    ensure!((1_800_000..=2_000_000).contains(&n), "{n} parameters");
    Ok(format!("{n} parameters"))
}

fn layer_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for (c_in, c_out, size) in [(1, 4, 8), (2, 3, 16), (3, 2, 11)] {
        let x = random_tensor(&mut rng, c_in, size, size + 3);
        let w = random_vec(&mut rng, c_out * c_in * 9, -1.0, 1.0);
        let b = random_vec(&mut rng, c_out, -1.0, 1.0);
        for (mode, reflect) in [(PadMode::SameReflect, true), (PadMode::SameZero, false)] {
            let got = conv2d(&x, &w, [c_out, c_in, 3, 3], Some(&b), 1, mode).unwrap();
            worst =
                worst.max(max_diff(&got, &ref_conv(&to_map(&x), &f64s(&w), [c_out, c_in, 3, 3], &f64s(&b), reflect)));
        }
    }
    let x = random_tensor(&mut rng, 3, 16, 12);
    let g = random_vec(&mut rng, 3, 0.5, 2.0);
    let b = random_vec(&mut rng, 3, -1.0, 1.0);
    let mean = random_vec(&mut rng, 3, -0.5, 0.5);
    let var = random_vec(&mut rng, 3, 0.1, 3.0);
    let bn = batchnorm_infer(&x, &g, &b, &mean, &var, 1e-3).unwrap();
    worst = worst
        .max(max_diff(&bn, &ref_bn_relu(&to_map(&x), &f64s(&g), &f64s(&b), &f64s(&mean), &f64s(&var), 1e-3, false)));
    worst = worst.max(max_diff(&max_pool2(&x), &ref_pool(&to_map(&x))));
    let w = random_vec(&mut rng, 3 * 2 * 4, -1.0, 1.0);
    let ub = random_vec(&mut rng, 2, -1.0, 1.0);
    let up = up_conv2(&x, &w, [3, 2, 2, 2], Some(&ub)).unwrap();
    worst = worst.max(max_diff(&up, &ref_up(&to_map(&x), &f64s(&w), 2, &f64s(&ub))));
    ensure!(worst < 1e-5, "layer max abs diff {worst}");

    let spec = NetSpec::default();
    let ws = WeightStore::<f32>::random(&spec, 11, 1e-5).unwrap();
    let x = Tensor::new(1, 64, 64, random_vec(&mut rng, 64 * 64, 0.0, 1.0)).unwrap();
    let got = UNet::new(spec.clone(), ws.clone()).unwrap().forward(&x).unwrap();
    let net = max_diff(&got, &reference_unet(&spec, &ws, &to_map(&x)));
    ensure!(net < 1e-4, "network max abs diff {net}");
    Ok(format!("layers {worst:.1e}, network {net:.1e}"))
}

fn zero_net_identity() -> Outcome {
    let spec = NetSpec::default();
    let net = UNet::new(spec.clone(), WeightStore::<f32>::zeros(&spec, 1e-5).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sizes = [(33, 33), (40, 37), (48, 48), (50, 61), (64, 35), (71, 80), (96, 64), (100, 99), (37, 128), (130, 45)];
    for (w, h) in sizes {
        let r = Raster::new(w, h, random_vec(&mut rng, w * h, -0.5, 2.0), 0.3).unwrap();
        let s =
            infer_stain(&PhaseImage::new(r.clone(), ImageMeta::default()), &net, &InferParams::new(-0.2, 1.7)).unwrap();
        ensure!(s.raster == normalize_for_ml(&r, -0.2, 1.7).unwrap(), "{w}x{h} differs");
    }
    Ok(format!("{} sizes bit-identical", sizes.len()))
}

fn disc_mask(w: usize, h: usize, centers: &[(f64, f64)], r: f64) -> BinaryMask {
    let m = Mask::from_fn(w, h, |x, y| {
        centers.iter().any(|&(cx, cy)| (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2) <= r * r)
    })
    .unwrap();
    BinaryMask::new(m, ChannelTag::Dapi)
}

fn segmentation() -> Outcome {
    let (mut min_recall, mut max_fp) = (1.0f64, 0.0f64);
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 120;
        let mut truth: Vec<bool> = (0..n * n).map(|i| i < n * n / 5).collect();
        truth.shuffle(&mut rng);
        let (bg, fg) = (Normal::new(0.1, 0.02).unwrap(), Normal::new(0.8, 0.05).unwrap());
        let data = truth.iter().map(|&t| if t { fg.sample(&mut rng) } else { bg.sample(&mut rng) } as f32).collect();
        let stain = StainMap::new(Raster::new(n, n, data, 0.5).unwrap(), ChannelTag::Dapi);
        let mask = binarize(&stain, inflection_threshold(&stain, DEFAULT_BINS).unwrap()).unwrap();
        let fgn = truth.iter().filter(|&&b| b).count() as f64;
        let hit = mask.mask.bits().iter().zip(&truth).filter(|(&m, &t)| m && t).count() as f64;
        let fp = mask.mask.bits().iter().zip(&truth).filter(|(&m, &t)| m && !t).count() as f64;
        min_recall = min_recall.min(hit / fgn);
        max_fp = max_fp.max(fp / (truth.len() as f64 - fgn));
    }
    ensure!(min_recall >= 0.99, "recall {min_recall}");
    ensure!(max_fp <= 0.01, "false positive rate {max_fp}");

    let (c1, c2) = ((22.0, 25.0), (38.0, 25.0));
    let mask = disc_mask(60, 50, &[c1, c2], 10.0);
    let l = watershed_instances(&mask, DEFAULT_H);
    ensure!(l.count() == 2, "{} instances", l.count());
    let (a, b) = (l.get(22, 25), l.get(38, 25));
    ensure!(a != b && a != 0 && b != 0, "centres share a label");
    let bisector = (c1.0 + c2.0) / 2.0;
    for y in 0..50 {
        for x in 0..60 {
            let lab = l.get(x, y);
            ensure!((lab != 0) == mask.mask.get(x, y), "label support differs at ({x}, {y})");
            let off = x as f64 - bisector;
            ensure!(lab == 0 || off.abs() <= 1.0 || lab == if off < 0.0 { a } else { b }, "({x}, {y}) on wrong side");
        }
    }
    Ok(format!("min recall {:.4}, max fp {:.4}, overlap split into 2", min_recall, max_fp))
}

fn dry_mass_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
    for _ in 0..20 {
        let r = Raster::new(40, 30, (0..1200).map(|_| rng.random_range(-0.3..2.0)).collect(), 0.37).unwrap();
        let phase = PhaseImage::new(r, ImageMeta::phase(0.55, 0.3));
        let a_bits: Vec<bool> = (0..1200).map(|_| rng.random_bool(0.4)).collect();
        let b_bits: Vec<bool> = a_bits.iter().map(|&x| !x && rng.random_bool(0.5)).collect();
        let a = BinaryMask::new(Mask::new(40, 30, a_bits).unwrap(), ChannelTag::Dapi);
        let b = BinaryMask::new(Mask::new(40, 30, b_bits).unwrap(), ChannelTag::Dapi);
        let u = BinaryMask::new(a.mask.or(&b.mask).unwrap(), ChannelTag::Dapi);
        let (ma, mb, mu) = (
            dry_mass(&phase, &a, DEFAULT_GAMMA).unwrap(),
            dry_mass(&phase, &b, DEFAULT_GAMMA).unwrap(),
            dry_mass(&phase, &u, DEFAULT_GAMMA).unwrap(),
        );
        ensure!(rel(mu, ma + mb) < 1e-9, "additivity {mu} vs {}", ma + mb);
        let c = rng.random_range(0.1..10.0);
        let scaled = PhaseImage::new(phase.raster.map(|v| v * c).unwrap(), phase.meta);
        ensure!(rel(dry_mass(&scaled, &a, DEFAULT_GAMMA).unwrap(), c * ma) < 1e-9, "linearity");
    }

    let disc = |cx: f64, cy: f64, r: f64| {
        Mask::from_fn(64, 64, |x, y| (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2) <= r * r).unwrap()
    };
    let stain = |m: &Mask, rng: &mut ChaCha8Rng| {
        let d = m.bits().iter().map(|&b| if b { 1.0 } else { 0.1 } + rng.random_range(-0.02..0.02)).collect();
        StainMap::new(Raster::new(64, 64, d, 0.5).unwrap(), ChannelTag::Dapi)
    };
    let spheroid = |cx: f64, cy: f64, rad: f64| {
        let r = Raster::from_fn(64, 64, 0.5, |x, y| {
            let d2 = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)) / (rad * rad);
            0.05 + 2.0 * (1.0 - d2).max(0.0).sqrt()
        })
        .unwrap();
        PhaseImage::new(r, ImageMeta::phase(0.55, 0.3))
    };
    let sum =
        |p: &PhaseImage<f64>, m: &Mask| (0..64 * 64).filter(|&i| m.bits()[i]).map(|i| p.raster.data()[i]).sum::<f64>();
    let s = stain(&disc(30.0, 33.0, 12.0), &mut rng);
    let same = mass_agreement(&spheroid(30.0, 33.0, 26.0), &s, &s, ThresholdRule::Inflection).unwrap();
    ensure!(same == 0.0, "identical stains give {same}");

    let (mut got, mut oracle) = (0.0, 0.0);
    for _ in 0..20 {
        let (cx, cy) = (rng.random_range(28.0..36.0), rng.random_range(28.0..36.0));
        let rn = rng.random_range(9.0..14.0);
        let sigma = rng.random_range(-0.6..0.6);
        let phase = spheroid(cx, cy, rng.random_range(22.0..27.0));
        let (truth, pred) = (disc(cx, cy, rn), disc(cx + 0.3, cy, rn + sigma));
        got += mass_agreement(&phase, &stain(&truth, &mut rng), &stain(&pred, &mut rng), ThresholdRule::Inflection)
            .unwrap();
        oracle += (sum(&phase, &pred) - sum(&phase, &truth)).abs() / sum(&phase, &truth) * 100.0;
    }
    let (got, oracle) = (got / 20.0, oracle / 20.0);
    ensure!((got - oracle).abs() < 0.1, "perturbation {got} vs oracle {oracle}");
    Ok(format!("linear/additive to 1e-9, self-agreement 0, perturbation {got:.3}% vs {oracle:.3}%"))
}

fn exponential(m0: f64, td: f64, n: usize, mut noise: Option<(&mut ChaCha8Rng, f64)>) -> Vec<MassRecord> {
    (0..n)
        .map(|i| {
            let t = i as f64 * 68.0 / 60.0;
            let mut f = || match noise.as_mut() {
                Some((rng, s)) => 1.0 + Normal::new(0.0, *s).unwrap().sample(*rng),
                None => 1.0,
            };
            let g = m0 * (t / td).exp2();
            MassRecord {
                t,
                fov: "a".into(),
                nucleus_mass: 0.3 * g * f(),
                cytoplasm_mass: 0.7 * g * f(),
                nucleus_area: 50.0 * g * f(),
                cytoplasm_area: 200.0 * g * f(),
                confluence: None,
            }
        })
        .collect()
}

fn hours(d: Doubling) -> f64 {
    match d {
        Doubling::Hours(h) => h,
        Doubling::NoGrowth => f64::INFINITY,
    }
}

fn growth() -> Outcome {
    let fit =
        doubling_time(&MassSeries::new(exponential(12.0, 20.0, 100, None)).unwrap(), Quantity::TotalMass, (0.0, 200.0))
            .unwrap();
    ensure!((hours(fit.doubling) - 20.0).abs() < 1e-9, "exact fit {:?}", fit.doubling);
    ensure!((fit.r_squared - 1.0).abs() < 1e-12, "R^2 {}", fit.r_squared);
    let mut worst = 0.0f64;
    for seed in 0..30 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let td = rng.random_range(15.0..40.0);
        let s = MassSeries::new(exponential(8.0, td, 60, Some((&mut rng, 0.02)))).unwrap();
        let got = hours(doubling_time(&s, Quantity::TotalMass, (0.0, 100.0)).unwrap().doubling);
        worst = worst.max((got - td).abs() / td);
    }
    ensure!(worst < 0.05, "noisy fit off by {:.2}%", worst * 100.0);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let s = MassSeries::new(exponential(3.0, 22.0, 50, Some((&mut rng, 0.02)))).unwrap();
    let n1 = normalize_series(&s, DEFAULT_WINDOW).unwrap();
    let n2 = normalize_series(&n1, DEFAULT_WINDOW).unwrap();
    for (a, b) in n1.records().iter().zip(n2.records()) {
        for q in Quantity::ALL {
            let (x, y) = (q.of(a).unwrap_or(0.0), q.of(b).unwrap_or(0.0));
            ensure!((x - y).abs() <= 1e-12 * x.abs().max(1.0), "{q:?} not idempotent");
        }
    }
    Ok(format!("exact Td 20 h with R^2 1, noisy worst {:.2}%, normalization idempotent", worst * 100.0))
}

fn planner() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let cfg = common::data_file("six_well.toml");
    let out = common::run_ok(dir.path(), &["plan", "--config", cfg.to_str().unwrap(), "--out", "plan.ndjson"]);
    ensure!(out.contains("202860 phase images"), "plan output: {out}");
    let lines = std::fs::read_to_string(dir.path().join("plan.ndjson")).unwrap().lines().count();
    ensure!(lines == 5880, "{lines} events per pass");

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (a, b, c) = (rng.random_range(-0.05..0.05), rng.random_range(-0.05..0.05), rng.random_range(-50.0..50.0));
        let plane = |x: f64, y: f64| a * x + b * y + c;
        let mut pts: Vec<FocusPoint> = [(0.0, 0.0), (10_000.0, 0.0), (0.0, 8_000.0), (10_000.0, 8_000.0)]
            .iter()
            .map(|&(x, y)| FocusPoint { x, y, z: plane(x, y) })
            .collect();
        for _ in 0..rng.random_range(0..8) {
            let (x, y) = (rng.random_range(0.0..10_000.0), rng.random_range(0.0..8_000.0));
            pts.push(FocusPoint { x, y, z: plane(x, y) });
        }
        let s = focus_surface(&pts).unwrap();
        for _ in 0..200 {
            let (x, y) = (rng.random_range(-3_000.0..13_000.0), rng.random_range(-3_000.0..11_000.0));
            worst = worst.max((s.z_at(x, y) - plane(x, y)).abs());
        }
    }
    ensure!(worst < 1e-9, "affine focus error {worst}");
    Ok(format!("202860 phase images, affine focus err {worst:.1e} um"))
}

fn pipeline() -> Outcome {
    let t = simulate(&StageProfile::glim(1), 400, SimOptions::default()).unwrap();
    ensure!(t.steady_state_period_ms == 80.0, "period {}", t.steady_state_period_ms);
    let mut slow = StageProfile::glim(1);
    slow.stage_mut("inference").unwrap().latency_ms = 200.0;
    let ts = simulate(&slow, 400, SimOptions::default()).unwrap();
    ensure!(ts.steady_state_period_ms == 200.0, "slow period {}", ts.steady_state_period_ms);

    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for i in 0..100 {
        let p = StageProfile {
            modulation_settle_ms: rng.random_range(1..=120) as f64,
            exposure_ms: rng.random_range(1..=40) as f64,
            readout_ms: rng.random_range(1..=40) as f64,
            compute: (0..rng.random_range(1..=5))
                .map(|k| Stage::new(&format!("s{k}"), rng.random_range(1..=250) as f64))
                .collect(),
        };
        let sliding = rng.random_bool(0.5);
        let n = 2000;
        let t = simulate(&p, n, SimOptions { sliding_window: sliding, ..SimOptions::default() }).unwrap();
        for s in &p.compute {
            ensure!(t.stage_busy_ms(&s.name) == t.n_outputs as f64 * s.latency_ms, "profile {i}: {} busy", s.name);
        }
        ensure!(
            t.stage_busy_ms("acquisition") == n as f64 * (p.modulation_settle_ms + p.exposure_ms),
            "profile {i}: acquisition busy"
        );
        ensure!(t.stage_busy_ms("readout") == n as f64 * p.readout_ms, "profile {i}: readout busy");
        let fpo = if sliding { 1.0 } else { 4.0 };
        let bottleneck = p
            .compute
            .iter()
            .map(|s| s.latency_ms)
            .fold(fpo * (p.modulation_settle_ms + p.exposure_ms).max(p.readout_ms), f64::max);
        ensure!(
            t.steady_state_period_ms == bottleneck,
            "profile {i}: period {} vs {bottleneck}",
            t.steady_state_period_ms
        );
    }
    Ok("80 ms, 200 ms with slow inference, 100 random profiles conserve work".into())
}

fn determinism() -> Outcome {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    common::end_to_end(a.path(), &["--seed", "3"]);
    common::end_to_end(b.path(), &["--seed", "3", "--jobs", "1"]);
    let inv = common::inventory(a.path());
    ensure!(inv == common::expected_inventory(), "inventory {inv:?}");
    let (ha, hb) = (common::tree_hash(a.path()), common::tree_hash(b.path()));
    ensure!(ha == hb, "tree hashes differ: {ha} vs {hb}");
    Ok(format!("{} files, tree hash {}", inv.len(), &ha[..16]))
}

fn main() -> ExitCode {
    let checks: [Check; 11] = [
        ("bead_peak_phase", bead_peak),
        ("reconstruction_round_trip", round_trip),
        ("network_parameter_count", parameter_count),
        ("layer_and_network_oracles", layer_oracles),
        ("zero_network_identity", zero_net_identity),
        ("segmentation_and_watershed", segmentation),
        ("dry_mass_and_agreement", dry_mass_checks),
        ("growth_fits_and_normalization", growth),
        ("plate_planner", planner),
        ("pipeline_timing", pipeline),
        ("end_to_end_determinism", determinism),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panic: {}", msg.unwrap_or_default()))
        });
        match result {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", checks.len() - failed, checks.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
