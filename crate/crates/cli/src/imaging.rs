// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use pics_core::imagecore::{load_raster, save_raster};
use pics_core::qpi::{integrate_hilbert, retrieve_gradient, FrameSet, IntegrationMode};
use pics_core::stain::{infer_stain, load_weights, InferParams};
use pics_core::{ChannelTag, NetSpec, PhaseImage, UNet};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::util::{ensure_parent, finite_f64, positive_f32, positive_f64, sibling, write_echo, write_json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReconMode {
    Sgn,
    Wiener,
}

#[derive(Args, Serialize)]
pub struct ReconstructArgs {
    /// Four PICSR1 frames in modulation order, or one glob matching four.
    #[arg(long, num_args = 1..=4, required = true)]
    pub frames: Vec<String>,
    /// DIC shear in µm (default: from the frames).
    #[arg(long, value_parser = positive_f32)]
    pub shear: Option<f32>,
    #[arg(long, value_enum, default_value = "sgn")]
    pub mode: ReconMode,
    /// Wiener regularization in rad/µm (default: 1e-3 of Nyquist).
    #[arg(long, value_parser = positive_f64)]
    pub lreg: Option<f64>,
    /// Modulator offset of the first frame, rad.
    #[arg(long, default_value_t = 0.0, value_parser = finite_f64, allow_negative_numbers = true)]
    pub eps0: f64,
    #[arg(long)]
    pub out: PathBuf,
}

fn resolve_frames(spec: &[String]) -> CliResult<Vec<PathBuf>> {
    let paths: Vec<PathBuf> = if spec.len() == 1 {
        let mut v = Vec::new();
        for entry in glob::glob(&spec[0])? {
            v.push(entry.map_err(|e| CliError::new("io", e.to_string()))?);
        }
        v.sort();
        v
    } else {
        spec.iter().map(PathBuf::from).collect()
    };
    if paths.len() != 4 {
        return Err(CliError::new("qpi_recon", format!("expected 4 frames, found {}", paths.len())));
    }
    Ok(paths)
}

#[derive(Serialize)]
struct ReconSidecar {
    frames: Vec<String>,
    width: usize,
    height: usize,
    pixel_size_um: f32,
    wavelength_um: f32,
    shear_um: f32,
    eps0: f64,
    mode: ReconMode,
    l_reg: Option<f64>,
    modulated_pixels: usize,
}

pub fn reconstruct(a: &ReconstructArgs, seed: u64) -> CliResult {
    let paths = resolve_frames(&a.frames)?;
    let mut loaded = Vec::with_capacity(4);
    for p in &paths {
        loaded.push(load_raster(p)?);
    }
    let mut meta = loaded[0].1.with_channel(ChannelTag::Phase);
    if let Some(s) = a.shear {
        meta.shear = s;
    }
    let pixel = loaded[0].0.pixel_size();
    let mut it = loaded.into_iter().map(|(r, _)| r);
    let frames = [(); 4].map(|_| it.next().expect("four frames"));
    let offsets = [0, 1, 2, 3].map(|n| a.eps0 + n as f64 * FRAC_PI_2);
    let fs = FrameSet::new(frames, offsets, meta)?;
    let grad = retrieve_gradient(&fs);
    let (mode, l_reg) = match a.mode {
        ReconMode::Sgn => (IntegrationMode::Sgn, None),
        ReconMode::Wiener => {
            let m = a.lreg.map_or(IntegrationMode::wiener_default(pixel), |l| IntegrationMode::Wiener { l_reg: l });
            let IntegrationMode::Wiener { l_reg } = m else { unreachable!() };
            (m, Some(l_reg))
        }
    };
    let phase = integrate_hilbert(&grad, mode)?;
    ensure_parent(&a.out)?;
    save_raster(&phase.raster, &phase.meta, &a.out)?;
    let sidecar = ReconSidecar {
        frames: paths.iter().map(|p| p.display().to_string()).collect(),
        width: phase.raster.width(),
        height: phase.raster.height(),
        pixel_size_um: pixel,
        wavelength_um: meta.wavelength,
        shear_um: meta.shear,
        eps0: a.eps0,
        mode: a.mode,
        l_reg,
        modulated_pixels: grad.quality.count(),
    };
    write_json(&sibling(&a.out, ".json"), &sidecar)?;
    write_echo(&sibling(&a.out, ".config.json"), "reconstruct", seed, a)
}

#[derive(Args, Serialize)]
pub struct InferArgs {
    #[arg(long)]
    pub phase: PathBuf,
    /// PICSW1 weights; repeat for multiplexed stains (run sequentially).
    #[arg(long, required = true)]
    pub weights: Vec<PathBuf>,
    /// One output per weights file.
    #[arg(long, required = true)]
    pub out: Vec<PathBuf>,
    /// Stain channel per weights file (default dapi, then dii).
    #[arg(long)]
    pub channel: Vec<ChannelTag>,
    #[arg(long, value_parser = finite_f64, allow_negative_numbers = true)]
    pub rho_min: f64,
    #[arg(long, value_parser = finite_f64, allow_negative_numbers = true)]
    pub rho_max: f64,
    /// Pixel pitch the weights were trained at, µm.
    #[arg(long, value_parser = positive_f32)]
    pub network_pixel_size: Option<f32>,
    /// Network architecture as JSON (default architecture otherwise).
    #[arg(long)]
    pub netspec: Option<PathBuf>,
}

pub fn load_netspec(path: Option<&Path>) -> CliResult<NetSpec> {
    match path {
        None => Ok(NetSpec::default()),
        Some(p) => {
            serde_json::from_str(&fs::read_to_string(p)?).map_err(|e| CliError::new("stain_infer", e.to_string()))
        }
    }
}

pub fn load_net(path: &Path, spec: &NetSpec) -> CliResult<UNet<f32>> {
    Ok(UNet::new(spec.clone(), load_weights(path)?)?)
}

pub fn check_range(rho_min: f64, rho_max: f64) -> CliResult {
    if rho_max > rho_min {
        Ok(())
    } else {
        Err(CliError::new("stain_infer", format!("rho_max {rho_max} must exceed rho_min {rho_min}")))
    }
}

pub fn infer(a: &InferArgs, seed: u64) -> CliResult {
    check_range(a.rho_min, a.rho_max)?;
    if a.out.len() != a.weights.len() {
        return Err(CliError::usage(format!("{} weights files but {} outputs", a.weights.len(), a.out.len())));
    }
    if !a.channel.is_empty() && a.channel.len() != a.weights.len() {
        return Err(CliError::usage(format!("{} weights files but {} channels", a.weights.len(), a.channel.len())));
    }
    let spec = load_netspec(a.netspec.as_deref())?;
    let (raster, meta) = load_raster(&a.phase)?;
    let phase = PhaseImage::new(raster, meta);
    let defaults = [ChannelTag::Dapi, ChannelTag::Dii];
    for (k, (w, out)) in a.weights.iter().zip(&a.out).enumerate() {
        let channel = a.channel.get(k).copied().unwrap_or(defaults[k.min(1)]);
        let net = load_net(w, &spec)?;
        let params =
            InferParams { network_pixel_size: a.network_pixel_size, channel, ..InferParams::new(a.rho_min, a.rho_max) };
        let stain = infer_stain(&phase, &net, &params)?;
        ensure_parent(out)?;
        save_raster(&stain.raster, &meta.with_channel(channel), out)?;
        write_echo(&sibling(out, ".config.json"), "infer", seed, a)?;
    }
    Ok(())
}
