// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::{ArgGroup, Args, ValueEnum};
use pics_core::imagecore::save_raster;
use pics_core::qpi::{
    bead_peak_phase, cell_phantom, cell_stains, make_bead_phantom, random_cells, simulate_glim_frames, CellSpec,
    FieldGeometry,
};
use pics_core::stain::save_weights;
use pics_core::{ChannelTag, ImageMeta, PhaseImage, Raster, WeightStore};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::imaging::load_netspec;
use crate::util::{ensure_parent, finite_f64, positive_f32, positive_f64, sibling, write_echo};

const BN_EPSILON: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightsKind {
    /// All-zero convolutions: the residual net is the identity.
    Zero,
    /// Seeded He-uniform initialization.
    Random,
}

#[derive(Args, Serialize)]
#[command(group(ArgGroup::new("kind").required(true).args(["bead", "cell", "weights"])))]
pub struct PhantomArgs {
    /// Refractive sphere centred in the field.
    #[arg(long)]
    pub bead: bool,
    /// Randomly placed cells (seeded).
    #[arg(long)]
    pub cell: bool,
    /// Write a PICSW1 weight file instead of an image.
    #[arg(long, value_enum)]
    pub weights: Option<WeightsKind>,
    /// Phase image (PICSR1) or weight file.
    #[arg(long)]
    pub out: PathBuf,
    /// Also render the four GLIM frames as `<prefix>_<n>.picsr`.
    #[arg(long)]
    pub frames_prefix: Option<String>,
    /// Cell mode: also write `<prefix>_dapi.picsr` and `<prefix>_dii.picsr`.
    #[arg(long)]
    pub stains_prefix: Option<String>,
    #[arg(long, default_value_t = 512)]
    pub width: usize,
    #[arg(long, default_value_t = 512)]
    pub height: usize,
    /// µm per pixel.
    #[arg(long, default_value_t = 0.1, value_parser = positive_f32)]
    pub pixel_size: f32,
    /// µm.
    #[arg(long, default_value_t = 0.78, value_parser = positive_f32)]
    pub wavelength: f32,
    /// µm.
    #[arg(long, default_value_t = 0.1, value_parser = positive_f32)]
    pub shear: f32,
    /// Bead diameter, µm.
    #[arg(long, default_value_t = 3.0, value_parser = positive_f64)]
    pub diameter: f64,
    #[arg(long, default_value_t = 1.579, value_parser = positive_f64)]
    pub n_object: f64,
    #[arg(long, default_value_t = 1.518, value_parser = positive_f64)]
    pub n_media: f64,
    /// Number of cells.
    #[arg(long, default_value_t = 6)]
    pub cells: usize,
    /// Acquisition time, hours.
    #[arg(long, default_value_t = 0.0, value_parser = finite_f64)]
    pub t_hours: f64,
    /// Phase doubling time of the cells, hours (0 = static).
    #[arg(long, default_value_t = 0.0, value_parser = finite_f64)]
    pub doubling_hours: f64,
    /// Half-width of uniform stain noise.
    #[arg(long, default_value_t = 0.02, value_parser = finite_f64)]
    pub stain_noise: f64,
    /// Network architecture as JSON (weights mode).
    #[arg(long)]
    pub netspec: Option<PathBuf>,
}

fn write_frames(phase: &PhaseImage<f32>, prefix: &str) -> CliResult {
    let r = &phase.raster;
    let bg = Raster::filled(r.width(), r.height(), 1.0f32, r.pixel_size())?;
    let fs = simulate_glim_frames(phase, &bg, 0.0)?;
    for (n, f) in fs.frames().iter().enumerate() {
        let p = PathBuf::from(format!("{prefix}_{n}.picsr"));
        ensure_parent(&p)?;
        save_raster(f, &phase.meta, &p)?;
    }
    Ok(())
}

pub fn phantom(a: &PhantomArgs, seed: u64) -> CliResult {
    ensure_parent(&a.out)?;
    if let Some(kind) = a.weights {
        let spec = load_netspec(a.netspec.as_deref())?;
        let store: WeightStore<f32> = match kind {
            WeightsKind::Zero => WeightStore::zeros(&spec, BN_EPSILON)?,
            WeightsKind::Random => WeightStore::random(&spec, seed, BN_EPSILON)?,
        };
        save_weights(&store, &a.out)?;
        println!("{} parameters", store.parameter_count());
        return write_echo(&sibling(&a.out, ".config.json"), "phantom", seed, a);
    }
    let geometry = FieldGeometry::new(a.width, a.height, a.pixel_size);
    let mut meta = ImageMeta::phase(a.wavelength, a.shear);
    meta.timestamp = a.t_hours * 3600.0;
    let phase: PhaseImage<f32> = if a.bead {
        let p = make_bead_phantom(a.diameter, a.n_object, a.n_media, meta, geometry)?;
        let peak = bead_peak_phase(a.diameter, a.wavelength as f64, a.n_object, a.n_media);
        println!("bead peak phase {peak:.4} rad");
        p
    } else {
        let growth = if a.doubling_hours > 0.0 { (a.t_hours / a.doubling_hours).exp2() } else { 1.0 };
        let cells: Vec<CellSpec> = random_cells(geometry, a.cells, seed)
            .into_iter()
            .map(|c| CellSpec {
                cytoplasm_phase: c.cytoplasm_phase * growth,
                nucleus_phase: c.nucleus_phase * growth,
                ..c
            })
            .collect();
        if cells.len() < a.cells {
            return Err(CliError::new("qpi_recon", format!("only {} of {} cells fit the field", cells.len(), a.cells)));
        }
        if let Some(prefix) = &a.stains_prefix {
            let (dapi, dii) = cell_stains::<f32>(geometry, &cells, seed.wrapping_add(1), a.stain_noise)?;
            let p = PathBuf::from(format!("{prefix}_dapi.picsr"));
            ensure_parent(&p)?;
            save_raster(&dapi, &meta.with_channel(ChannelTag::Dapi), &p)?;
            save_raster(&dii, &meta.with_channel(ChannelTag::Dii), format!("{prefix}_dii.picsr"))?;
        }
        cell_phantom(geometry, meta, &cells)?
    };
    if a.stains_prefix.is_some() && !a.cell {
        return Err(CliError::usage("--stains-prefix needs --cell"));
    }
    save_raster(&phase.raster, &phase.meta, &a.out)?;
    if let Some(prefix) = &a.frames_prefix {
        write_frames(&phase, prefix)?;
    }
    write_echo(&sibling(&a.out, ".config.json"), "phantom", seed, a)
}
