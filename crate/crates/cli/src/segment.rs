// SPDX-License-Identifier: Apache-2.0

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use pics_core::growth::{
    confluence, doubling_time, median_across_fovs, ncr, normalize_series, normalized_total, read_mass_table,
    write_mass_table, Doubling, MassRecord, MassSeries, MedianMode, Quantity, DEFAULT_WINDOW,
};
use pics_core::imagecore::{load_raster, write_pgm16, write_pgm8};
use pics_core::specificity::{
    binarize, compose_semantic, dry_mass, subtract_background, threshold_with, watershed_instances, BinaryMask,
    Compartment, ThresholdRule, DEFAULT_BINS, DEFAULT_GAMMA, DEFAULT_H,
};
use pics_core::{ChannelTag, PhaseImage, StainMap};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::util::{ensure_parent, finite_f64, positive_f64, write_echo};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleArg {
    Inflection,
    Chord,
}

impl From<RuleArg> for ThresholdRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Inflection => ThresholdRule::Inflection,
            RuleArg::Chord => ThresholdRule::Chord,
        }
    }
}

#[derive(Args, Serialize)]
pub struct SegmentArgs {
    /// Nuclear stain (PICSR1).
    #[arg(long)]
    pub dapi: PathBuf,
    /// Membrane stain (PICSR1).
    #[arg(long)]
    pub dii: PathBuf,
    #[arg(long)]
    pub phase: PathBuf,
    #[arg(long)]
    pub out_prefix: String,
    #[arg(long, default_value = "0")]
    pub fov: String,
    /// Time in hours (default: phase timestamp).
    #[arg(long, value_parser = finite_f64)]
    pub t: Option<f64>,
    /// Refraction increment, µm³/pg.
    #[arg(long, default_value_t = DEFAULT_GAMMA, value_parser = positive_f64)]
    pub gamma: f64,
    /// h-maxima depth for nuclei seeds, px.
    #[arg(long, default_value_t = DEFAULT_H, value_parser = positive_f64)]
    pub h: f64,
    #[arg(long, value_enum, default_value = "inflection")]
    pub rule: RuleArg,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    /// Subtract the mean phase outside the cells before integrating mass.
    #[arg(long)]
    pub subtract_background: bool,
}

fn load_stain(path: &PathBuf, channel: ChannelTag) -> CliResult<StainMap<f32>> {
    let (r, _) = load_raster(path)?;
    Ok(StainMap::new(r, channel))
}

pub fn segment(a: &SegmentArgs, seed: u64) -> CliResult {
    let (raster, meta) = load_raster(&a.phase)?;
    let mut phase = PhaseImage::new(raster, meta);
    let rule = ThresholdRule::from(a.rule);
    let dapi = load_stain(&a.dapi, ChannelTag::Dapi)?;
    let dii = load_stain(&a.dii, ChannelTag::Dii)?;
    let dapi_mask = binarize(&dapi, threshold_with(&dapi, a.bins, rule)?)?;
    let dii_mask = binarize(&dii, threshold_with(&dii, a.bins, rule)?)?;
    let semantic = compose_semantic(&dapi_mask, &dii_mask)?;
    let cells = BinaryMask::new(dapi_mask.mask.or(&dii_mask.mask)?, ChannelTag::Dii);
    if a.subtract_background {
        phase = subtract_background(&phase, &cells)?;
    }
    let nucleus = BinaryMask::new(semantic.compartment(Compartment::Nucleus), ChannelTag::Dapi);
    let cytoplasm = BinaryMask::new(semantic.compartment(Compartment::Cytoplasm), ChannelTag::Dii);
    let instances = watershed_instances(&dapi_mask, a.h);
    let area = phase.raster.pixel_area();
    let record = MassRecord {
        t: a.t.unwrap_or(meta.timestamp / 3600.0),
        fov: a.fov.clone(),
        nucleus_mass: dry_mass(&phase, &nucleus, a.gamma)?,
        cytoplasm_mass: dry_mass(&phase, &cytoplasm, a.gamma)?,
        nucleus_area: nucleus.mask.count() as f64 * area,
        cytoplasm_area: cytoplasm.mask.count() as f64 * area,
        confluence: Some(confluence(&cells)),
    };

    let (w, h) = (semantic.width(), semantic.height());
    let sem_path = PathBuf::from(format!("{}_semantic.pgm", a.out_prefix));
    ensure_parent(&sem_path)?;
    write_pgm8(&sem_path, w, h, &semantic.to_grey())?;
    let labels: Vec<u16> = instances
        .labels()
        .iter()
        .map(|&l| {
            u16::try_from(l).map_err(|_| {
                CliError::new("specificity", format!("{} instances exceed 16-bit labels", instances.count()))
            })
        })
        .collect::<Result<_, _>>()?;
    write_pgm16(format!("{}_instances.pgm", a.out_prefix), w, h, &labels)?;
    let series = MassSeries::new(vec![record])?;
    write_mass_table(&series, File::create(format!("{}_masses.csv", a.out_prefix))?)?;
    write_echo(&PathBuf::from(format!("{}_config.json", a.out_prefix)), "segment", seed, a)?;
    println!(
        "fov {} t {:.3} h: {} nuclei, nucleus {:.3} pg, cytoplasm {:.3} pg",
        a.fov,
        series.records()[0].t,
        instances.count(),
        series.records()[0].nucleus_mass,
        series.records()[0].cytoplasm_mass
    );
    Ok(())
}

#[derive(Args, Serialize)]
pub struct GrowthArgs {
    /// Mass tables; rows are merged before analysis.
    #[arg(long, required = true, num_args = 1..)]
    pub masses: Vec<PathBuf>,
    /// Baseline window for normalization, hours.
    #[arg(long, default_value_t = DEFAULT_WINDOW, value_parser = positive_f64)]
    pub window: f64,
    #[arg(long, value_parser = finite_f64, allow_negative_numbers = true)]
    pub t_min: Option<f64>,
    #[arg(long, value_parser = finite_f64, allow_negative_numbers = true)]
    pub t_max: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

fn csv_line(w: &mut impl Write, fields: &[String]) -> CliResult {
    writeln!(w, "{}", fields.join(","))?;
    Ok(())
}

pub fn growth(a: &GrowthArgs, seed: u64) -> CliResult {
    let mut records: Vec<MassRecord> = Vec::new();
    for p in &a.masses {
        records.extend(read_mass_table(File::open(p)?)?.records().iter().cloned());
    }
    records.sort_by(|x, y| x.fov.cmp(&y.fov).then(x.t.total_cmp(&y.t)));
    let series = MassSeries::new(records)?;
    let range = (a.t_min.unwrap_or(f64::NEG_INFINITY), a.t_max.unwrap_or(f64::INFINITY));
    fs::create_dir_all(&a.out)?;

    let normalized = normalize_series(&series, a.window)?;
    let totals = normalized_total(&series, a.window)?;
    let mut w = BufWriter::new(File::create(a.out.join("normalized.csv"))?);
    let names: Vec<String> = Quantity::ALL.iter().map(|q| q.name().to_string()).collect();
    csv_line(&mut w, &[vec!["fov".to_string(), "t".to_string()], names].concat())?;
    for (r, (_, _, total)) in normalized.records().iter().zip(&totals) {
        let mut row = vec![r.fov.clone(), r.t.to_string()];
        for q in Quantity::ALL {
            row.push(match q {
                Quantity::TotalMass => total.to_string(),
                _ => q.of(r).map_or(String::new(), |v| v.to_string()),
            });
        }
        csv_line(&mut w, &row)?;
    }
    w.flush()?;

    let median = median_across_fovs(&normalized, MedianMode::Level)?;
    let mut w = BufWriter::new(File::create(a.out.join("median.csv"))?);
    // compartment sums are not a normalized total
    let columns: Vec<_> = median.columns.iter().filter(|(q, _)| *q != Quantity::TotalMass).collect();
    let mut header = vec!["t".to_string()];
    header.extend(columns.iter().map(|(q, _)| q.name().to_string()));
    csv_line(&mut w, &header)?;
    for (i, t) in median.times.iter().enumerate() {
        let mut row = vec![t.to_string()];
        row.extend(columns.iter().map(|(_, v)| v[i].to_string()));
        csv_line(&mut w, &row)?;
    }
    w.flush()?;

    let mut w = BufWriter::new(File::create(a.out.join("doubling.csv"))?);
    csv_line(
        &mut w,
        &["fov", "quantity", "samples", "slope_log2_per_h", "doubling_h", "r_squared", "status"].map(String::from),
    )?;
    let masses = [Quantity::NucleusMass, Quantity::CytoplasmMass, Quantity::TotalMass];
    let mut scopes: Vec<(String, MassSeries)> = vec![("all".into(), series.clone())];
    for f in series.fovs() {
        scopes.push((f.to_string(), MassSeries::new(series.fov(f).to_vec())?));
    }
    for (scope, s) in &scopes {
        for q in masses {
            let row = match doubling_time(s, q, range) {
                Ok(fit) => {
                    let (td, status) = match fit.doubling {
                        Doubling::Hours(h) => (h.to_string(), "ok".to_string()),
                        Doubling::NoGrowth => (String::new(), "no_growth".to_string()),
                    };
                    [
                        scope.clone(),
                        q.name().into(),
                        fit.samples.to_string(),
                        fit.slope.to_string(),
                        td,
                        fit.r_squared.to_string(),
                        status,
                    ]
                }
                Err(e) => [
                    scope.clone(),
                    q.name().into(),
                    String::new(),
                    String::new(),
                    String::new(),
                    String::new(),
                    e.to_string().replace(',', ";"),
                ],
            };
            csv_line(&mut w, &row)?;
        }
    }
    w.flush()?;

    let trace = ncr(&series);
    let mut w = BufWriter::new(File::create(a.out.join("ncr.csv"))?);
    csv_line(&mut w, &["fov", "t", "ncr"].map(String::from))?;
    for (f, t, r) in &trace.points {
        csv_line(&mut w, &[f.clone(), t.to_string(), r.to_string()])?;
    }
    w.flush()?;
    if !trace.excluded.is_empty() {
        eprintln!("pics: {} samples with zero cytoplasm mass left out of ncr.csv", trace.excluded.len());
    }
    write_echo(&a.out.join("config.json"), "growth", seed, a)
}
