// SPDX-License-Identifier: Apache-2.0

use std::fs::File;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use pics_core::evalkit::{evaluate_pairs, read_manifest, CorrelationMode, EvalError, EvalMode, EvalReport, Split};
use pics_core::stain::{infer_stain, InferParams};
use serde::Serialize;

use crate::error::CliResult;
use crate::imaging::{check_range, load_net, load_netspec};
use crate::util::{finite_f64, positive_f32, sibling, write_echo, write_json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Pearson,
    Mass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitArg {
    Train,
    Validation,
    Test,
}

#[derive(Args, Serialize)]
pub struct EvaluateArgs {
    /// Manifest CSV: phase_path, stain_path, fov, z, split. Paths are
    /// relative to the manifest.
    #[arg(long)]
    pub pairs: PathBuf,
    #[arg(long, value_enum, default_value = "pearson")]
    pub mode: ModeArg,
    #[arg(long)]
    pub weights: PathBuf,
    #[arg(long, value_parser = finite_f64, allow_negative_numbers = true)]
    pub rho_min: f64,
    #[arg(long, value_parser = finite_f64, allow_negative_numbers = true)]
    pub rho_max: f64,
    #[arg(long, value_parser = positive_f32)]
    pub network_pixel_size: Option<f32>,
    #[arg(long)]
    pub netspec: Option<PathBuf>,
    /// Only score this split.
    #[arg(long, value_enum)]
    pub split: Option<SplitArg>,
    /// Min-max scale each image before pooling correlations.
    #[arg(long)]
    pub normalized: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Serialize)]
struct Output<'a> {
    split: Option<SplitArg>,
    correlation: CorrelationMode,
    #[serde(flatten)]
    report: &'a EvalReport,
}

pub fn evaluate(a: &EvaluateArgs, seed: u64) -> CliResult {
    check_range(a.rho_min, a.rho_max)?;
    let set = read_manifest(File::open(&a.pairs)?)?;
    let set = match a.split {
        None => set,
        Some(SplitArg::Train) => set.split(Split::Train),
        Some(SplitArg::Validation) => set.split(Split::Validation),
        Some(SplitArg::Test) => set.split(Split::Test),
    };
    let spec = load_netspec(a.netspec.as_deref())?;
    let net = load_net(&a.weights, &spec)?;
    let params = InferParams { network_pixel_size: a.network_pixel_size, ..InferParams::new(a.rho_min, a.rho_max) };
    let base = a.pairs.parent().unwrap_or(Path::new(""));
    let mode = match a.mode {
        ModeArg::Pearson => EvalMode::Pearson,
        ModeArg::Mass => EvalMode::Mass,
    };
    let correlation = if a.normalized { CorrelationMode::Normalized } else { CorrelationMode::Raw };
    let report = evaluate_pairs(set.records(), base, mode, correlation, |phase| {
        infer_stain(phase, &net, &params).map_err(EvalError::from)
    })?;
    write_json(&a.out, &Output { split: a.split, correlation, report: &report })?;
    write_echo(&sibling(&a.out, ".config.json"), "evaluate", seed, a)?;
    if let Some(r) = report.pooled_pearson {
        println!("pooled_pearson {r}");
    }
    if let Some(m) = report.mean_per_image {
        println!("mean_per_image {m}");
    }
    Ok(())
}
