// SPDX-License-Identifier: Apache-2.0

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use pics_core::platescan::{plan_acquisition, PlanConfig};
use pics_core::rtpipeline::{simulate as run_simulation, throughput_report, ResourceModel, SimOptions, StageProfile};
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::util::{ensure_parent, positive_f64, sibling, write_echo, write_json};

#[derive(Args, Serialize)]
pub struct PlanArgs {
    /// Plate configuration (TOML key = value with [[well]], [[channel]],
    /// [[focus_point]] tables).
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn plan(a: &PlanArgs, seed: u64) -> CliResult {
    let config = PlanConfig::from_toml(&fs::read_to_string(&a.config)?)?;
    let plan = plan_acquisition(&config)?;
    ensure_parent(&a.out)?;
    let mut w = BufWriter::new(File::create(&a.out)?);
    plan.write_ndjson(&mut w)?;
    drop(w);
    fs::write(sibling(&a.out, ".resolved.toml"), config.to_toml())?;
    write_echo(&sibling(&a.out, ".config.json"), "plan", seed, a)?;
    println!(
        "{} events per pass, {} phase images per pass, {} phase images over {} timepoints, {} frames",
        plan.events.len(),
        plan.phase_images_per_pass(),
        plan.phase_images_total(),
        config.timepoints,
        plan.frames_total()
    );
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Glim,
    Slim,
}

#[derive(Args, Serialize)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value = "glim")]
    pub profile: Profile,
    /// Stain channels inferred per phase image.
    #[arg(long, default_value_t = 1)]
    pub channels: usize,
    #[arg(long, default_value_t = 100)]
    pub frames: usize,
    /// Reconstruct once per four frames instead of every frame.
    #[arg(long)]
    pub no_sliding: bool,
    /// Run all compute stages on one resource.
    #[arg(long)]
    pub shared_compute: bool,
    /// Readout blocks the next modulation.
    #[arg(long)]
    pub serial_readout: bool,
    /// Override the inference stage latency, ms.
    #[arg(long, value_parser = positive_f64)]
    pub inference_ms: Option<f64>,
    /// Fluorescence exposure budget per usable image, ms.
    #[arg(long, default_value_t = 1000.0, value_parser = positive_f64)]
    pub baseline_ms: f64,
    /// Timeline CSV.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn simulate(a: &SimulateArgs, seed: u64) -> CliResult {
    let mut profile = match a.profile {
        Profile::Glim => StageProfile::glim(a.channels),
        Profile::Slim => StageProfile::slim(a.channels),
    };
    if let Some(ms) = a.inference_ms {
        profile
            .stage_mut("inference")
            .ok_or_else(|| CliError::new("rtpipeline", "no inference stage with --channels 0"))?
            .latency_ms = ms;
    }
    let opts = SimOptions {
        sliding_window: !a.no_sliding,
        resources: if a.shared_compute { ResourceModel::SharedCompute } else { ResourceModel::PerStage },
        serial_readout: a.serial_readout,
    };
    let timeline = run_simulation(&profile, a.frames, opts)?;
    let report = throughput_report(&timeline, a.baseline_ms);
    ensure_parent(&a.out)?;
    timeline.write_csv(BufWriter::new(File::create(&a.out)?))?;
    write_json(&sibling(&a.out, ".report.json"), &report)?;
    write_echo(&sibling(&a.out, ".config.json"), "simulate-pipeline", seed, a)?;
    println!("period_ms {}", report.period_ms);
    println!("measured_period_ms {}", timeline.steady_state_period_ms);
    println!("phase_images_per_s {}", report.phase_images_per_s);
    println!("latency_ms {}", report.latency_ms);
    for (name, u) in &report.utilization {
        println!("utilization {name} {u:.4}");
    }
    println!("speedup_headline {}", report.speedup_headline);
    println!("speedup_strict {}", report.speedup_strict);
    println!("network_tuning_s {}", report.network_tuning_s);
    Ok(())
}
