// SPDX-License-Identifier: Apache-2.0

//! `pics`: phase reconstruction, digital staining, segmentation, growth
//! analytics, acquisition planning, pipeline timing and evaluation.

mod error;
mod evaluate;
mod imaging;
mod phantom;
mod planning;
mod segment;
mod util;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use error::{CliError, CliResult};

pub const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (formats: PICSR1, PICSW1)");

#[derive(Parser)]
#[command(name = "pics", version = VERSION, about, arg_required_else_help = true)]
struct Cli {
    /// Seed for every random draw of the run.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Four GLIM frames to a phase image.
    Reconstruct(imaging::ReconstructArgs),
    /// Digital stain from a phase image.
    Infer(imaging::InferArgs),
    /// Compartment masks, nuclei instances and dry mass.
    Segment(segment::SegmentArgs),
    /// Normalized curves, doubling times and NCR from mass tables.
    Growth(segment::GrowthArgs),
    /// Plate acquisition plan as NDJSON.
    Plan(planning::PlanArgs),
    /// Discrete-event timing of the acquisition/compute pipeline.
    SimulatePipeline(planning::SimulateArgs),
    /// Score predicted stains against a pair manifest.
    Evaluate(evaluate::EvaluateArgs),
    /// Synthetic inputs: bead or cell phase, GLIM frames, stains, weights.
    Phantom(phantom::PhantomArgs),
}

fn run(cli: Cli) -> CliResult {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::usage("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global().map_err(|e| CliError::usage(e.to_string()))?;
    }
    let seed = cli.seed;
    match cli.command {
        Command::Reconstruct(a) => imaging::reconstruct(&a, seed),
        Command::Infer(a) => imaging::infer(&a, seed),
        Command::Segment(a) => segment::segment(&a, seed),
        Command::Growth(a) => segment::growth(&a, seed),
        Command::Plan(a) => planning::plan(&a, seed),
        Command::SimulatePipeline(a) => planning::simulate(&a, seed),
        Command::Evaluate(a) => evaluate::evaluate(&a, seed),
        Command::Phantom(a) => phantom::phantom(&a, seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pics: error {e}");
            ExitCode::from(1)
        }
    }
}
