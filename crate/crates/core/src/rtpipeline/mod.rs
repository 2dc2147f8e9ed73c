// SPDX-License-Identifier: Apache-2.0

//! Discrete-event model of the staged acquisition and reconstruction
//! pipeline.
//!
//! Frames flow through an acquisition resource (modulation settle plus
//! exposure), a readout resource, and one resource per compute stage. Each
//! resource serves jobs first-in first-out.

use std::io::Write;

use serde::Serialize;
use thiserror::Error;

/// One-time network tuning cost reported alongside throughput.
pub const NETWORK_TUNING_S: f64 = 30.0;

/// Per-channel inference latency in ms.
pub const INFERENCE_MS_PER_CHANNEL: f64 = 65.0;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("need at least 4 frames, got {0}")]
    TooFewFrames(usize),
    #[error("without a sliding window the frame count must be a multiple of 4, got {0}")]
    FramesNotMultipleOfFour(usize),
    #[error("stage {stage:?} latency {latency} ms must be positive and finite")]
    InvalidLatency { stage: String, latency: f64 },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stage {
    pub name: String,
    pub latency_ms: f64,
}

impl Stage {
    pub fn new(name: &str, latency_ms: f64) -> Self {
        Self { name: name.to_string(), latency_ms }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageProfile {
    pub modulation_settle_ms: f64,
    pub exposure_ms: f64,
    pub readout_ms: f64,
    /// Compute chain applied to every phase image, in order.
    pub compute: Vec<Stage>,
}

impl StageProfile {
    fn with_chain(settle: f64, second: Stage, channels: usize) -> Self {
        let mut compute = vec![Stage::new("phase_retrieval", 2.0), second];
        if channels > 0 {
            compute.push(Stage::new("inference", INFERENCE_MS_PER_CHANNEL * channels as f64));
        }
        compute.push(Stage::new("render", 6.0));
        Self { modulation_settle_ms: settle, exposure_ms: 10.0, readout_ms: 10.0, compute }
    }

    pub fn glim(inference_channels: usize) -> Self {
        Self::with_chain(70.0, Stage::new("integration", 6.0), inference_channels)
    }

    pub fn slim(inference_channels: usize) -> Self {
        Self::with_chain(20.0, Stage::new("halo_removal", 25.0), inference_channels)
    }

    pub fn stage_mut(&mut self, name: &str) -> Option<&mut Stage> {
        self.compute.iter_mut().find(|s| s.name == name)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let fixed = [
            ("modulation_settle", self.modulation_settle_ms),
            ("exposure", self.exposure_ms),
            ("readout", self.readout_ms),
        ];
        for (stage, latency) in fixed.into_iter().chain(self.compute.iter().map(|s| (s.name.as_str(), s.latency_ms))) {
            if !(latency > 0.0 && latency.is_finite()) {
                return Err(PipelineError::InvalidLatency { stage: stage.to_string(), latency });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ResourceModel {
    /// Every compute stage is its own resource.
    #[default]
    PerStage,
    /// One compute resource runs the whole chain per image.
    SharedCompute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimOptions {
    /// Emit a phase image for every new frame from the latest four.
    pub sliding_window: bool,
    pub resources: ResourceModel,
    /// Readout occupies the acquisition resource instead of overlapping the
    /// next frame's modulation.
    pub serial_readout: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self { sliding_window: true, resources: ResourceModel::PerStage, serial_readout: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimelineEvent {
    pub stage: String,
    /// Frame index for acquisition and readout, phase-image index otherwise.
    pub frame: usize,
    pub resource: usize,
    pub start_ms: f64,
    pub end_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Timeline {
    pub events: Vec<TimelineEvent>,
    pub n_frames: usize,
    pub n_outputs: usize,
    /// Names of the resources, indexed by `TimelineEvent::resource`.
    pub resources: Vec<String>,
    /// Busy time each resource spends per phase image.
    pub busy_per_output_ms: Vec<f64>,
    /// Spacing of the last phase-image completions.
    pub steady_state_period_ms: f64,
    /// First frame's acquisition start to its phase image's render end.
    pub latency_per_phase_image_ms: f64,
    /// Completion time of each phase image.
    pub output_times_ms: Vec<f64>,
}

impl Timeline {
    /// `max` over resources of busy time per phase image.
    pub fn bottleneck_period_ms(&self) -> f64 {
        self.busy_per_output_ms.iter().copied().fold(0.0, f64::max)
    }

    pub fn stage_busy_ms(&self, stage: &str) -> f64 {
        self.events.iter().filter(|e| e.stage == stage).map(|e| e.end_ms - e.start_ms).sum()
    }

    pub fn write_csv(&self, out: impl Write) -> Result<(), PipelineError> {
        let mut wr = csv::Writer::from_writer(out);
        wr.write_record(["stage", "frame", "start_ms", "end_ms"])?;
        for e in &self.events {
            wr.write_record([e.stage.clone(), e.frame.to_string(), e.start_ms.to_string(), e.end_ms.to_string()])?;
        }
        wr.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

struct Resource {
    free_at: f64,
}

impl Resource {
    fn run(&mut self, ready: f64, duration: f64) -> (f64, f64) {
        let start = ready.max(self.free_at);
        self.free_at = start + duration;
        (start, self.free_at)
    }
}

pub fn simulate(profile: &StageProfile, n_frames: usize, opts: SimOptions) -> Result<Timeline, PipelineError> {
    profile.validate()?;
    if n_frames < 4 {
        return Err(PipelineError::TooFewFrames(n_frames));
    }
    if !opts.sliding_window && !n_frames.is_multiple_of(4) {
        return Err(PipelineError::FramesNotMultipleOfFour(n_frames));
    }
    let acquire_ms = profile.modulation_settle_ms + profile.exposure_ms;

    let mut names = vec!["acquisition".to_string()];
    if !opts.serial_readout {
        names.push("readout".into());
    }
    let compute_base = names.len();
    match opts.resources {
        ResourceModel::PerStage => names.extend(profile.compute.iter().map(|s| s.name.clone())),
        ResourceModel::SharedCompute => names.push("compute".into()),
    }
    let mut res: Vec<Resource> = names.iter().map(|_| Resource { free_at: 0.0 }).collect();
    let mut events = Vec::new();

    // frames
    let mut frame_ready = Vec::with_capacity(n_frames);
    for f in 0..n_frames {
        let (s, e) = res[0].run(0.0, acquire_ms);
        events.push(TimelineEvent { stage: "acquisition".into(), frame: f, resource: 0, start_ms: s, end_ms: e });
        let (rr, ri) = if opts.serial_readout { (0, 0) } else { (1, 1) };
        let (s, e) = res[rr].run(e, profile.readout_ms);
        events.push(TimelineEvent { stage: "readout".into(), frame: f, resource: ri, start_ms: s, end_ms: e });
        frame_ready.push(e);
    }

    // phase images: (index, last frame it needs, first frame)
    let outputs: Vec<(usize, usize)> = if opts.sliding_window {
        (3..n_frames).map(|last| (last - 3, last)).collect()
    } else {
        (0..n_frames / 4).map(|k| (4 * k, 4 * k + 3)).collect()
    };
    let mut output_times = Vec::with_capacity(outputs.len());
    let mut first_latency = None;
    for (j, &(first, last)) in outputs.iter().enumerate() {
        let mut t = frame_ready[last];
        for (k, stage) in profile.compute.iter().enumerate() {
            let r = match opts.resources {
                ResourceModel::PerStage => compute_base + k,
                ResourceModel::SharedCompute => compute_base,
            };
            let (s, e) = res[r].run(t, stage.latency_ms);
            events.push(TimelineEvent { stage: stage.name.clone(), frame: j, resource: r, start_ms: s, end_ms: e });
            t = e;
        }
        output_times.push(t);
        if first_latency.is_none() {
            let start =
                events.iter().find(|e| e.stage == "acquisition" && e.frame == first).map_or(0.0, |e| e.start_ms);
            first_latency = Some(t - start);
        }
    }

    let frames_per_output = if opts.sliding_window { 1.0 } else { 4.0 };
    let mut busy = vec![0.0; names.len()];
    busy[0] = frames_per_output * (acquire_ms + if opts.serial_readout { profile.readout_ms } else { 0.0 });
    if !opts.serial_readout {
        busy[1] = frames_per_output * profile.readout_ms;
    }
    for (k, stage) in profile.compute.iter().enumerate() {
        match opts.resources {
            ResourceModel::PerStage => busy[compute_base + k] = stage.latency_ms,
            ResourceModel::SharedCompute => busy[compute_base] += stage.latency_ms,
        }
    }

    let n = output_times.len();
    let steady = if n >= 2 {
        let m = (n / 2).max(1);
        (output_times[n - 1] - output_times[n - 1 - m]) / m as f64
    } else {
        busy.iter().copied().fold(0.0, f64::max)
    };
    Ok(Timeline {
        events,
        n_frames,
        n_outputs: n,
        resources: names,
        busy_per_output_ms: busy,
        steady_state_period_ms: steady,
        latency_per_phase_image_ms: first_latency.unwrap_or(0.0),
        output_times_ms: output_times,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThroughputReport {
    pub period_ms: f64,
    pub phase_images_per_s: f64,
    pub latency_ms: f64,
    /// Busy fraction per resource in steady state.
    pub utilization: Vec<(String, f64)>,
    pub baseline_ms: f64,
    /// `baseline / period`.
    pub speedup_headline: f64,
    /// `(baseline + acquisition period) / period`: the reference modality
    /// still needs the phase acquisition.
    pub speedup_strict: f64,
    pub network_tuning_s: f64,
}

pub fn throughput_report(t: &Timeline, baseline_ms: f64) -> ThroughputReport {
    let period = t.bottleneck_period_ms();
    let utilization = t.resources.iter().cloned().zip(t.busy_per_output_ms.iter().map(|b| b / period)).collect();
    ThroughputReport {
        period_ms: period,
        phase_images_per_s: 1000.0 / period,
        latency_ms: t.latency_per_phase_image_ms,
        utilization,
        baseline_ms,
        speedup_headline: baseline_ms / period,
        speedup_strict: (baseline_ms + t.busy_per_output_ms[0]) / period,
        network_tuning_s: NETWORK_TUNING_S,
    }
}
