// SPDX-License-Identifier: Apache-2.0

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use super::{focus_surface, FocusPoint, FocusSurface, PlanError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    /// Four modulation frames per image.
    Phase,
    /// One frame per image.
    Fluorescence,
}

impl ChannelKind {
    pub fn frames(self) -> usize {
        match self {
            ChannelKind::Phase => 4,
            ChannelKind::Fluorescence => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    pub name: String,
    pub kind: ChannelKind,
    pub exposure_ms: f64,
    #[serde(default)]
    pub stabilization_ms: f64,
}

/// Rectangular mosaic region in stage µm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WellConfig {
    pub name: String,
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZConfig {
    pub levels: usize,
    pub step: f64,
}

impl Default for ZConfig {
    fn default() -> Self {
        Self { levels: 1, step: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TileOrder {
    #[default]
    Serpentine,
    Raster,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    pub tile_rows: usize,
    pub tile_cols: usize,
    /// Camera field of view in µm.
    pub fov_width: f64,
    pub fov_height: f64,
    /// Passes over the plate; multiplies image totals, not the event list.
    #[serde(default = "one")]
    pub timepoints: usize,
    #[serde(default)]
    pub tile_order: TileOrder,
    /// Focus height used when no focus points are given.
    #[serde(default)]
    pub focus_z: f64,
    #[serde(default)]
    pub z: ZConfig,
    #[serde(rename = "channel")]
    pub channels: Vec<ChannelConfig>,
    #[serde(rename = "well")]
    pub wells: Vec<WellConfig>,
    #[serde(rename = "focus_point", default)]
    pub focus_points: Vec<FocusPoint>,
}

fn one() -> usize {
    1
}

impl PlanConfig {
    pub fn from_toml(text: &str) -> Result<Self, PlanError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("plan config serializes")
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        let bad = |m: String| Err(PlanError::Config(m));
        if self.tile_rows == 0 || self.tile_cols == 0 {
            return bad(format!("zero tiles ({}x{})", self.tile_rows, self.tile_cols));
        }
        if self.wells.is_empty() {
            return bad("no wells".into());
        }
        if self.channels.is_empty() {
            return bad("no channels".into());
        }
        if self.z.levels == 0 || !self.z.step.is_finite() {
            return bad("z needs at least one level and a finite step".into());
        }
        if self.timepoints == 0 {
            return bad("timepoints must be at least 1".into());
        }
        if !(self.fov_width > 0.0 && self.fov_height > 0.0 && self.focus_z.is_finite()) {
            return bad("field of view must be positive".into());
        }
        for c in &self.channels {
            if !(c.exposure_ms > 0.0
                && c.stabilization_ms >= 0.0
                && c.exposure_ms.is_finite()
                && c.stabilization_ms.is_finite())
            {
                return bad(format!("channel {:?}: exposure must be > 0 and stabilization >= 0", c.name));
            }
        }
        for w in &self.wells {
            let finite = [w.x, w.y, w.width, w.height].iter().all(|v| v.is_finite());
            if !(finite && w.width > 0.0 && w.height > 0.0) {
                return bad(format!("well {:?}: invalid geometry", w.name));
            }
            let (px, py) = (w.width / self.tile_cols as f64, w.height / self.tile_rows as f64);
            if px > self.fov_width {
                return Err(PlanError::TilePitchTooLarge { well: w.name.clone(), pitch: px, fov: self.fov_width });
            }
            if py > self.fov_height {
                return Err(PlanError::TilePitchTooLarge { well: w.name.clone(), pitch: py, fov: self.fov_height });
            }
        }
        Ok(())
    }

    pub fn frames_per_tile_level(&self) -> usize {
        self.channels.iter().map(|c| c.kind.frames()).sum()
    }

    pub fn expected_events(&self) -> usize {
        self.wells.len() * self.tile_rows * self.tile_cols * self.z.levels * self.frames_per_tile_level()
    }
}

/// One camera frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub well: String,
    /// Row-major grid index within the well.
    pub tile: usize,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub channel: String,
    pub pattern_index: usize,
    pub exposure: f64,
    pub stabilization: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanPlan {
    pub config: PlanConfig,
    pub events: Vec<Event>,
}

impl ScanPlan {
    /// Phase images in a single pass.
    pub fn phase_images_per_pass(&self) -> usize {
        let phase_channels = self.config.channels.iter().filter(|c| c.kind == ChannelKind::Phase).count();
        self.config.wells.len() * self.config.tile_rows * self.config.tile_cols * self.config.z.levels * phase_channels
    }

    pub fn phase_images_total(&self) -> usize {
        self.phase_images_per_pass() * self.config.timepoints
    }

    pub fn frames_total(&self) -> usize {
        self.events.len() * self.config.timepoints
    }

    /// One JSON object per line.
    pub fn write_ndjson(&self, mut out: impl Write) -> io::Result<()> {
        for e in &self.events {
            serde_json::to_writer(&mut out, e)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Tile visit order as `(row, col)`.
fn tile_sequence(rows: usize, cols: usize, order: TileOrder) -> Vec<(usize, usize)> {
    let mut v = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let c = if order == TileOrder::Serpentine && r % 2 == 1 { cols - 1 - c } else { c };
            v.push((r, c));
        }
    }
    v
}

/// Event list ordered well, tile, z level, channel, modulation frame.
pub fn plan_acquisition(config: &PlanConfig) -> Result<ScanPlan, PlanError> {
    config.validate()?;
    let surface: Option<FocusSurface> =
        if config.focus_points.is_empty() { None } else { Some(focus_surface(&config.focus_points)?) };
    let mut events = Vec::with_capacity(config.expected_events());
    let half = (config.z.levels - 1) as f64 / 2.0;
    for well in &config.wells {
        let (px, py) = (well.width / config.tile_cols as f64, well.height / config.tile_rows as f64);
        for (r, c) in tile_sequence(config.tile_rows, config.tile_cols, config.tile_order) {
            let x = well.x + (c as f64 + 0.5) * px;
            let y = well.y + (r as f64 + 0.5) * py;
            let focus = surface.as_ref().map_or(config.focus_z, |s| s.z_at(x, y));
            for level in 0..config.z.levels {
                let z = focus + (level as f64 - half) * config.z.step;
                for ch in &config.channels {
                    for pattern_index in 0..ch.kind.frames() {
                        events.push(Event {
                            well: well.name.clone(),
                            tile: r * config.tile_cols + c,
                            x,
                            y,
                            z,
                            channel: ch.name.clone(),
                            pattern_index,
                            exposure: ch.exposure_ms,
                            stabilization: ch.stabilization_ms,
                        });
                    }
                }
            }
        }
    }
    Ok(ScanPlan { config: config.clone(), events })
}

/// Summed lateral stage moves between consecutive events.
pub fn stage_travel(events: &[Event]) -> f64 {
    events.windows(2).map(|w| (w[1].x - w[0].x).hypot(w[1].y - w[0].y)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
tile_rows = 1
tile_cols = 1
fov_width = 300.0
fov_height = 300.0

[[channel]]
name = "glim"
kind = "phase"
exposure_ms = 10.0
stabilization_ms = 70.0

[[well]]
name = "A1"
x = 0.0
y = 0.0
width = 250.0
height = 250.0
"#;

    #[test]
    fn single_tile_phase_plan_has_four_frames() {
        let cfg = PlanConfig::from_toml(SMALL).unwrap();
        let plan = plan_acquisition(&cfg).unwrap();
        assert_eq!(plan.events.len(), 4);
        assert_eq!(plan.events.iter().map(|e| e.pattern_index).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        assert_eq!(plan.events[0].x, 125.0);
        assert_eq!(plan.phase_images_total(), 1);
    }

    #[test]
    fn config_errors() {
        assert!(PlanConfig::from_toml(&format!("{SMALL}\nbogus = 1\n")).is_err());
        let mut cfg = PlanConfig::from_toml(SMALL).unwrap();
        cfg.tile_rows = 0;
        assert!(matches!(plan_acquisition(&cfg), Err(PlanError::Config(_))));
        let mut cfg = PlanConfig::from_toml(SMALL).unwrap();
        cfg.wells[0].width = 400.0;
        assert!(matches!(plan_acquisition(&cfg), Err(PlanError::TilePitchTooLarge { .. })));
    }

    #[test]
    fn serpentine_sequence() {
        assert_eq!(tile_sequence(2, 3, TileOrder::Serpentine), vec![(0, 0), (0, 1), (0, 2), (1, 2), (1, 1), (1, 0)]);
        assert_eq!(tile_sequence(2, 2, TileOrder::Raster), vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
    }

    #[test]
    fn config_echo_round_trips() {
        let cfg = PlanConfig::from_toml(SMALL).unwrap();
        assert_eq!(PlanConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
    }
}
