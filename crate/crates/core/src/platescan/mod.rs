// SPDX-License-Identifier: Apache-2.0

//! Multiwell mosaic planning: focus surfaces, event lists and in-focus
//! slice selection.

mod focus;
mod haar;
mod plan;

pub use focus::{focus_surface, FocusPoint, FocusSurface};
pub use haar::{haar_focus_metric, select_in_focus};
pub use plan::{
    plan_acquisition, stage_travel, ChannelConfig, ChannelKind, Event, PlanConfig, ScanPlan, TileOrder, WellConfig,
    ZConfig,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error("focus point {index} has non-finite coordinates")]
    NonFinitePoint { index: usize },
    #[error("focus points {first} and {second} share the same (x, y)")]
    DuplicatePoint { first: usize, second: usize },
    #[error("degenerate triangulation: need at least 3 non-collinear focus points, got {0} points")]
    Degenerate(usize),
    #[error("invalid plan config: {0}")]
    Config(String),
    #[error("well {well:?}: tile pitch {pitch} µm exceeds the {fov} µm field of view")]
    TilePitchTooLarge { well: String, pitch: f64, fov: f64 },
    #[error("stack has {len} slices, cannot select {k}")]
    StackTooShort { len: usize, k: usize },
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}
