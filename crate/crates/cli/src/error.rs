// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use pics_core::evalkit::EvalError;
use pics_core::growth::GrowthError;
use pics_core::platescan::PlanError;
use pics_core::qpi::ReconError;
use pics_core::rtpipeline::PipelineError;
use pics_core::specificity::SegError;
use pics_core::stain::StainError;
use pics_core::ImageError;

/// Domain failure tagged with the module that raised it.
#[derive(Debug)]
pub struct CliError {
    pub module: &'static str,
    pub message: String,
}

impl CliError {
    pub fn new(module: &'static str, message: impl Into<String>) -> Self {
        Self { module, message: message.into() }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new("cli", message)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.module, self.message)
    }
}

macro_rules! tag {
    ($($ty:ty => $module:literal),* $(,)?) => {
        $(impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                CliError::new($module, e.to_string())
            }
        })*
    };
}

tag! {
    ImageError => "imagecore",
    ReconError => "qpi_recon",
    StainError => "stain_infer",
    SegError => "specificity",
    GrowthError => "growth",
    PlanError => "platescan",
    PipelineError => "rtpipeline",
    EvalError => "evalkit",
    std::io::Error => "io",
    serde_json::Error => "cli",
    glob::PatternError => "cli",
}

pub type CliResult<T = ()> = Result<T, CliError>;
