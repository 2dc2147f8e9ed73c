// SPDX-License-Identifier: Apache-2.0

use serde::{Deserialize, Serialize};

use super::StainError;

/// Declarative description of the residual U-Net.
///
/// Level `l` has `base_filters * 2^l` channels. Each encoder and decoder
/// level runs conv3x3, batch norm and ReLU twice; the decoder path starts
/// with a 2x2 up-convolution and concatenates `[skip, upsampled]`. A 1x1
/// head maps level 0 to the output channels, and the network input is
/// added to the head output when `residual_input_add` is set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetSpec {
    pub depth: usize,
    pub base_filters: usize,
    pub in_channels: usize,
    pub out_channels: usize,
    pub residual_input_add: bool,
}

impl Default for NetSpec {
    fn default() -> Self {
        Self { depth: 5, base_filters: 16, in_channels: 1, out_channels: 1, residual_input_add: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayerKind {
    /// 3x3 same-padded convolution.
    Conv3,
    BatchNorm,
    /// 2x2 stride-2 transposed convolution.
    UpConv,
    /// 1x1 output convolution.
    Head,
}

/// One parameterized layer; `name` is the record prefix in the weight store.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerSpec {
    pub name: String,
    pub kind: LayerKind,
    pub in_channels: usize,
    pub out_channels: usize,
}

impl LayerSpec {
    /// `(record name, shape)` pairs this layer owns. Batch-norm epsilon is a
    /// rank-0 record.
    pub fn records(&self) -> Vec<(String, Vec<usize>)> {
        let (i, o, n) = (self.in_channels, self.out_channels, &self.name);
        match self.kind {
            LayerKind::Conv3 => vec![(format!("{n}.weight"), vec![o, i, 3, 3]), (format!("{n}.bias"), vec![o])],
            LayerKind::Head => vec![(format!("{n}.weight"), vec![o, i, 1, 1]), (format!("{n}.bias"), vec![o])],
            LayerKind::UpConv => vec![(format!("{n}.weight"), vec![i, o, 2, 2]), (format!("{n}.bias"), vec![o])],
            LayerKind::BatchNorm => {
                let mut r: Vec<_> =
                    ["gamma", "beta", "mean", "var"].iter().map(|s| (format!("{n}.{s}"), vec![o])).collect();
                r.push((format!("{n}.epsilon"), vec![]));
                r
            }
        }
    }

    /// Trainable and running-statistic scalars; epsilon is excluded.
    pub fn parameter_count(&self) -> usize {
        self.records().iter().filter(|(_, s)| !s.is_empty()).map(|(_, s)| s.iter().product::<usize>()).sum()
    }
}

impl NetSpec {
    pub fn validate(&self) -> Result<(), StainError> {
        if self.depth == 0 || self.depth > 12 {
            return Err(StainError::InvalidSpec(format!("depth {} outside 1..=12", self.depth)));
        }
        if self.base_filters == 0 || self.in_channels == 0 || self.out_channels == 0 {
            return Err(StainError::InvalidSpec("channel counts must be positive".into()));
        }
        if self.residual_input_add && self.in_channels != self.out_channels {
            return Err(StainError::InvalidSpec(format!(
                "residual add needs equal in/out channels, got {} and {}",
                self.in_channels, self.out_channels
            )));
        }
        self.base_filters
            .checked_mul(1 << (self.depth - 1))
            .ok_or_else(|| StainError::InvalidSpec("filter count overflows".into()))?;
        Ok(())
    }

    pub fn filters(&self, level: usize) -> usize {
        self.base_filters << level
    }

    /// Spatial dimensions must be multiples of this.
    pub fn alignment(&self) -> usize {
        1 << (self.depth - 1)
    }

    /// Layer inventory in evaluation order.
    pub fn layers(&self) -> Vec<LayerSpec> {
        let mut out = Vec::new();
        let mut push = |name: String, kind, in_channels, out_channels| {
            out.push(LayerSpec { name, kind, in_channels, out_channels })
        };
        for l in 0..self.depth {
            let f = self.filters(l);
            let cin = if l == 0 { self.in_channels } else { self.filters(l - 1) };
            push(format!("enc{l}.conv1"), LayerKind::Conv3, cin, f);
            push(format!("enc{l}.bn1"), LayerKind::BatchNorm, f, f);
            push(format!("enc{l}.conv2"), LayerKind::Conv3, f, f);
            push(format!("enc{l}.bn2"), LayerKind::BatchNorm, f, f);
        }
        for l in (0..self.depth - 1).rev() {
            let f = self.filters(l);
            push(format!("dec{l}.up"), LayerKind::UpConv, self.filters(l + 1), f);
            push(format!("dec{l}.conv1"), LayerKind::Conv3, 2 * f, f);
            push(format!("dec{l}.bn1"), LayerKind::BatchNorm, f, f);
            push(format!("dec{l}.conv2"), LayerKind::Conv3, f, f);
            push(format!("dec{l}.bn2"), LayerKind::BatchNorm, f, f);
        }
        push("head".into(), LayerKind::Head, self.filters(0), self.out_channels);
        out
    }

    /// Every record the weight store must contain, in canonical order.
    pub fn records(&self) -> Vec<(String, Vec<usize>)> {
        self.layers().iter().flat_map(LayerSpec::records).collect()
    }

    pub fn parameter_count(&self) -> usize {
        self.layers().iter().map(LayerSpec::parameter_count).sum()
    }
}
