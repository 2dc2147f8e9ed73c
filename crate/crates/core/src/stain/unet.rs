// SPDX-License-Identifier: Apache-2.0

use super::layers::{add, batchnorm_infer, concat_channels, conv2d, max_pool2, relu, up_conv2, PadMode};
use super::{NetSpec, StainError, Tensor, WeightStore};
use crate::imagecore::Raster;
use crate::Real;

/// A network spec bound to weights that have been validated against it.
#[derive(Debug, Clone)]
pub struct UNet<T = f32> {
    spec: NetSpec,
    weights: WeightStore<T>,
}

impl<T: Real> UNet<T> {
    pub fn new(spec: NetSpec, weights: WeightStore<T>) -> Result<Self, StainError> {
        weights.validate(&spec)?;
        Ok(Self { spec, weights })
    }

    pub fn spec(&self) -> &NetSpec {
        &self.spec
    }

    pub fn weights(&self) -> &WeightStore<T> {
        &self.weights
    }

    fn data(&self, name: &str) -> &[T] {
        &self.weights.get(name).expect("validated").data
    }

    fn conv(&self, x: &Tensor<T>, name: &str) -> Result<Tensor<T>, StainError> {
        let r = self.weights.get(&format!("{name}.weight")).expect("validated");
        let shape = [r.shape[0], r.shape[1], r.shape[2], r.shape[3]];
        conv2d(x, &r.data, shape, Some(self.data(&format!("{name}.bias"))), 1, PadMode::SameReflect)
    }

    fn bn_relu(&self, x: &Tensor<T>, name: &str) -> Result<Tensor<T>, StainError> {
        let p = |f: &str| self.data(&format!("{name}.{f}"));
        let eps = p("epsilon")[0].as_f64();
        Ok(relu(&batchnorm_infer(x, p("gamma"), p("beta"), p("mean"), p("var"), eps)?))
    }

    fn block(&self, x: &Tensor<T>, prefix: &str) -> Result<Tensor<T>, StainError> {
        let x = self.bn_relu(&self.conv(x, &format!("{prefix}.conv1"))?, &format!("{prefix}.bn1"))?;
        self.bn_relu(&self.conv(&x, &format!("{prefix}.conv2"))?, &format!("{prefix}.bn2"))
    }

    fn check_input(&self, x: &Tensor<T>) -> Result<(), StainError> {
        if x.channels() != self.spec.in_channels {
            return Err(StainError::ShapeMismatch {
                op: "unet",
                expected: format!("{} input channels", self.spec.in_channels),
                found: format!("{:?}", x.shape()),
            });
        }
        let m = self.spec.alignment();
        if !x.width().is_multiple_of(m) || !x.height().is_multiple_of(m) || x.width() == 0 || x.height() == 0 {
            return Err(StainError::InputNotAligned { width: x.width(), height: x.height(), multiple: m });
        }
        Ok(())
    }

    /// Network output before the residual add.
    pub fn trunk(&self, x: &Tensor<T>) -> Result<Tensor<T>, StainError> {
        self.check_input(x)?;
        let depth = self.spec.depth;
        let mut skips = Vec::with_capacity(depth - 1);
        let mut cur = x.clone();
        for l in 0..depth {
            cur = self.block(&cur, &format!("enc{l}"))?;
            if l + 1 < depth {
                let pooled = max_pool2(&cur);
                skips.push(cur);
                cur = pooled;
            }
        }
        for l in (0..depth - 1).rev() {
            let r = self.weights.get(&format!("dec{l}.up.weight")).expect("validated");
            let shape = [r.shape[0], r.shape[1], r.shape[2], r.shape[3]];
            let up = up_conv2(&cur, &r.data, shape, Some(self.data(&format!("dec{l}.up.bias"))))?;
            let skip = skips.pop().expect("one skip per level");
            cur = self.block(&concat_channels(&skip, &up)?, &format!("dec{l}"))?;
        }
        self.conv(&cur, "head")
    }

    pub fn forward(&self, x: &Tensor<T>) -> Result<Tensor<T>, StainError> {
        let out = self.trunk(x)?;
        if self.spec.residual_input_add {
            add(&out, x)
        } else {
            Ok(out)
        }
    }
}

/// Validates `weights` against `spec`, then evaluates the network on a
/// single-channel normalized raster.
pub fn unet_forward<T: Real>(
    spec: &NetSpec,
    weights: &WeightStore<T>,
    input: &Raster<T>,
) -> Result<Raster<T>, StainError> {
    let net = UNet::new(spec.clone(), weights.clone())?;
    net.forward(&Tensor::from_raster(input))?.to_raster(input.pixel_size())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> NetSpec {
        NetSpec { depth: 3, base_filters: 4, ..NetSpec::default() }
    }

    #[test]
    fn zero_trunk_is_identity() {
        let net = UNet::new(spec(), WeightStore::<f32>::zeros(&spec(), 1e-5).unwrap()).unwrap();
        let x = Tensor::new(1, 8, 12, (0..96).map(|i| (i as f32 * 0.1).cos()).collect()).unwrap();
        assert_eq!(net.forward(&x).unwrap(), x);
    }

    #[test]
    fn rejects_misaligned_input_and_bad_weights() {
        let net = UNet::new(spec(), WeightStore::<f32>::zeros(&spec(), 1e-5).unwrap()).unwrap();
        let x = Tensor::<f32>::zeros(1, 8, 10);
        assert!(matches!(net.forward(&x), Err(StainError::InputNotAligned { multiple: 4, .. })));
        let other = NetSpec { base_filters: 2, ..spec() };
        assert!(UNet::new(spec(), WeightStore::<f32>::zeros(&other, 1e-5).unwrap()).is_err());
    }

    #[test]
    fn repeated_calls_are_bit_identical() {
        let net = UNet::new(spec(), WeightStore::<f32>::random(&spec(), 9, 1e-3).unwrap()).unwrap();
        let x = Tensor::new(1, 16, 16, (0..256).map(|i| (i as f32 * 0.37).sin()).collect()).unwrap();
        let a = net.forward(&x).unwrap();
        let b = net.forward(&x).unwrap();
        assert_eq!(
            a.data().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.data().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }
}
