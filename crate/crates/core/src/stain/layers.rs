// SPDX-License-Identifier: Apache-2.0

//! Layer kernels. Convolutions use the cross-correlation convention and
//! PyTorch weight layouts: conv `[out, in, kh, kw]`, transposed conv
//! `[in, out, 2, 2]`.

use rayon::prelude::*;

use super::preprocess::reflect_index;
use super::{StainError, Tensor};
use crate::Real;

/// Border handling for [`conv2d`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PadMode {
    /// Output keeps `ceil(len / stride)` samples centered on input sample
    /// `stride * i`; borders are reflected without repeating the edge sample.
    SameReflect,
    /// Same geometry as `SameReflect`, borders read as zero.
    SameZero,
    /// No padding.
    Valid,
}

fn shape_str(s: &[usize]) -> String {
    format!("{s:?}")
}

/// Leading pad and output length along one axis.
fn axis_geometry(len: usize, kernel: usize, stride: usize, mode: PadMode) -> Option<(usize, usize)> {
    match mode {
        PadMode::Valid => {
            if len < kernel {
                None
            } else {
                Some((0, (len - kernel) / stride + 1))
            }
        }
        PadMode::SameReflect | PadMode::SameZero => Some(((kernel - 1) / 2, len.div_ceil(stride))),
    }
}

/// 2-D convolution (cross-correlation) with optional bias.
pub fn conv2d<T: Real>(
    input: &Tensor<T>,
    weights: &[T],
    weight_shape: [usize; 4],
    bias: Option<&[T]>,
    stride: usize,
    mode: PadMode,
) -> Result<Tensor<T>, StainError> {
    let [out_c, in_c, kh, kw] = weight_shape;
    if stride == 0 {
        return Err(StainError::ZeroStride);
    }
    if in_c != input.channels() || weights.len() != out_c * in_c * kh * kw || kh == 0 || kw == 0 {
        return Err(StainError::ShapeMismatch {
            op: "conv2d",
            expected: format!("input with {in_c} channels and {} weights", out_c * in_c * kh * kw),
            found: format!("input {} and {} weights", shape_str(&input.shape()), weights.len()),
        });
    }
    if let Some(b) = bias {
        if b.len() != out_c {
            return Err(StainError::ShapeMismatch {
                op: "conv2d",
                expected: format!("bias [{out_c}]"),
                found: format!("bias [{}]", b.len()),
            });
        }
    }
    let (h, w) = (input.height(), input.width());
    let geometry = axis_geometry(h, kh, stride, mode).zip(axis_geometry(w, kw, stride, mode));
    let Some(((pad_y, out_h), (pad_x, out_w))) = geometry else {
        return Err(StainError::ShapeMismatch {
            op: "conv2d",
            expected: format!("input at least {kh}x{kw} for valid padding"),
            found: shape_str(&input.shape()),
        });
    };

    // Materialize the padded input once: rows of the padded plane are then
    // contiguous and the inner loop is a plain axpy.
    let ph = (out_h - 1) * stride + kh;
    let pw = (out_w - 1) * stride + kw;
    let mut padded = vec![T::zero(); in_c * ph * pw];
    for c in 0..in_c {
        let plane = input.plane(c);
        let dst = &mut padded[c * ph * pw..(c + 1) * ph * pw];
        for py in 0..ph {
            let sy = py as isize - pad_y as isize;
            for px in 0..pw {
                let sx = px as isize - pad_x as isize;
                dst[py * pw + px] = match mode {
                    PadMode::SameReflect => plane[reflect_index(sy, h) * w + reflect_index(sx, w)],
                    PadMode::SameZero | PadMode::Valid => {
                        if sy >= 0 && sx >= 0 && (sy as usize) < h && (sx as usize) < w {
                            plane[sy as usize * w + sx as usize]
                        } else {
                            T::zero()
                        }
                    }
                };
            }
        }
    }

    let planes: Vec<Vec<T>> = (0..out_c)
        .into_par_iter()
        .map(|o| {
            let b = bias.map_or(T::zero(), |b| b[o]);
            let mut out = vec![b; out_h * out_w];
            for c in 0..in_c {
                let src = &padded[c * ph * pw..(c + 1) * ph * pw];
                for ky in 0..kh {
                    for kx in 0..kw {
                        let wv = weights[((o * in_c + c) * kh + ky) * kw + kx];
                        if wv == T::zero() {
                            continue;
                        }
                        for oy in 0..out_h {
                            let row = &src[(oy * stride + ky) * pw..];
                            let dst = &mut out[oy * out_w..(oy + 1) * out_w];
                            if stride == 1 {
                                for (d, s) in dst.iter_mut().zip(&row[kx..kx + out_w]) {
                                    *d += wv * *s;
                                }
                            } else {
                                for (ox, d) in dst.iter_mut().enumerate() {
                                    *d += wv * row[ox * stride + kx];
                                }
                            }
                        }
                    }
                }
            }
            out
        })
        .collect();
    Ok(Tensor::from_planes(out_h, out_w, planes))
}

/// Inference batch norm: `(t - mean) / sqrt(var + eps) * gamma + beta` per channel.
pub fn batchnorm_infer<T: Real>(
    t: &Tensor<T>,
    gamma: &[T],
    beta: &[T],
    mean: &[T],
    var: &[T],
    eps: f64,
) -> Result<Tensor<T>, StainError> {
    let c = t.channels();
    for (name, v) in [("gamma", gamma), ("beta", beta), ("mean", mean), ("var", var)] {
        if v.len() != c {
            return Err(StainError::ShapeMismatch {
                op: "batchnorm",
                expected: format!("{name} [{c}]"),
                found: format!("{name} [{}]", v.len()),
            });
        }
    }
    let mut out = t.clone();
    let n = t.plane_len();
    for ch in 0..c {
        let v = var[ch].as_f64();
        if v < 0.0 {
            return Err(StainError::InvalidNormStatistics { channel: ch, reason: format!("variance {v} < 0") });
        }
        let denom = (v + eps).sqrt();
        if !(denom > 0.0 && denom.is_finite()) {
            return Err(StainError::InvalidNormStatistics {
                channel: ch,
                reason: format!("var + eps = {} is not positive", v + eps),
            });
        }
        let scale = gamma[ch].as_f64() / denom;
        let shift = beta[ch].as_f64() - mean[ch].as_f64() * scale;
        let (scale, shift) = (T::of(scale), T::of(shift));
        for x in &mut out.data_mut()[ch * n..(ch + 1) * n] {
            *x = *x * scale + shift;
        }
    }
    Ok(out)
}

pub fn relu<T: Real>(t: &Tensor<T>) -> Tensor<T> {
    t.map(|v| v.max(T::zero()))
}

/// 2x2 max pooling with stride 2; a trailing odd row/column is dropped.
pub fn max_pool2<T: Real>(t: &Tensor<T>) -> Tensor<T> {
    let (h, w) = (t.height() / 2, t.width() / 2);
    let planes = (0..t.channels())
        .map(|c| {
            let mut out = Vec::with_capacity(h * w);
            for y in 0..h {
                for x in 0..w {
                    let m = t
                        .get(c, 2 * y, 2 * x)
                        .max(t.get(c, 2 * y, 2 * x + 1))
                        .max(t.get(c, 2 * y + 1, 2 * x))
                        .max(t.get(c, 2 * y + 1, 2 * x + 1));
                    out.push(m);
                }
            }
            out
        })
        .collect();
    Tensor::from_planes(h, w, planes)
}

/// 2x2 transposed convolution with stride 2 ("up-convolution"):
/// `out[o, 2y+dy, 2x+dx] = b[o] + sum_i in[i, y, x] * w[i, o, dy, dx]`.
pub fn up_conv2<T: Real>(
    input: &Tensor<T>,
    weights: &[T],
    weight_shape: [usize; 4],
    bias: Option<&[T]>,
) -> Result<Tensor<T>, StainError> {
    let [in_c, out_c, kh, kw] = weight_shape;
    if in_c != input.channels() || kh != 2 || kw != 2 || weights.len() != in_c * out_c * 4 {
        return Err(StainError::ShapeMismatch {
            op: "up_conv2",
            expected: format!("[{}, out, 2, 2] weights", input.channels()),
            found: format!("{weight_shape:?} with {} values", weights.len()),
        });
    }
    if let Some(b) = bias {
        if b.len() != out_c {
            return Err(StainError::ShapeMismatch {
                op: "up_conv2",
                expected: format!("bias [{out_c}]"),
                found: format!("bias [{}]", b.len()),
            });
        }
    }
    let (h, w) = (input.height(), input.width());
    let (oh, ow) = (2 * h, 2 * w);
    let planes: Vec<Vec<T>> = (0..out_c)
        .into_par_iter()
        .map(|o| {
            let b = bias.map_or(T::zero(), |b| b[o]);
            let mut out = vec![b; oh * ow];
            for i in 0..in_c {
                let src = input.plane(i);
                let base = (i * out_c + o) * 4;
                let k = [weights[base], weights[base + 1], weights[base + 2], weights[base + 3]];
                for y in 0..h {
                    let (top, bottom) = out[2 * y * ow..(2 * y + 2) * ow].split_at_mut(ow);
                    for x in 0..w {
                        let v = src[y * w + x];
                        top[2 * x] += v * k[0];
                        top[2 * x + 1] += v * k[1];
                        bottom[2 * x] += v * k[2];
                        bottom[2 * x + 1] += v * k[3];
                    }
                }
            }
            out
        })
        .collect();
    Ok(Tensor::from_planes(oh, ow, planes))
}

/// Stacks `a`'s channels followed by `b`'s.
pub fn concat_channels<T: Real>(a: &Tensor<T>, b: &Tensor<T>) -> Result<Tensor<T>, StainError> {
    if a.height() != b.height() || a.width() != b.width() {
        return Err(StainError::ShapeMismatch {
            op: "concat",
            expected: format!("spatial {}x{}", a.height(), a.width()),
            found: format!("spatial {}x{}", b.height(), b.width()),
        });
    }
    let mut data = Vec::with_capacity(a.data().len() + b.data().len());
    data.extend_from_slice(a.data());
    data.extend_from_slice(b.data());
    Tensor::new(a.channels() + b.channels(), a.height(), a.width(), data)
}

pub fn add<T: Real>(a: &Tensor<T>, b: &Tensor<T>) -> Result<Tensor<T>, StainError> {
    if a.shape() != b.shape() {
        return Err(StainError::ShapeMismatch {
            op: "add",
            expected: shape_str(&a.shape()),
            found: shape_str(&b.shape()),
        });
    }
    let data = a.data().iter().zip(b.data()).map(|(&x, &y)| x + y).collect();
    Tensor::new(a.channels(), a.height(), a.width(), data)
}
