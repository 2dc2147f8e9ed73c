// SPDX-License-Identifier: Apache-2.0

//! Direct-loop f64 reference evaluation of the network layers.

#![allow(dead_code)]

use pics_core::{NetSpec, Tensor, WeightStore};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Plain `[c][y][x]` feature map for the reference evaluator.
#[derive(Clone)]
pub struct Map {
    pub c: usize,
    pub h: usize,
    pub w: usize,
    pub v: Vec<f64>,
}

impl Map {
    pub fn at(&self, c: usize, y: usize, x: usize) -> f64 {
        self.v[(c * self.h + y) * self.w + x]
    }
}

pub fn mirror(i: isize, n: usize) -> usize {
    // reflect without repeating the edge, by explicit folding
    let mut i = i;
    let n = n as isize;
    if n == 1 {
        return 0;
    }
    loop {
        if i < 0 {
            i = -i;
        } else if i >= n {
            i = 2 * (n - 1) - i;
        } else {
            return i as usize;
        }
    }
}

pub fn ref_conv(m: &Map, w: &[f64], wshape: [usize; 4], b: &[f64], reflect: bool) -> Map {
    let [o, i, kh, kw] = wshape;
    assert_eq!(i, m.c);
    let (ry, rx) = ((kh / 2) as isize, (kw / 2) as isize);
    let mut v = vec![0.0; o * m.h * m.w];
    for oc in 0..o {
        for y in 0..m.h {
            for x in 0..m.w {
                let mut s = b[oc];
                for ic in 0..i {
                    for dy in 0..kh {
                        for dx in 0..kw {
                            let sy = y as isize + dy as isize - ry;
                            let sx = x as isize + dx as isize - rx;
                            let px = if reflect {
                                m.at(ic, mirror(sy, m.h), mirror(sx, m.w))
                            } else if sy < 0 || sx < 0 || sy >= m.h as isize || sx >= m.w as isize {
                                0.0
                            } else {
                                m.at(ic, sy as usize, sx as usize)
                            };
                            s += w[((oc * i + ic) * kh + dy) * kw + dx] * px;
                        }
                    }
                }
                v[(oc * m.h + y) * m.w + x] = s;
            }
        }
    }
    Map { c: o, h: m.h, w: m.w, v }
}

pub fn ref_bn_relu(m: &Map, g: &[f64], b: &[f64], mean: &[f64], var: &[f64], eps: f64, relu: bool) -> Map {
    let mut out = m.clone();
    for c in 0..m.c {
        for k in 0..m.h * m.w {
            let i = c * m.h * m.w + k;
            let y = (m.v[i] - mean[c]) / (var[c] + eps).sqrt() * g[c] + b[c];
            out.v[i] = if relu { y.max(0.0) } else { y };
        }
    }
    out
}

pub fn ref_pool(m: &Map) -> Map {
    let (h, w) = (m.h / 2, m.w / 2);
    let mut v = Vec::new();
    for c in 0..m.c {
        for y in 0..h {
            for x in 0..w {
                let mut best = f64::NEG_INFINITY;
                for (dy, dx) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    best = best.max(m.at(c, 2 * y + dy, 2 * x + dx));
                }
                v.push(best);
            }
        }
    }
    Map { c: m.c, h, w, v }
}

pub fn ref_up(m: &Map, w: &[f64], out_c: usize, b: &[f64]) -> Map {
    let (h, wd) = (2 * m.h, 2 * m.w);
    let mut v = vec![0.0; out_c * h * wd];
    for o in 0..out_c {
        for y in 0..h {
            for x in 0..wd {
                let mut s = b[o];
                for i in 0..m.c {
                    s += m.at(i, y / 2, x / 2) * w[((i * out_c + o) * 2 + y % 2) * 2 + x % 2];
                }
                v[(o * h + y) * wd + x] = s;
            }
        }
    }
    Map { c: out_c, h, w: wd, v }
}

pub fn to_map(t: &Tensor<f32>) -> Map {
    Map { c: t.channels(), h: t.height(), w: t.width(), v: t.data().iter().map(|&x| x as f64).collect() }
}

pub fn max_diff(t: &Tensor<f32>, m: &Map) -> f64 {
    assert_eq!(t.shape(), [m.c, m.h, m.w]);
    t.data().iter().zip(&m.v).map(|(&a, &b)| (a as f64 - b).abs()).fold(0.0, f64::max)
}

pub fn random_tensor(rng: &mut ChaCha8Rng, c: usize, h: usize, w: usize) -> Tensor<f32> {
    Tensor::new(c, h, w, (0..c * h * w).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize, lo: f32, hi: f32) -> Vec<f32> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

pub fn f64s(v: &[f32]) -> Vec<f64> {
    v.iter().map(|&x| x as f64).collect()
}

/// Layer-by-layer evaluation of the default topology straight from the
/// record names.
pub fn reference_unet(spec: &NetSpec, w: &WeightStore<f32>, x: &Map) -> Map {
    let rec = |n: &str| f64s(&w.get(n).unwrap_or_else(|| panic!("{n}")).data);
    let conv = |m: &Map, n: &str, k: usize| {
        let weight = rec(&format!("{n}.weight"));
        let o = weight.len() / (m.c * k * k);
        ref_conv(m, &weight, [o, m.c, k, k], &rec(&format!("{n}.bias")), true)
    };
    let bn = |m: &Map, n: &str| {
        let p = |f: &str| rec(&format!("{n}.{f}"));
        ref_bn_relu(m, &p("gamma"), &p("beta"), &p("mean"), &p("var"), p("epsilon")[0], true)
    };
    let block = |m: &Map, n: &str| {
        let a = bn(&conv(m, &format!("{n}.conv1"), 3), &format!("{n}.bn1"));
        bn(&conv(&a, &format!("{n}.conv2"), 3), &format!("{n}.bn2"))
    };
    let mut skips = Vec::new();
    let mut cur = x.clone();
    for l in 0..spec.depth {
        cur = block(&cur, &format!("enc{l}"));
        if l + 1 < spec.depth {
            skips.push(cur.clone());
            cur = ref_pool(&cur);
        }
    }
    for l in (0..spec.depth - 1).rev() {
        let f = spec.base_filters << l;
        let up = ref_up(&cur, &rec(&format!("dec{l}.up.weight")), f, &rec(&format!("dec{l}.up.bias")));
        let skip = skips.pop().unwrap();
        let mut v = skip.v.clone();
        v.extend_from_slice(&up.v);
        cur = block(&Map { c: skip.c + up.c, h: up.h, w: up.w, v }, &format!("dec{l}"));
    }
    let mut out = conv(&cur, "head", 1);
    for (o, i) in out.v.iter_mut().zip(&x.v) {
        *o += i;
    }
    out
}
