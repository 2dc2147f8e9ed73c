// SPDX-License-Identifier: Apache-2.0

//! Marker-controlled watershed on the Euclidean distance transform.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, VecDeque};

use super::BinaryMask;
use crate::imagecore::Mask;

/// Marker suppression depth in pixels.
pub const DEFAULT_H: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceLabels {
    width: usize,
    height: usize,
    labels: Vec<u32>,
    count: u32,
}

impl InstanceLabels {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn count(&self) -> u32 {
        self.count
    }

    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    /// Pixel set of instance `label`.
    pub fn instance(&self, label: u32) -> Mask {
        Mask::new(self.width, self.height, self.labels.iter().map(|&l| l == label).collect()).expect("non-empty map")
    }
}

/// 1-D squared distance transform of a sampled function (lower envelope of
/// parabolas).
fn edt_1d(f: &[f64], out: &mut [f64], v: &mut [usize], z: &mut [f64]) {
    let mut k: isize = -1;
    for q in 0..f.len() {
        if !f[q].is_finite() {
            continue;
        }
        loop {
            if k < 0 {
                k = 0;
                v[0] = q;
                z[0] = f64::NEG_INFINITY;
                z[1] = f64::INFINITY;
                break;
            }
            let p = v[k as usize];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q - p) as f64);
            if s <= z[k as usize] {
                k -= 1;
                continue;
            }
            k += 1;
            v[k as usize] = q;
            z[k as usize] = s;
            z[k as usize + 1] = f64::INFINITY;
            break;
        }
    }
    if k < 0 {
        out.fill(f64::INFINITY);
        return;
    }
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let d = q as f64 - p as f64;
        *o = d * d + f[p];
    }
}

/// Euclidean distance from each set pixel to the nearest unset pixel; the
/// area outside the image counts as unset. Unset pixels are 0.
pub fn distance_transform(mask: &Mask) -> Vec<f64> {
    let (w, h) = (mask.width(), mask.height());
    // pad by one background pixel on each side
    let (pw, ph) = (w + 2, h + 2);
    let mut grid = vec![0.0f64; pw * ph];
    for y in 0..h {
        for x in 0..w {
            if mask.get(x, y) {
                grid[(y + 1) * pw + x + 1] = f64::INFINITY;
            }
        }
    }
    let n = pw.max(ph);
    let (mut f, mut out, mut v, mut z) = (vec![0.0; n], vec![0.0; n], vec![0usize; n], vec![0.0; n + 1]);
    for x in 0..pw {
        for y in 0..ph {
            f[y] = grid[y * pw + x];
        }
        edt_1d(&f[..ph], &mut out[..ph], &mut v, &mut z);
        for y in 0..ph {
            grid[y * pw + x] = out[y];
        }
    }
    for y in 0..ph {
        f[..pw].copy_from_slice(&grid[y * pw..(y + 1) * pw]);
        edt_1d(&f[..pw], &mut out[..pw], &mut v, &mut z);
        grid[y * pw..(y + 1) * pw].copy_from_slice(&out[..pw]);
    }
    let mut d = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            d.push(grid[(y + 1) * pw + x + 1].sqrt());
        }
    }
    d
}

fn neighbors4(i: usize, w: usize, h: usize) -> impl Iterator<Item = usize> {
    let (x, y) = (i % w, i / w);
    [(y > 0).then(|| i - w), (x > 0).then(|| i - 1), (x + 1 < w).then(|| i + 1), (y + 1 < h).then(|| i + w)]
        .into_iter()
        .flatten()
}

#[derive(PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Morphological reconstruction by dilation of `d - h` under `d`.
fn h_maxima_reconstruction(d: &[f64], fg: &[bool], w: usize, h: usize, depth: f64) -> Vec<f64> {
    let mut r: Vec<f64> = d.iter().zip(fg).map(|(&v, &f)| if f { v - depth } else { f64::NEG_INFINITY }).collect();
    let mut heap: BinaryHeap<(Key, Reverse<usize>)> =
        (0..d.len()).filter(|&i| fg[i]).map(|i| (Key(r[i]), Reverse(i))).collect();
    while let Some((Key(v), Reverse(p))) = heap.pop() {
        if v < r[p] {
            continue;
        }
        for q in neighbors4(p, w, h) {
            if !fg[q] {
                continue;
            }
            let nv = v.min(d[q]);
            if nv > r[q] {
                r[q] = nv;
                heap.push((Key(nv), Reverse(q)));
            }
        }
    }
    r
}

/// Regional maxima plateaus of `r` over the foreground, labelled 1.. in
/// raster order of their first pixel.
fn regional_maxima(r: &[f64], fg: &[bool], w: usize, h: usize) -> (Vec<u32>, u32) {
    let mut labels = vec![0u32; r.len()];
    let mut visited = vec![false; r.len()];
    let mut next = 0u32;
    let mut plateau = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..r.len() {
        if !fg[start] || visited[start] {
            continue;
        }
        let level = r[start];
        let mut is_max = true;
        plateau.clear();
        visited[start] = true;
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            plateau.push(p);
            for q in neighbors4(p, w, h) {
                if !fg[q] {
                    continue;
                }
                if r[q] > level {
                    is_max = false;
                } else if r[q] == level && !visited[q] {
                    visited[q] = true;
                    queue.push_back(q);
                }
            }
        }
        if is_max {
            next += 1;
            for &p in &plateau {
                labels[p] = next;
            }
        }
    }
    (labels, next)
}

/// Instance labels for the set pixels of `mask`: distance-transform markers
/// after h-maxima suppression, flooded in order of decreasing distance.
pub fn watershed_instances(mask: &BinaryMask, h: f64) -> InstanceLabels {
    let m = &mask.mask;
    let (w, ht) = (m.width(), m.height());
    let fg = m.bits();
    let d = distance_transform(m);
    let r = h_maxima_reconstruction(&d, fg, w, ht, h.max(0.0));
    let (mut labels, count) = regional_maxima(&r, fg, w, ht);

    // (distance, first-come) priority; labels are assigned on push
    let mut heap: BinaryHeap<(Key, Reverse<u64>, usize)> = BinaryHeap::new();
    let mut seq = 0u64;
    for p in 0..labels.len() {
        if labels[p] != 0 {
            heap.push((Key(d[p]), Reverse(seq), p));
            seq += 1;
        }
    }
    while let Some((_, _, p)) = heap.pop() {
        for q in neighbors4(p, w, ht) {
            if fg[q] && labels[q] == 0 {
                labels[q] = labels[p];
                heap.push((Key(d[q]), Reverse(seq), q));
                seq += 1;
            }
        }
    }
    InstanceLabels { width: w, height: ht, labels, count }
}
