//! Brute-force references and input generators shared by the test targets.
#![allow(dead_code)]

use depthsr::raster::{DefinitionMap, DepthMap, ObjectMap};
use nalgebra::Point3;
use rand::Rng;

/// Depth-first flood fill. Returns labels (0 = defined) numbered in
/// row-major order of first pixel, and a border flag per label.
pub fn flood_fill(w: usize, h: usize, defined: &[bool], eight: bool) -> (Vec<u32>, Vec<bool>) {
    let mut labels = vec![0u32; w * h];
    let mut border = vec![false];
    for start in 0..w * h {
        if defined[start] || labels[start] != 0 {
            continue;
        }
        let id = border.len() as u32;
        let mut touches = false;
        let mut stack = vec![(start / w, start % w)];
        labels[start] = id;
        while let Some((r, c)) = stack.pop() {
            if r == 0 || c == 0 || r == h - 1 || c == w - 1 {
                touches = true;
            }
            for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    if (dr == 0 && dc == 0) || (!eight && dr != 0 && dc != 0) {
                        continue;
                    }
                    let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                    if nr < 0 || nc < 0 || nr >= h as i64 || nc >= w as i64 {
                        continue;
                    }
                    let j = nr as usize * w + nc as usize;
                    if !defined[j] && labels[j] == 0 {
                        labels[j] = id;
                        stack.push((nr as usize, nc as usize));
                    }
                }
            }
        }
        border.push(touches);
    }
    (labels, border)
}

/// Downsampling rule applied block by block with floating-point centers.
pub fn downsample_ref(d: &DepthMap, s: usize, tau: f32) -> Vec<f32> {
    let (w, h) = d.dims();
    let mut out = Vec::new();
    for br in 0..h / s {
        for bc in 0..w / s {
            let mut vals = Vec::new();
            for r in br * s..br * s + s {
                for c in bc * s..bc * s + s {
                    if let Some(v) = d.get(r, c) {
                        vals.push((r, c, v));
                    }
                }
            }
            if vals.is_empty() {
                out.push(f32::NAN);
                continue;
            }
            let lo = vals.iter().map(|v| v.2).fold(f32::INFINITY, f32::min);
            let hi = vals.iter().map(|v| v.2).fold(f32::NEG_INFINITY, f32::max);
            if hi - lo > tau {
                out.push(lo);
                continue;
            }
            let center = |x: usize, b: usize| x as f64 - (b * s) as f64 - (s as f64 - 1.0) / 2.0;
            // vals is in row-major order, so the first minimum wins ties
            let mut best = vals[0];
            let mut best_d = f64::INFINITY;
            for &v in &vals {
                let dd = center(v.0, br).powi(2) + center(v.1, bc).powi(2);
                if dd < best_d {
                    best_d = dd;
                    best = v;
                }
            }
            out.push(best.2);
        }
    }
    out
}

pub fn rmse_ref(pred: &DepthMap, gt: &DepthMap, def: &DefinitionMap, obj: Option<&ObjectMap>) -> Option<f64> {
    let (mut s, mut n) = (0.0f64, 0usize);
    for r in 0..gt.height() {
        for c in 0..gt.width() {
            if def.get(r, c) && obj.is_none_or(|o| o.get(r, c)) {
                let e = pred.value(r, c) as f64 - gt.value(r, c) as f64;
                s += e * e;
                n += 1;
            }
        }
    }
    (n > 0).then(|| (s / n as f64).sqrt())
}

pub fn object_loss_ref(pred: &DepthMap, gt: &DepthMap, def: &DefinitionMap, obj: &ObjectMap, wo: f64, wb: f64) -> Option<f64> {
    let (mut num, mut den) = (0.0f64, 0.0f64);
    for r in 0..gt.height() {
        for c in 0..gt.width() {
            if def.get(r, c) {
                let w = if obj.get(r, c) { wo } else { wb };
                num += w * (pred.value(r, c) as f64 - gt.value(r, c) as f64).abs();
                den += w;
            }
        }
    }
    (den > 0.0).then(|| num / den)
}

fn dist2(a: &Point3<f64>, b: &Point3<f64>) -> f64 {
    let (x, y, z) = (a.x - b.x, a.y - b.y, a.z - b.z);
    x * x + y * y + z * z
}

pub fn nn_distances_ref(cand: &[Point3<f64>], reference: &[Point3<f64>]) -> Vec<f64> {
    cand.iter()
        .map(|p| reference.iter().map(|q| dist2(p, q)).fold(f64::INFINITY, f64::min).sqrt())
        .collect()
}

/// Indices kept by statistical outlier removal, by exhaustive search.
pub fn outlier_keep_ref(points: &[Point3<f64>], k: usize, ratio: f64) -> Vec<bool> {
    let n = points.len();
    let means: Vec<f64> = (0..n)
        .map(|i| {
            let mut d: Vec<f64> = (0..n).filter(|&j| j != i).map(|j| dist2(&points[i], &points[j])).collect();
            d.sort_by(f64::total_cmp);
            d[..k].iter().map(|v| v.sqrt()).sum::<f64>() / k as f64
        })
        .collect();
    let mu = means.iter().sum::<f64>() / n as f64;
    let sd = (means.iter().map(|m| (m - mu).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
    means.iter().map(|&m| m <= mu + ratio * sd).collect()
}

/// Random mask with roughly `p_undef` undefined pixels.
pub fn random_mask(rng: &mut impl Rng, max_side: usize, p_undef: f64) -> DefinitionMap {
    let w = rng.random_range(1..=max_side);
    let h = rng.random_range(1..=max_side);
    DefinitionMap::new(w, h, (0..w * h).map(|_| !rng.random_bool(p_undef)).collect()).unwrap()
}

/// Depth values on a 1/64 mm lattice, so that shifting by whole
/// millimeters stays exact in `f32`.
pub fn lattice(rng: &mut impl Rng, lo: f32, hi: f32) -> f32 {
    (rng.random_range(lo..hi) * 64.0).round() / 64.0
}

/// Random metric test case: prediction, ground truth, definition, objects.
pub fn metric_case(rng: &mut impl Rng, w: usize, h: usize) -> (DepthMap, DepthMap, DefinitionMap, ObjectMap) {
    let n = w * h;
    let gt: Vec<f32> = (0..n).map(|_| lattice(rng, 300.0, 900.0)).collect();
    let pred: Vec<f32> = gt.iter().map(|&g| (g + lattice(rng, -20.0, 20.0)).max(1.0)).collect();
    let mut def: Vec<bool> = (0..n).map(|_| rng.random_bool(0.85)).collect();
    def[rng.random_range(0..n)] = true;
    let mut obj: Vec<bool> = (0..n).map(|_| rng.random_bool(0.3)).collect();
    // guarantee a measured object pixel
    let i = rng.random_range(0..n);
    def[i] = true;
    obj[i] = true;
    (
        DepthMap::new(w, h, pred).unwrap(),
        DepthMap::new(w, h, gt).unwrap(),
        DefinitionMap::new(w, h, def).unwrap(),
        ObjectMap::new(w, h, obj).unwrap(),
    )
}

/// Grid for vertex selection: tilted ground, a raised bump, some holes.
pub fn vertex_grid(rng: &mut impl Rng, w: usize, h: usize) -> DepthMap {
    let gx = rng.random_range(-2.0f32..2.0);
    let gy = rng.random_range(-2.0f32..6.0);
    let base = rng.random_range(400.0f32..700.0);
    let (br, bc) = (rng.random_range(0..h), rng.random_range(0..w));
    let holes = rng.random_range(0.0..0.1);
    DepthMap::from_fn(w, h, |r, c| {
        if rng.random_bool(holes) {
            return f32::NAN;
        }
        let bump = if r.abs_diff(br) <= 3 && c.abs_diff(bc) <= 3 { -40.0 } else { 0.0 };
        let v = base + gx * c as f32 + gy * r as f32 + bump + rng.random_range(-1.0..1.0);
        (v * 64.0).round() / 64.0
    })
    .unwrap()
}

pub fn random_cloud(rng: &mut impl Rng, n: usize, spread: f64) -> Vec<Point3<f64>> {
    (0..n)
        .map(|_| {
            Point3::new(
                rng.random_range(-spread..spread),
                rng.random_range(-spread..spread),
                500.0 + rng.random_range(-spread..spread) * 0.2,
            )
        })
        .collect()
}
