//! Shared test oracles, independent of the library's implementation paths:
//! a naive row-major direct convolution network, Monte-Carlo box overlap,
//! and a scanline rasterizer for BEV footprints.

use urbannet::geometry::Box3D;
use urbannet::net::{LayerKind, Tensor3, WeightBundle};

/// Brute-force forward pass in [y][x][c] layout, written separately from the
/// library's channel-major implementation.
pub fn reference_forward(bundle: &WeightBundle, input: &Tensor3) -> Vec<f32> {
    // Convert to row-major [y][x][c].
    let (h, w, ch) = (input.height, input.width, input.channels);
    let mut feat = vec![0.0f32; h * w * ch];
    for c in 0..ch {
        for y in 0..h {
            for x in 0..w {
                feat[(y * w + x) * ch + c] = input.at(c, y, x);
            }
        }
    }
    let mut dims = (h, w, ch);
    let mut flat: Vec<f32> = Vec::new();
    for (li, layer) in bundle.layers.iter().enumerate() {
        match layer.kind {
            LayerKind::Conv { in_ch, out_ch } => {
                let (h, w, _) = dims;
                let mut conv = vec![0.0f32; h * w * out_ch];
                for y in 0..h {
                    for x in 0..w {
                        for o in 0..out_ch {
                            let mut acc = layer.bias[o] as f64;
                            for ky in 0..3 {
                                for kx in 0..3 {
                                    let yy = y as isize + ky as isize - 1;
                                    let xx = x as isize + kx as isize - 1;
                                    if yy < 0 || xx < 0 || yy >= h as isize || xx >= w as isize {
                                        continue;
                                    }
                                    for i in 0..in_ch {
                                        let v = feat[((yy as usize) * w + xx as usize) * in_ch + i];
                                        let wv = layer.weights[((o * in_ch + i) * 3 + ky) * 3 + kx];
                                        acc += v as f64 * wv as f64;
                                    }
                                }
                            }
                            conv[(y * w + x) * out_ch + o] = (acc as f32).max(0.0);
                        }
                    }
                }
                // 2x2 max pooling.
                let (ph, pw) = (h / 2, w / 2);
                let mut pooled = vec![0.0f32; ph * pw * out_ch];
                for y in 0..ph {
                    for x in 0..pw {
                        for o in 0..out_ch {
                            let mut m = f32::NEG_INFINITY;
                            for dy in 0..2 {
                                for dx in 0..2 {
                                    m = m.max(conv[((2 * y + dy) * w + 2 * x + dx) * out_ch + o]);
                                }
                            }
                            pooled[(y * pw + x) * out_ch + o] = m;
                        }
                    }
                }
                feat = pooled;
                dims = (ph, pw, out_ch);
            }
            LayerKind::Fc { inputs, outputs } => {
                if flat.is_empty() {
                    // Flatten in the library's channel-major order.
                    let (h, w, ch) = dims;
                    flat = Vec::with_capacity(h * w * ch);
                    for c in 0..ch {
                        for y in 0..h {
                            for x in 0..w {
                                flat.push(feat[(y * w + x) * ch + c]);
                            }
                        }
                    }
                }
                let mut out = Vec::with_capacity(outputs);
                for o in 0..outputs {
                    let mut acc = layer.bias[o] as f64;
                    for (i, &v) in flat.iter().enumerate().take(inputs) {
                        acc += v as f64 * layer.weights[o * inputs + i] as f64;
                    }
                    let v = acc as f32;
                    out.push(if li + 1 < bundle.layers.len() {
                        v.max(0.0)
                    } else {
                        v
                    });
                }
                flat = out;
            }
        }
    }
    flat
}

/// Monte-Carlo IoU estimate with its standard error, sampling uniformly in
/// box `a` and testing membership in `b` against the half-extent bounds.
pub fn monte_carlo_iou(a: &Box3D, b: &Box3D, samples: usize, seed: u64) -> (f64, f64) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let ra = a.rotation_matrix();
    let rb = b.rotation_matrix();
    let ha = [0.5 * a.size.length, 0.5 * a.size.width, 0.5 * a.size.height];
    let hb = [0.5 * b.size.length, 0.5 * b.size.width, 0.5 * b.size.height];
    let mut inside = 0usize;
    for _ in 0..samples {
        let local = nalgebra::Vector3::new(
            rng.gen_range(-ha[0]..ha[0]),
            rng.gen_range(-ha[1]..ha[1]),
            rng.gen_range(-ha[2]..ha[2]),
        );
        let p = a.center.coords + ra * local;
        let q = rb.transpose() * (p - b.center.coords);
        if q.x.abs() <= hb[0] && q.y.abs() <= hb[1] && q.z.abs() <= hb[2] {
            inside += 1;
        }
    }
    let frac = inside as f64 / samples as f64;
    let va = a.volume();
    let vb = b.volume();
    let vi = frac * va;
    let denom = va + vb - vi;
    let iou = if denom <= 0.0 { 1.0 } else { vi / denom };
    // Delta-method standard error of the IoU through the sampled fraction.
    let se_frac = (frac * (1.0 - frac) / samples as f64).sqrt();
    let se_iou = se_frac * va * (va + vb) / (denom * denom);
    (iou, se_iou)
}

/// Scanline-raster IoU of two convex BEV footprints on a uniform grid
/// (cell centers), an independent route around polygon clipping.
pub fn raster_bev_iou(fa: &[(f64, f64)], fb: &[(f64, f64)], cell: f64) -> f64 {
    let all: Vec<(f64, f64)> = fa.iter().chain(fb.iter()).copied().collect();
    let y_min = all.iter().map(|p| p.1).fold(f64::INFINITY, f64::min) - cell;
    let y_max = all.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max) + cell;
    let x_origin = all.iter().map(|p| p.0).fold(f64::INFINITY, f64::min) - cell;
    let rows = ((y_max - y_min) / cell).ceil() as usize;
    let mut inter = 0u64;
    let mut union = 0u64;
    for j in 0..rows {
        let y = y_min + (j as f64 + 0.5) * cell;
        let ia = row_interval(fa, y);
        let ib = row_interval(fb, y);
        let ca = ia.map_or(0, |(a, b)| cells_in(a, b, x_origin, cell));
        let cb = ib.map_or(0, |(a, b)| cells_in(a, b, x_origin, cell));
        let ci = match (ia, ib) {
            (Some((a0, a1)), Some((b0, b1))) => {
                let lo = a0.max(b0);
                let hi = a1.min(b1);
                if hi > lo {
                    cells_in(lo, hi, x_origin, cell)
                } else {
                    0
                }
            }
            _ => 0,
        };
        inter += ci;
        union += ca + cb - ci;
    }
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

fn row_interval(poly: &[(f64, f64)], y: f64) -> Option<(f64, f64)> {
    let mut xs: Vec<f64> = Vec::new();
    for i in 0..poly.len() {
        let (x0, y0) = poly[i];
        let (x1, y1) = poly[(i + 1) % poly.len()];
        if (y0 <= y && y < y1) || (y1 <= y && y < y0) {
            xs.push(x0 + (y - y0) * (x1 - x0) / (y1 - y0));
        }
    }
    if xs.len() < 2 {
        return None;
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Some((xs[0], *xs.last().unwrap()))
}

/// Count grid-cell centers x_origin + (k + 0.5) * cell inside [lo, hi].
fn cells_in(lo: f64, hi: f64, x_origin: f64, cell: f64) -> u64 {
    let k_lo = ((lo - x_origin) / cell - 0.5).ceil().max(0.0);
    let k_hi = ((hi - x_origin) / cell - 0.5).floor();
    if k_hi < k_lo {
        0
    } else {
        (k_hi - k_lo) as u64 + 1
    }
}
