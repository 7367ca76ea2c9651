//! Lane center-line prior: polylines on the road surface, their projection
//! into the image, and rasterization of the fourth descriptor input channel.

use std::path::Path;

use crate::descriptor::SnippetSpec;
use crate::geometry::{Box2D, CameraModel, WorldPoint};
use crate::io::{self, FormatError};
use thiserror::Error;

const LANES_FORMAT: &str = "lanes";
const LANES_VERSION: u32 = 1;

/// Maximum world spacing between projected polyline samples (m).
const SUBDIVISION_STEP: f64 = 0.5;
/// Camera-frame depth at which behind-camera vertices are clipped (m).
const CLIP_DEPTH: f64 = 0.1;

#[derive(Debug, Error)]
pub enum LaneError {
    #[error("lane {id}: {msg}")]
    InvalidLane { id: u64, msg: String },
}

#[derive(Debug, Clone)]
pub struct Lane {
    pub id: u64,
    pub points: Vec<WorldPoint>,
}

/// Lane center-lines lying on the road surface.
#[derive(Debug, Clone, Default)]
pub struct LaneMap {
    lanes: Vec<Lane>,
}

impl LaneMap {
    pub fn new(lanes: Vec<Lane>) -> Result<Self, LaneError> {
        for lane in &lanes {
            if lane.points.len() < 2 {
                return Err(LaneError::InvalidLane {
                    id: lane.id,
                    msg: format!("needs at least 2 points, has {}", lane.points.len()),
                });
            }
            for (i, pair) in lane.points.windows(2).enumerate() {
                if (pair[1] - pair[0]).norm() <= 1e-6 {
                    return Err(LaneError::InvalidLane {
                        id: lane.id,
                        msg: format!("points {i} and {} coincide", i + 1),
                    });
                }
            }
        }
        Ok(Self { lanes })
    }

    pub fn lanes(&self) -> &[Lane] {
        &self.lanes
    }

    /// Project every lane into the image: segments are subdivided at <= 0.5 m
    /// world spacing first (so image-space curvature is captured), vertices
    /// behind the camera are clipped at the 0.1 m depth plane, and each lane
    /// may split into several image polylines where it leaves the front
    /// half-space. Fully-behind lanes produce nothing.
    pub fn project(&self, camera: &CameraModel) -> Vec<Vec<(f64, f64)>> {
        let mut out = Vec::new();
        for lane in &self.lanes {
            let world = subdivide(&lane.points);
            let depths: Vec<f64> = world.iter().map(|p| camera.to_camera_frame(p).z).collect();
            let mut current: Vec<(f64, f64)> = Vec::new();
            for i in 0..world.len() {
                let in_front = depths[i] >= CLIP_DEPTH;
                // Entering the front half-space: emit the crossing point.
                if in_front && i > 0 && depths[i - 1] < CLIP_DEPTH {
                    if let Some(px) =
                        clip_point(camera, &world[i - 1], &world[i], depths[i - 1], depths[i])
                    {
                        current.push(px);
                    }
                }
                if in_front {
                    if let Ok(px) = camera.project(&world[i]) {
                        current.push(px);
                    }
                } else {
                    // Leaving the front half-space: emit the crossing point
                    // and close the current run.
                    if i > 0 && depths[i - 1] >= CLIP_DEPTH {
                        if let Some(px) =
                            clip_point(camera, &world[i - 1], &world[i], depths[i - 1], depths[i])
                        {
                            current.push(px);
                        }
                    }
                    if current.len() >= 2 {
                        out.push(std::mem::take(&mut current));
                    } else {
                        current.clear();
                    }
                }
            }
            if current.len() >= 2 {
                out.push(current);
            }
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&io::header_line(LANES_FORMAT, LANES_VERSION));
        s.push('\n');
        for lane in &self.lanes {
            s.push_str(&format!("lane {}\n", lane.id));
            for p in &lane.points {
                s.push_str(&format!("p {} {} {}\n", p.x, p.y, p.z));
            }
        }
        s
    }

    pub fn from_text(path: &Path, text: &str) -> Result<Self, FormatError> {
        io::check_header(path, text.lines().next(), LANES_FORMAT, LANES_VERSION)?;
        let mut lanes: Vec<Lane> = Vec::new();
        for (ln, line) in io::data_lines(text) {
            let mut toks = line.split_whitespace();
            match toks.next().unwrap() {
                "lane" => {
                    let id = toks
                        .next()
                        .and_then(|t| t.parse::<u64>().ok())
                        .ok_or_else(|| FormatError::parse(path, ln, "lane needs a numeric id"))?;
                    lanes.push(Lane {
                        id,
                        points: Vec::new(),
                    });
                }
                "p" => {
                    let lane = lanes.last_mut().ok_or_else(|| {
                        FormatError::parse(path, ln, "point before any 'lane' record")
                    })?;
                    let mut next = || -> Result<f64, FormatError> {
                        let t = toks
                            .next()
                            .ok_or_else(|| FormatError::parse(path, ln, "point needs 3 values"))?;
                        io::parse_f64(path, ln, t)
                    };
                    let (x, y, z) = (next()?, next()?, next()?);
                    lane.points.push(WorldPoint::new(x, y, z));
                }
                other => {
                    return Err(FormatError::parse(
                        path,
                        ln,
                        format!("unknown record '{other}'"),
                    ));
                }
            }
        }
        LaneMap::new(lanes).map_err(|e| FormatError::parse(path, 0, e.to_string()))
    }

    pub fn write_file(&self, path: &Path) -> Result<(), FormatError> {
        io::write_atomic(path, self.to_text().as_bytes())?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<Self, FormatError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(path, &text)
    }
}

fn subdivide(points: &[WorldPoint]) -> Vec<WorldPoint> {
    let mut out = Vec::with_capacity(points.len());
    for pair in points.windows(2) {
        let len = (pair[1] - pair[0]).norm();
        let n = (len / SUBDIVISION_STEP).ceil().max(1.0) as usize;
        for k in 0..n {
            out.push(pair[0] + (pair[1] - pair[0]) * (k as f64 / n as f64));
        }
    }
    out.push(*points.last().unwrap());
    out
}

fn clip_point(
    camera: &CameraModel,
    a: &WorldPoint,
    b: &WorldPoint,
    za: f64,
    zb: f64,
) -> Option<(f64, f64)> {
    let s = (CLIP_DEPTH - za) / (zb - za);
    let p = a + (b - a) * s;
    camera.project(&p).ok()
}

/// Rasterize projected lane polylines into the snippet-space fourth channel:
/// segments are clipped to the crop window, mapped through the shared
/// [`SnippetSpec`] transform and drawn as 1-pixel anti-aliased strokes
/// (coverage in [0, 1], overlaps keep the maximum).
pub fn rasterize_channel(polylines: &[Vec<(f64, f64)>], crop: &Box2D, out_size: u32) -> Vec<f32> {
    let spec = SnippetSpec::new(*crop, out_size);
    let size = out_size as usize;
    let mut buf = vec![0.0f32; size * size];
    for line in polylines {
        for seg in line.windows(2) {
            let Some((a, b)) = clip_to_rect(seg[0], seg[1], crop) else {
                continue;
            };
            let pa = spec.apply(a.0, a.1);
            let pb = spec.apply(b.0, b.1);
            draw_line_aa(&mut buf, size, pa, pb);
        }
    }
    buf
}

/// Project and rasterize in one step; `zeroed` keeps the tensor shape but
/// blanks the channel (the no-centerlines ablation).
pub fn lane_channel(
    lanes: &LaneMap,
    camera: &CameraModel,
    crop: &Box2D,
    out_size: u32,
    zeroed: bool,
) -> Vec<f32> {
    if zeroed {
        return vec![0.0; (out_size * out_size) as usize];
    }
    rasterize_channel(&lanes.project(camera), crop, out_size)
}

/// Liang-Barsky segment clip against an axis-aligned rectangle.
fn clip_to_rect(a: (f64, f64), b: (f64, f64), rect: &Box2D) -> Option<((f64, f64), (f64, f64))> {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    let checks = [
        (-dx, a.0 - rect.u_min),
        (dx, rect.u_max - a.0),
        (-dy, a.1 - rect.v_min),
        (dy, rect.v_max - a.1),
    ];
    for (p, q) in checks {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                if r > t1 {
                    return None;
                }
                t0 = t0.max(r);
            } else {
                if r < t0 {
                    return None;
                }
                t1 = t1.min(r);
            }
        }
    }
    if t0 > t1 {
        return None;
    }
    Some((
        (a.0 + t0 * dx, a.1 + t0 * dy),
        (a.0 + t1 * dx, a.1 + t1 * dy),
    ))
}

/// Xiaolin Wu anti-aliased line with max blending. Endpoints are ordered
/// canonically first, so a reversed segment rasterizes bit-identically.
fn draw_line_aa(buf: &mut [f32], size: usize, a: (f64, f64), b: (f64, f64)) {
    let (mut x0, mut y0) = a;
    let (mut x1, mut y1) = b;
    if (x1, y1) < (x0, y0) {
        std::mem::swap(&mut x0, &mut x1);
        std::mem::swap(&mut y0, &mut y1);
    }
    let steep = (y1 - y0).abs() > (x1 - x0).abs();
    if steep {
        std::mem::swap(&mut x0, &mut y0);
        std::mem::swap(&mut x1, &mut y1);
    }
    if x0 > x1 {
        std::mem::swap(&mut x0, &mut x1);
        std::mem::swap(&mut y0, &mut y1);
    }
    let mut plot = |x: i64, y: i64, c: f64| {
        let (px, py) = if steep { (y, x) } else { (x, y) };
        if px >= 0 && py >= 0 && (px as usize) < size && (py as usize) < size {
            let cell = &mut buf[py as usize * size + px as usize];
            *cell = cell.max(c as f32);
        }
    };
    let dx = x1 - x0;
    let gradient = if dx == 0.0 { 1.0 } else { (y1 - y0) / dx };

    let fpart = |v: f64| v - v.floor();
    let rfpart = |v: f64| 1.0 - (v - v.floor());

    // First endpoint.
    let xend = x0.round();
    let yend = y0 + gradient * (xend - x0);
    let xgap = rfpart(x0 + 0.5);
    let xpxl1 = xend as i64;
    let ypxl1 = yend.floor() as i64;
    plot(xpxl1, ypxl1, rfpart(yend) * xgap);
    plot(xpxl1, ypxl1 + 1, fpart(yend) * xgap);
    let mut intery = yend + gradient;

    // Second endpoint.
    let xend2 = x1.round();
    let yend2 = y1 + gradient * (xend2 - x1);
    let xgap2 = fpart(x1 + 0.5);
    let xpxl2 = xend2 as i64;
    let ypxl2 = yend2.floor() as i64;

    for x in (xpxl1 + 1)..xpxl2 {
        plot(x, intery.floor() as i64, rfpart(intery));
        plot(x, intery.floor() as i64 + 1, fpart(intery));
        intery += gradient;
    }

    plot(xpxl2, ypxl2, rfpart(yend2) * xgap2);
    plot(xpxl2, ypxl2 + 1, fpart(yend2) * xgap2);
}
