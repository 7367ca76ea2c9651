//! Road-geometry map: a Triangulated Irregular Network over the road surface
//! storing elevation and slope, with point queries, ray intersection and the
//! elevation-noise ablation modes.
//!
//! The surface is a 2.5D height field (no overhangs): plan-view footprints of
//! the triangles partition the covered region and each query point belongs to
//! exactly one facet (boundary points to all facets touching them).

mod bvh;
mod noise;

use std::path::Path;

use spade::{DelaunayTriangulation, HasPosition, Point2, Triangulation};
use thiserror::Error;

use crate::geometry::{Ray, Vec3, WorldPoint};
use crate::io::{self, FormatError};

use bvh::{Aabb, Bvh};

const TIN_FORMAT: &str = "tin";
const TIN_VERSION: u32 = 1;
/// Minimum ray parameter, rejecting self-intersection at the origin.
const RAY_T_EPS: f64 = 1e-6;
/// Relative tolerance for plan-view point-in-triangle tests.
const CONTAIN_EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum TinError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("plan-view point ({x}, {y}) is outside the triangulated region")]
    OutOfCoverage { x: f64, y: f64 },
    #[error("ray does not intersect the surface")]
    NoIntersection,
    #[error("invalid noise configuration: {0}")]
    InvalidNoise(String),
}

/// Elevation-noise configuration for the map-accuracy ablations.
///
/// `ElevationOnly` leaves the mesh untouched and offsets returned elevations
/// by a deterministic Gaussian keyed on the query location; facet normals
/// (the slope) stay nominal. `VertexPerturbed` resamples vertex elevations
/// once up front, so normals change too.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseMode {
    Nominal,
    ElevationOnly { sigma: f64, seed: u64 },
    VertexPerturbed { sigma: f64, seed: u64 },
}

/// A point on the road surface with its facet normal.
#[derive(Debug, Clone, Copy)]
pub struct SurfaceSample {
    pub point: WorldPoint,
    /// Unit normal with positive Z component.
    pub normal: Vec3,
    pub triangle_id: usize,
}

#[derive(Debug, Clone, Copy)]
struct FacetPlane {
    /// Unit normal, oriented upward.
    normal: Vec3,
    /// Plane offset: dot(normal, p) = d for points on the facet.
    d: f64,
}

/// Triangulated irregular network with a bounding-volume index.
#[derive(Debug, Clone)]
pub struct TinMap {
    vertices: Vec<WorldPoint>,
    triangles: Vec<[u32; 3]>,
    planes: Vec<FacetPlane>,
    index: Bvh,
    noise: NoiseMode,
}

struct HeightVertex {
    pos: Point2<f64>,
    z: f64,
}

impl HasPosition for HeightVertex {
    type Scalar = f64;
    fn position(&self) -> Point2<f64> {
        self.pos
    }
}

/// Build a TIN from scattered samples: 2D Delaunay triangulation of the
/// plan-view coordinates, lifted by the sample elevations.
pub fn build_tin(points: &[(f64, f64, f64)]) -> Result<TinMap, TinError> {
    if points.len() < 3 {
        return Err(TinError::DegenerateInput(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    let verts: Vec<HeightVertex> = points
        .iter()
        .map(|&(x, y, z)| HeightVertex {
            pos: Point2::new(x, y),
            z,
        })
        .collect();
    let tri: DelaunayTriangulation<HeightVertex> =
        DelaunayTriangulation::bulk_load_stable(verts)
            .map_err(|e| TinError::DegenerateInput(format!("triangulation failed: {e:?}")))?;
    if tri.num_inner_faces() == 0 {
        return Err(TinError::DegenerateInput(
            "input points are collinear in plan view".into(),
        ));
    }
    let vertices: Vec<WorldPoint> = tri
        .vertices()
        .map(|v| {
            let d = v.data();
            WorldPoint::new(d.pos.x, d.pos.y, d.z)
        })
        .collect();
    let triangles: Vec<[u32; 3]> = tri
        .inner_faces()
        .map(|f| {
            let [a, b, c] = f.vertices();
            [
                a.fix().index() as u32,
                b.fix().index() as u32,
                c.fix().index() as u32,
            ]
        })
        .collect();
    TinMap::from_mesh(vertices, triangles)
}

impl TinMap {
    /// Assemble a map from an explicit mesh (e.g. loaded from a TIN file).
    /// Validates triangle indices and non-degeneracy and builds the index.
    pub fn from_mesh(
        vertices: Vec<WorldPoint>,
        triangles: Vec<[u32; 3]>,
    ) -> Result<Self, TinError> {
        if triangles.is_empty() {
            return Err(TinError::DegenerateInput("mesh has no triangles".into()));
        }
        let mut planes = Vec::with_capacity(triangles.len());
        let mut bounds = Vec::with_capacity(triangles.len());
        for (i, t) in triangles.iter().enumerate() {
            for &v in t {
                if v as usize >= vertices.len() {
                    return Err(TinError::DegenerateInput(format!(
                        "triangle {i} references vertex {v} of {}",
                        vertices.len()
                    )));
                }
            }
            let [a, b, c] = [
                vertices[t[0] as usize],
                vertices[t[1] as usize],
                vertices[t[2] as usize],
            ];
            let n = (b - a).cross(&(c - a));
            let area = 0.5 * n.norm();
            if area <= 1e-9 {
                return Err(TinError::DegenerateInput(format!(
                    "triangle {i} is degenerate (area {area:.3e} m^2)"
                )));
            }
            let mut normal = n / n.norm();
            if normal.z < 0.0 {
                normal = -normal;
            }
            if normal.z < 1e-12 {
                return Err(TinError::DegenerateInput(format!(
                    "triangle {i} is vertical; the surface must be a height field"
                )));
            }
            let d = normal.dot(&a.coords);
            planes.push(FacetPlane { normal, d });
            let mut bb = Aabb::empty();
            for p in [a, b, c] {
                bb.grow_point([p.x, p.y, p.z]);
            }
            bounds.push(bb);
        }
        let index = Bvh::build(&bounds);
        Ok(Self {
            vertices,
            triangles,
            planes,
            index,
            noise: NoiseMode::Nominal,
        })
    }

    pub fn vertices(&self) -> &[WorldPoint] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn noise_mode(&self) -> NoiseMode {
        self.noise
    }

    pub fn triangle_normal(&self, id: usize) -> Vec3 {
        self.planes[id].normal
    }

    /// Plan-view bounding rectangle (x_min, y_min, x_max, y_max).
    pub fn plan_bounds(&self) -> (f64, f64, f64, f64) {
        let mut b = (
            f64::INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::NEG_INFINITY,
        );
        for v in &self.vertices {
            b.0 = b.0.min(v.x);
            b.1 = b.1.min(v.y);
            b.2 = b.2.max(v.x);
            b.3 = b.3.max(v.y);
        }
        b
    }

    /// Switch noise mode. `ElevationOnly` shares this map's geometry;
    /// `VertexPerturbed` rebuilds it with vertex elevations perturbed once.
    /// Modes do not stack: apply them to the nominal map.
    pub fn with_noise(&self, mode: NoiseMode) -> Result<TinMap, TinError> {
        match mode {
            NoiseMode::Nominal => {
                let mut m = self.clone();
                m.noise = NoiseMode::Nominal;
                Ok(m)
            }
            NoiseMode::ElevationOnly { sigma, .. } => {
                if sigma < 0.0 {
                    return Err(TinError::InvalidNoise(format!("negative sigma {sigma}")));
                }
                let mut m = self.clone();
                m.noise = mode;
                Ok(m)
            }
            NoiseMode::VertexPerturbed { sigma, seed } => {
                if sigma < 0.0 {
                    return Err(TinError::InvalidNoise(format!("negative sigma {sigma}")));
                }
                let vertices: Vec<WorldPoint> = self
                    .vertices
                    .iter()
                    .enumerate()
                    .map(|(i, v)| {
                        WorldPoint::new(
                            v.x,
                            v.y,
                            v.z + noise::indexed_offset(seed, sigma, i as u64),
                        )
                    })
                    .collect();
                let mut m = TinMap::from_mesh(vertices, self.triangles.clone())?;
                m.noise = mode;
                Ok(m)
            }
        }
    }

    fn plan_contains(&self, id: usize, x: f64, y: f64) -> bool {
        let [a, b, c] = self.triangle_points(id);
        let det = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
        let sign = if det >= 0.0 { 1.0 } else { -1.0 };
        let tol = CONTAIN_EPS * det.abs().max(1e-12);
        let w0 = ((b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x)) * sign;
        let w1 = ((c.x - b.x) * (y - b.y) - (c.y - b.y) * (x - b.x)) * sign;
        let w2 = ((a.x - c.x) * (y - c.y) - (a.y - c.y) * (x - c.x)) * sign;
        w0 >= -tol && w1 >= -tol && w2 >= -tol
    }

    fn triangle_points(&self, id: usize) -> [WorldPoint; 3] {
        let t = self.triangles[id];
        [
            self.vertices[t[0] as usize],
            self.vertices[t[1] as usize],
            self.vertices[t[2] as usize],
        ]
    }

    /// Elevation of facet `id`'s plane at plan position (x, y).
    pub fn plane_elevation(&self, id: usize, x: f64, y: f64) -> f64 {
        let p = &self.planes[id];
        (p.d - p.normal.x * x - p.normal.y * y) / p.normal.z
    }

    /// Surface sample at plan-view position (x, y).
    pub fn query(&self, x: f64, y: f64) -> Result<SurfaceSample, TinError> {
        let mut found: Option<usize> = None;
        self.index.visit_point_xy(x, y, 1e-9, |id| {
            if self.plan_contains(id, x, y) {
                found = Some(match found {
                    Some(f) => f.min(id),
                    None => id,
                });
            }
        });
        let id = found.ok_or(TinError::OutOfCoverage { x, y })?;
        let mut z = self.plane_elevation(id, x, y);
        if let NoiseMode::ElevationOnly { sigma, seed } = self.noise {
            z += noise::elevation_offset(seed, sigma, x, y);
        }
        Ok(SurfaceSample {
            point: WorldPoint::new(x, y, z),
            normal: self.planes[id].normal,
            triangle_id: id,
        })
    }

    fn moller_trumbore(&self, id: usize, origin: &WorldPoint, dir: &Vec3) -> Option<f64> {
        let [a, b, c] = self.triangle_points(id);
        let e1 = b - a;
        let e2 = c - a;
        let pvec = dir.cross(&e2);
        let det = e1.dot(&pvec);
        if det.abs() < 1e-14 {
            return None;
        }
        let inv = 1.0 / det;
        let tvec = origin - a;
        let u = tvec.dot(&pvec) * inv;
        if !(-1e-9..=1.0 + 1e-9).contains(&u) {
            return None;
        }
        let qvec = tvec.cross(&e1);
        let v = dir.dot(&qvec) * inv;
        if v < -1e-9 || u + v > 1.0 + 1e-9 {
            return None;
        }
        let t = e2.dot(&qvec) * inv;
        (t > RAY_T_EPS).then_some(t)
    }

    /// Nearest surface intersection with `t > 1e-6`. Ties on t resolve to
    /// the lowest triangle id.
    ///
    /// In `ElevationOnly` mode the hit is re-solved against the facet plane
    /// raised by the noise offset at the nominal hit location, so the
    /// returned point still lies on the ray (range errors grow as the ray
    /// grazes the surface, matching intersection with a noisy map).
    pub fn intersect_ray(&self, ray: &Ray) -> Result<SurfaceSample, TinError> {
        let o = ray.origin;
        let d = ray.direction();
        let (t, id) = self
            .index
            .intersect_ray([o.x, o.y, o.z], [d.x, d.y, d.z], RAY_T_EPS, |id| {
                self.moller_trumbore(id, &o, &d)
            })
            .ok_or(TinError::NoIntersection)?;
        let nominal = ray.point_at(t);
        let mut point = nominal;
        if let NoiseMode::ElevationOnly { sigma, seed } = self.noise {
            let eps = noise::elevation_offset(seed, sigma, nominal.x, nominal.y);
            if eps != 0.0 {
                let plane = &self.planes[id];
                let denom = plane.normal.dot(&d);
                let t_noisy = if denom.abs() < 1e-12 {
                    f64::NAN
                } else {
                    (plane.d + eps * plane.normal.z - plane.normal.dot(&o.coords)) / denom
                };
                point = if t_noisy.is_finite() && t_noisy > RAY_T_EPS {
                    ray.point_at(t_noisy)
                } else {
                    // Grazing or behind-origin: offset vertically instead.
                    WorldPoint::new(nominal.x, nominal.y, nominal.z + eps)
                };
            }
        }
        Ok(SurfaceSample {
            point,
            normal: self.planes[id].normal,
            triangle_id: id,
        })
    }

    /// Serialize as the TIN mesh text format (`v x y z` / `f i j k` lines,
    /// 1-based indices).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&io::header_line(TIN_FORMAT, TIN_VERSION));
        s.push('\n');
        for v in &self.vertices {
            s.push_str(&format!("v {} {} {}\n", v.x, v.y, v.z));
        }
        for t in &self.triangles {
            s.push_str(&format!("f {} {} {}\n", t[0] + 1, t[1] + 1, t[2] + 1));
        }
        s
    }

    pub fn from_text(path: &Path, text: &str) -> Result<Self, FormatError> {
        io::check_header(path, text.lines().next(), TIN_FORMAT, TIN_VERSION)?;
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        for (ln, line) in io::data_lines(text) {
            let mut toks = line.split_whitespace();
            match toks.next().unwrap() {
                "v" => {
                    let mut next = || -> Result<f64, FormatError> {
                        let t = toks
                            .next()
                            .ok_or_else(|| FormatError::parse(path, ln, "vertex needs 3 values"))?;
                        io::parse_f64(path, ln, t)
                    };
                    let (x, y, z) = (next()?, next()?, next()?);
                    vertices.push(WorldPoint::new(x, y, z));
                }
                "f" => {
                    let mut next = || -> Result<usize, FormatError> {
                        let t = toks
                            .next()
                            .ok_or_else(|| FormatError::parse(path, ln, "face needs 3 indices"))?;
                        io::parse_usize(path, ln, t)
                    };
                    let (i, j, k) = (next()?, next()?, next()?);
                    if i == 0 || j == 0 || k == 0 {
                        return Err(FormatError::parse(path, ln, "face indices are 1-based"));
                    }
                    triangles.push([(i - 1) as u32, (j - 1) as u32, (k - 1) as u32]);
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
        TinMap::from_mesh(vertices, triangles)
            .map_err(|e| FormatError::parse(path, 0, e.to_string()))
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
