//! Recover the full 9-DOF box from a detection: cast rays through the
//! decoded bottom keypoints, intersect them with the road surface, complete
//! the base as a parallelogram, then extrude along the surface normal by the
//! decoded height.

use thiserror::Error;

use crate::descriptor::{norm_to_alpha, DescriptorVector, Detection, DIM_SCALE};
use crate::geometry::{
    Box3D, CameraModel, Dimensions, EulerAngles, GeometryError, Mat3, Vec3, WorldPoint,
};
use crate::tin::TinMap;

/// Base quads thinner than this (m^2) are rejected.
const MIN_BASE_AREA: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum LiftError {
    #[error("no bottom-keypoint ray intersects the surface")]
    AllRaysMiss,
    #[error("degenerate base (area {area:.2e} m^2)")]
    DegenerateBase { area: f64 },
    #[error(
        "only {hits} ray hit(s) and the descriptor carries no dimensions to complete the base"
    )]
    InsufficientHits { hits: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Which reconstruction path produced the base.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LiftFlags {
    /// Per-keypoint ray misses (canonical order FL, FR, RR, RL).
    pub ray_missed: [bool; 4],
    /// A corner other than rear-left was completed by parallelogram closure.
    pub alternate_triple: bool,
    /// Missing corners rebuilt from descriptor dims plus observation angle.
    pub dims_completion: bool,
    /// The base-centroid surface query failed; hit normals were averaged.
    pub centroid_normal_fallback: bool,
}

impl LiftFlags {
    pub fn used_fallback(&self) -> bool {
        self.alternate_triple || self.dims_completion
    }
}

#[derive(Debug, Clone)]
pub struct LiftResult {
    pub box3d: Box3D,
    /// Reconstructed base corners in canonical cyclic order.
    pub base_points: [WorldPoint; 4],
    /// Distance between the closure-constructed corner and its own ray hit,
    /// when that spare ray hit the surface (descriptor/map consistency).
    pub closure_residual: Option<f64>,
    /// Geometric minus descriptor dimensions (width, length), full
    /// descriptors only.
    pub dim_deltas: Option<(f64, f64)>,
    pub flags: LiftFlags,
}

/// Object-frame plan offsets of the canonical base corners in (length,
/// width) half-extents.
const CORNER_PLAN_SIGNS: [(f64, f64); 4] = [(1.0, 1.0), (1.0, -1.0), (-1.0, -1.0), (-1.0, 1.0)];

pub fn lift(
    detection: &Detection,
    camera: &CameraModel,
    map: &TinMap,
) -> Result<LiftResult, LiftError> {
    let inputs = detection.descriptor.lift_inputs(&detection.box2d);
    let mut flags = LiftFlags::default();

    let mut hits: [Option<crate::tin::SurfaceSample>; 4] = [None, None, None, None];
    for (i, kp) in inputs.bottom_keypoints.iter().enumerate() {
        let ray = camera.pixel_ray(kp.0, kp.1);
        match map.intersect_ray(&ray) {
            Ok(s) => hits[i] = Some(s),
            Err(_) => flags.ray_missed[i] = true,
        }
    }
    let hit_count = hits.iter().filter(|h| h.is_some()).count();
    if hit_count == 0 {
        return Err(LiftError::AllRaysMiss);
    }

    let mut closure_residual = None;
    let base: [WorldPoint; 4] = if hits[0].is_some() && hits[1].is_some() && hits[2].is_some() {
        // Primary path: three canonical corners from rays, the fourth by
        // parallelogram closure. The spare rear-left hit, when present, only
        // feeds the consistency residual.
        let p0 = hits[0].as_ref().unwrap().point;
        let p1 = hits[1].as_ref().unwrap().point;
        let p2 = hits[2].as_ref().unwrap().point;
        let p3 = WorldPoint::from(p0.coords + p2.coords - p1.coords);
        if let Some(h3) = &hits[3] {
            closure_residual = Some((h3.point - p3).norm());
        }
        [p0, p1, p2, p3]
    } else if hit_count == 3 {
        // One canonical corner missing but the spare hit: close the
        // parallelogram from the other three (p0 + p2 = p1 + p3).
        flags.alternate_triple = true;
        let missing = flags.ray_missed.iter().position(|&m| m).unwrap();
        let mut pts = [Vec3::zeros(); 4];
        for (i, hit) in hits.iter().enumerate() {
            if let Some(h) = hit {
                pts[i] = h.point.coords;
            }
        }
        pts[missing] = match missing {
            0 => pts[1] + pts[3] - pts[2],
            1 => pts[0] + pts[2] - pts[3],
            2 => pts[1] + pts[3] - pts[0],
            _ => pts[0] + pts[2] - pts[1],
        };
        pts.map(WorldPoint::from)
    } else {
        // Dims-based completion from whatever hit.
        flags.dims_completion = true;
        dims_completion(detection, camera, map, &hits, hit_count, &mut flags)?
    };

    // Parallelogram-closure sanity on the constructed quad.
    let closure_gap = (base[0].coords + base[2].coords - base[1].coords - base[3].coords).norm();
    if !flags.dims_completion {
        debug_assert!(closure_gap < 1e-12 * (1.0 + base[0].coords.norm()));
    }

    let area = quad_area(&base);
    if area < MIN_BASE_AREA {
        return Err(LiftError::DegenerateBase { area });
    }

    let centroid =
        WorldPoint::from((base[0].coords + base[1].coords + base[2].coords + base[3].coords) / 4.0);
    let normal = match map.query(centroid.x, centroid.y) {
        Ok(s) => s.normal,
        Err(_) => {
            flags.centroid_normal_fallback = true;
            let mut n = Vec3::zeros();
            for h in hits.iter().flatten() {
                n += h.normal;
            }
            n.normalize()
        }
    };

    // Forward axis: front-edge midpoint minus rear-edge midpoint, flattened
    // into the base plane.
    let front_mid = (base[0].coords + base[1].coords) / 2.0;
    let rear_mid = (base[3].coords + base[2].coords) / 2.0;
    let f0 = front_mid - rear_mid;
    let f = f0 - normal * f0.dot(&normal);
    if f.norm() < 1e-9 {
        return Err(LiftError::DegenerateBase { area });
    }
    let f = f.normalize();
    let left = normal.cross(&f);
    let rotation = Mat3::from_columns(&[f, left, normal]);
    let angles = EulerAngles::from_matrix(&rotation).angles;

    let length = 0.5 * ((base[3] - base[0]).norm() + (base[2] - base[1]).norm());
    let width = 0.5 * ((base[1] - base[0]).norm() + (base[2] - base[3]).norm());
    let height = inputs.height;
    let size = Dimensions::new(width, length, height)?;
    let center = WorldPoint::from(centroid.coords + normal * (0.5 * height));
    let box3d = Box3D::new(center, size, angles)?;

    let dim_deltas = match &detection.descriptor {
        DescriptorVector::Full(d) => Some((
            width - d.dims_scaled.0 * DIM_SCALE,
            length - d.dims_scaled.1 * DIM_SCALE,
        )),
        DescriptorVector::Bottom(_) => None,
    };

    Ok(LiftResult {
        box3d,
        base_points: base,
        closure_residual,
        dim_deltas,
        flags,
    })
}

/// Rebuild missing corners from descriptor dimensions and observation angle
/// anchored on the available ray hits.
fn dims_completion(
    detection: &Detection,
    camera: &CameraModel,
    map: &TinMap,
    hits: &[Option<crate::tin::SurfaceSample>; 4],
    hit_count: usize,
    flags: &mut LiftFlags,
) -> Result<[WorldPoint; 4], LiftError> {
    let DescriptorVector::Full(desc) = &detection.descriptor else {
        return Err(LiftError::InsufficientHits { hits: hit_count });
    };
    let width = desc.dims_scaled.0 * DIM_SCALE;
    let length = desc.dims_scaled.1 * DIM_SCALE;
    let alpha = norm_to_alpha(desc.alpha_norm);

    let mut mean = Vec3::zeros();
    for h in hits.iter().flatten() {
        mean += h.point.coords;
    }
    mean /= hit_count as f64;

    let normal = match map.query(mean.x, mean.y) {
        Ok(s) => s.normal,
        Err(_) => {
            flags.centroid_normal_fallback = true;
            let mut n = Vec3::zeros();
            for h in hits.iter().flatten() {
                n += h.normal;
            }
            n.normalize()
        }
    };

    // Observation angle relates the object X axis to the ray toward the
    // object in the camera XZ plane; approximate the centroid ray by the ray
    // to the hit mean.
    let ray_cam = camera.to_camera_frame(&WorldPoint::from(mean));
    let theta_ray = ray_cam.x.atan2(ray_cam.z);
    let theta_obj = theta_ray - alpha;
    let x_cam = Vec3::new(theta_obj.sin(), 0.0, theta_obj.cos());
    let x_world = camera.rotation().transpose() * x_cam;
    let f = x_world - normal * x_world.dot(&normal);
    if f.norm() < 1e-9 {
        return Err(LiftError::DegenerateBase { area: 0.0 });
    }
    let f = f.normalize();
    let left = normal.cross(&f);

    // Each hit votes for the base center through its canonical offset.
    let mut center = Vec3::zeros();
    for (i, h) in hits.iter().enumerate() {
        if let Some(h) = h {
            let (sx, sy) = CORNER_PLAN_SIGNS[i];
            center += h.point.coords - f * (sx * 0.5 * length) - left * (sy * 0.5 * width);
        }
    }
    center /= hit_count as f64;

    let mut base = [WorldPoint::origin(); 4];
    for (i, b) in base.iter_mut().enumerate() {
        if let Some(h) = &hits[i] {
            *b = h.point;
        } else {
            let (sx, sy) = CORNER_PLAN_SIGNS[i];
            *b = WorldPoint::from(center + f * (sx * 0.5 * length) + left * (sy * 0.5 * width));
        }
    }
    Ok(base)
}

/// Area of a (near-)planar quad via the cross product of its diagonals.
fn quad_area(q: &[WorldPoint; 4]) -> f64 {
    0.5 * (q[2] - q[0]).cross(&(q[3] - q[1])).norm()
}

#[cfg(test)]
mod tests;
