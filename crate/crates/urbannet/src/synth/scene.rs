use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::descriptor::{compute_observation_angle, VehicleClass};
use crate::geometry::{Box2D, Box3D, CameraModel, Dimensions, EulerAngles, Mat3, Vec3, WorldPoint};
use crate::lanes::{Lane, LaneMap};
use crate::seeded;
use crate::tin::TinMap;

use super::profile::RoadProfile;
use super::SynthError;

/// Lateral pitch between adjacent lane center-lines (m).
const LANE_PITCH: f64 = 3.5;
/// Spacing of lane polyline samples along the road (m).
const LANE_SAMPLE_STEP: f64 = 2.0;
/// Maximum lateral offset of a vehicle from its lane center-line (m).
pub const MAX_LATERAL_JITTER: f64 = 0.3;
/// Bottom corners must sit on the TIN surface within this (m).
const CORNER_ON_SURFACE_TOL: f64 = 1e-6;

/// Per-class dimension priors (length, width, height ranges in meters).
fn dimension_prior(class: VehicleClass) -> ([f64; 2], [f64; 2], [f64; 2]) {
    match class {
        VehicleClass::Car => ([3.8, 5.2], [1.6, 2.0], [1.4, 1.8]),
        VehicleClass::Truck => ([6.0, 10.0], [2.2, 2.6], [2.5, 3.8]),
    }
}

/// Everything the generator knows about one placed vehicle.
#[derive(Debug, Clone)]
pub struct GtVehicle {
    /// Stable id used to key procedural snippet textures.
    pub uid: u64,
    pub class: VehicleClass,
    pub model_name: String,
    pub box3d: Box3D,
    /// Axis-aligned hull of the 9 projected keypoints, clipped to the image.
    pub box2d: Box2D,
    pub alpha: f64,
    /// Fraction of the keypoint-hull area lost to image clipping.
    pub truncation: f64,
    pub occlusion: u32,
    /// Euclidean camera-center to centroid distance (m).
    pub range: f64,
}

#[derive(Debug, Clone)]
pub struct Scene {
    pub camera: CameraModel,
    pub tin: TinMap,
    pub lanes: LaneMap,
    pub vehicles: Vec<GtVehicle>,
    pub held_out: bool,
}

/// Generator parameters for one scene.
#[derive(Debug, Clone)]
pub struct SceneSpec {
    pub profile: RoadProfile,
    pub camera: CameraModel,
    pub lane_count: usize,
    pub vehicle_count: usize,
    /// Ground-range band (plan distance from the camera, m) vehicles occupy.
    pub range_span: (f64, f64),
    pub truck_fraction: f64,
    /// Heading jitter about the lane tangent (radians).
    pub heading_jitter: f64,
    pub seed: u64,
}

/// The long-range camera intrinsics used throughout: 21 degree horizontal
/// field of view at 4k (3840x2160) resolution.
pub fn paper_intrinsics() -> (f64, f64, f64, f64, u32, u32) {
    let width = 3840u32;
    let height = 2160u32;
    let fov = 21.0_f64.to_radians();
    let fx = (width as f64 / 2.0) / (fov / 2.0).tan();
    (
        fx,
        fx,
        width as f64 / 2.0,
        height as f64 / 2.0,
        width,
        height,
    )
}

/// A camera `height` meters above the local road surface at plan position
/// (x, y), pitched `pitch_down` radians below the horizon, looking along +X.
pub fn paper_camera(
    profile: &RoadProfile,
    x: f64,
    y: f64,
    height: f64,
    pitch_down: f64,
) -> Result<CameraModel, SynthError> {
    let (fx, fy, cx, cy, w, h) = paper_intrinsics();
    let z = profile.elevation(x, y) + height;
    let forward = Vec3::new(pitch_down.cos(), 0.0, -pitch_down.sin());
    Ok(CameraModel::from_pose(
        fx,
        fy,
        cx,
        cy,
        w,
        h,
        WorldPoint::new(x, y, z),
        forward,
    )?)
}

impl SceneSpec {
    /// Spec with the standard camera: 11 m above ground, 6 degrees down.
    pub fn standard(
        profile: RoadProfile,
        vehicle_count: usize,
        seed: u64,
    ) -> Result<Self, SynthError> {
        let camera = paper_camera(&profile, -1.0, 0.0, 11.0, 6.0_f64.to_radians())?;
        Ok(Self {
            profile,
            camera,
            lane_count: 6,
            vehicle_count,
            range_span: (40.0, 160.0),
            truck_fraction: 0.3,
            heading_jitter: 3.0_f64.to_radians(),
            seed,
        })
    }
}

/// Build lane center-lines along +X at 3.5 m pitch, points on the TIN.
fn build_lanes(tin: &TinMap, lane_count: usize) -> Result<LaneMap, SynthError> {
    let (x_min, _, x_max, _) = tin.plan_bounds();
    let margin = 1.0;
    let mut lanes = Vec::with_capacity(lane_count);
    for k in 0..lane_count {
        let y = (k as f64 - (lane_count as f64 - 1.0) / 2.0) * LANE_PITCH;
        let mut points = Vec::new();
        let mut x = x_min + margin;
        while x <= x_max - margin {
            if let Ok(s) = tin.query(x, y) {
                points.push(s.point);
            }
            x += LANE_SAMPLE_STEP;
        }
        if points.len() >= 2 {
            lanes.push(Lane {
                id: k as u64,
                points,
            });
        }
    }
    Ok(LaneMap::new(lanes)?)
}

/// Plan-view footprint corners of a box (bottom face, ignoring z).
fn footprint(b: &Box3D) -> [(f64, f64); 4] {
    b.bottom_corners().map(|p| (p.x, p.y))
}

/// Separating-axis overlap test for two convex quads.
fn footprints_overlap(a: &[(f64, f64); 4], b: &[(f64, f64); 4]) -> bool {
    let axes = |q: [(f64, f64); 4]| {
        (0..4).map(move |i| {
            let (x0, y0) = q[i];
            let (x1, y1) = q[(i + 1) % 4];
            (-(y1 - y0), x1 - x0)
        })
    };
    for axis in axes(*a).chain(axes(*b)) {
        let project = |q: &[(f64, f64); 4]| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for &(x, y) in q {
                let d = x * axis.0 + y * axis.1;
                lo = lo.min(d);
                hi = hi.max(d);
            }
            (lo, hi)
        };
        let (a0, a1) = project(a);
        let (b0, b1) = project(b);
        if a1 < b0 || b1 < a0 {
            return false;
        }
    }
    true
}

/// Place one vehicle on the surface: footprint on the facet plane under the
/// centroid, heading projected into that plane. Returns None when a bottom
/// corner leaves the surface (facet mismatch or out of coverage).
fn conform_to_surface(
    tin: &TinMap,
    x: f64,
    y: f64,
    heading: f64,
    dims: Dimensions,
) -> Option<Box3D> {
    let base = tin.query(x, y).ok()?;
    let n = base.normal;
    let h_dir = Vec3::new(heading.cos(), heading.sin(), 0.0);
    let f = h_dir - n * h_dir.dot(&n);
    let f = f / f.norm();
    let left = n.cross(&f);
    let half_l = 0.5 * dims.length;
    let half_w = 0.5 * dims.width;
    for (sx, sy) in [(1.0, 1.0), (1.0, -1.0), (-1.0, -1.0), (-1.0, 1.0)] {
        let corner = base.point + f * (sx * half_l) + left * (sy * half_w);
        let s = tin.query(corner.x, corner.y).ok()?;
        if (s.point.z - corner.z).abs() > CORNER_ON_SURFACE_TOL {
            return None;
        }
    }
    let center = base.point + n * (0.5 * dims.height);
    let rotation = Mat3::from_columns(&[f, left, n]);
    let angles = EulerAngles::from_matrix(&rotation).angles;
    Box3D::new(center, dims, angles).ok()
}

/// Project the 9 keypoints and clip their hull to the image. Returns the
/// clipped box plus the clipped-area fraction; None when fully outside or
/// any keypoint is behind the camera.
fn keypoint_hull(b: &Box3D, camera: &CameraModel) -> Option<(Box2D, f64)> {
    let mut lo = (f64::INFINITY, f64::INFINITY);
    let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for c in b.corners() {
        let (u, v) = camera.project(&c).ok()?;
        lo = (lo.0.min(u), lo.1.min(v));
        hi = (hi.0.max(u), hi.1.max(v));
    }
    let full = Box2D::new(lo.0, lo.1, hi.0, hi.1).ok()?;
    let w = camera.image_width() as f64;
    let h = camera.image_height() as f64;
    let clipped = Box2D::new(lo.0.max(0.0), lo.1.max(0.0), hi.0.min(w), hi.1.min(h)).ok()?;
    if clipped.width() < 2.0 || clipped.height() < 2.0 {
        return None;
    }
    let truncation = 1.0 - (clipped.width() * clipped.height()) / (full.width() * full.height());
    Some((clipped, truncation.clamp(0.0, 1.0)))
}

/// Generate a full scene: TIN from the profile, lanes on the surface,
/// vehicles on the lanes with surface-conformed pose, labels derived from
/// the placed geometry. Deterministic per seed.
pub fn generate_scene(spec: &SceneSpec) -> Result<Scene, SynthError> {
    generate_scene_inner(spec, 0, false)
}

pub(super) fn generate_scene_inner(
    spec: &SceneSpec,
    scene_index: u64,
    held_out: bool,
) -> Result<Scene, SynthError> {
    if spec.vehicle_count == 0 {
        return Err(SynthError::InvalidSpec("vehicle_count must be > 0".into()));
    }
    if spec.lane_count == 0 {
        return Err(SynthError::InvalidSpec("lane_count must be > 0".into()));
    }
    if !(0.0..=1.0).contains(&spec.truck_fraction) {
        return Err(SynthError::InvalidSpec(
            "truck_fraction outside [0,1]".into(),
        ));
    }
    let tin = spec.profile.build_map()?;
    let lanes = build_lanes(&tin, spec.lane_count)?;
    if lanes.lanes().is_empty() {
        return Err(SynthError::InvalidSpec(
            "no lane fits inside the map extent".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seeded::mix_words(&[spec.seed, scene_index]));
    let cam_center = spec.camera.center();

    let mut vehicles: Vec<GtVehicle> = Vec::with_capacity(spec.vehicle_count);
    let mut placed_footprints: Vec<[(f64, f64); 4]> = Vec::new();
    let mut attempts = 0usize;
    let max_attempts = 100 * spec.vehicle_count;
    while vehicles.len() < spec.vehicle_count {
        attempts += 1;
        if attempts > max_attempts {
            return Err(SynthError::InfeasibleSpec {
                placed: vehicles.len(),
                requested: spec.vehicle_count,
            });
        }
        // Plan-distance from the camera; draws that land outside the field
        // of view (too near for the down-pitched camera) are rejected below
        // and resampled, so the effective band is the visible part.
        let target = rng.gen_range(spec.range_span.0..spec.range_span.1);

        let lane = &lanes.lanes()[rng.gen_range(0..lanes.lanes().len())];
        let lane_y = lane.points[0].y;
        let x = cam_center.x + target;
        let y = lane_y + rng.gen_range(-MAX_LATERAL_JITTER..MAX_LATERAL_JITTER);
        let heading = if spec.heading_jitter > 0.0 {
            rng.gen_range(-spec.heading_jitter..spec.heading_jitter)
        } else {
            0.0
        };
        let class = if rng.gen_range(0.0..1.0) < spec.truck_fraction {
            VehicleClass::Truck
        } else {
            VehicleClass::Car
        };
        let (lr, wr, hr) = dimension_prior(class);
        let dims = Dimensions::new(
            rng.gen_range(wr[0]..wr[1]),
            rng.gen_range(lr[0]..lr[1]),
            rng.gen_range(hr[0]..hr[1]),
        )
        .expect("priors are positive");

        let Some(box3d) = conform_to_surface(&tin, x, y, heading, dims) else {
            continue;
        };
        let Some((box2d, truncation)) = keypoint_hull(&box3d, &spec.camera) else {
            continue;
        };
        let fp = footprint(&box3d);
        if placed_footprints.iter().any(|p| footprints_overlap(p, &fp)) {
            continue;
        }
        let Ok(alpha) = compute_observation_angle(&box3d, &spec.camera) else {
            continue;
        };
        let idx = vehicles.len() as u64;
        let uid = seeded::mix_words(&[spec.seed, scene_index, idx]);
        let model_name = format!(
            "{}_{:02}",
            match class {
                VehicleClass::Car => "car",
                VehicleClass::Truck => "truck",
            },
            uid % 20
        );
        placed_footprints.push(fp);
        vehicles.push(GtVehicle {
            uid,
            class,
            model_name,
            box3d,
            box2d,
            alpha,
            truncation,
            occlusion: 0,
            range: (box3d.center - cam_center).norm(),
        });
    }
    Ok(Scene {
        camera: spec.camera.clone(),
        tin,
        lanes,
        vehicles,
        held_out,
    })
}
