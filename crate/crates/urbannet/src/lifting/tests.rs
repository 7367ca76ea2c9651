use super::*;
use crate::descriptor::{encode, oracle_descriptor, OracleMode, VehicleClass};
use crate::geometry::Box2D;
use crate::synth::{generate_scene, paper_camera, PlanRect, ProfileKind, RoadProfile, SceneSpec};
use crate::tin::build_tin;

fn extent() -> PlanRect {
    PlanRect {
        x_min: 0.0,
        x_max: 175.0,
        y_min: -21.0,
        y_max: 21.0,
    }
}

fn scene_spec(kind: ProfileKind, count: usize, seed: u64) -> SceneSpec {
    let spacing = match kind {
        ProfileKind::Crest { .. } | ProfileKind::Sag { .. } => 12.0,
        _ => 10.0,
    };
    let profile = RoadProfile::new(kind, extent(), spacing).unwrap();
    let mut spec = SceneSpec::standard(profile, count, seed).unwrap();
    spec.range_span = (40.0, 120.0);
    spec
}

fn gt_detection(v: &crate::synth::GtVehicle, cam: &crate::geometry::CameraModel) -> Detection {
    Detection {
        box2d: v.box2d,
        descriptor: DescriptorVector::Full(encode(&v.box3d, cam, &v.box2d).unwrap()),
        confidence: 1.0,
        class: v.class,
    }
}

#[test]
fn perfect_input_on_flat_map_recovers_ground_truth() {
    let scene = generate_scene(&scene_spec(ProfileKind::Flat, 25, 2)).unwrap();
    for v in &scene.vehicles {
        let det = gt_detection(v, &scene.camera);
        let r = lift(&det, &scene.camera, &scene.tin).unwrap();
        assert!(!r.flags.used_fallback());
        assert!(
            (r.box3d.center - v.box3d.center).norm() < 1e-6,
            "center error {}",
            (r.box3d.center - v.box3d.center).norm()
        );
        assert!((r.box3d.size.width - v.box3d.size.width).abs() < 1e-6);
        assert!((r.box3d.size.length - v.box3d.size.length).abs() < 1e-6);
        assert!((r.box3d.size.height - v.box3d.size.height).abs() < 1e-6);
        let dr = r.box3d.rotation_matrix() - v.box3d.rotation_matrix();
        assert!(dr.norm() < 1e-6, "rotation error {}", dr.norm());
        // Residuals vanish on perfect input.
        assert!(r.closure_residual.unwrap_or(0.0) < 1e-6);
        let (dw, dl) = r.dim_deltas.unwrap();
        assert!(dw.abs() < 1e-6 && dl.abs() < 1e-6);
    }
}

#[test]
fn grade_pitch_matches_slope_angle() {
    let mut spec = scene_spec(ProfileKind::Grade { slope: 0.08 }, 20, 3);
    spec.heading_jitter = 0.0;
    let scene = generate_scene(&spec).unwrap();
    let expected = 0.08_f64.atan();
    for v in &scene.vehicles {
        let det = gt_detection(v, &scene.camera);
        let r = lift(&det, &scene.camera, &scene.tin).unwrap();
        assert!(
            (r.box3d.rotation.pitch - expected).abs() < 1e-4,
            "lifted pitch {} vs grade angle {expected}",
            r.box3d.rotation.pitch
        );
    }
}

#[test]
fn parallelogram_closure_is_exact() {
    let scene =
        generate_scene(&scene_spec(ProfileKind::Crest { curvature: 0.001 }, 20, 5)).unwrap();
    for v in &scene.vehicles {
        let det = gt_detection(v, &scene.camera);
        let r = lift(&det, &scene.camera, &scene.tin).unwrap();
        let gap = (r.base_points[0].coords + r.base_points[2].coords
            - r.base_points[1].coords
            - r.base_points[3].coords)
            .norm();
        assert!(
            gap < 1e-12 * (1.0 + r.base_points[0].coords.norm()),
            "gap {gap}"
        );
    }
}

#[test]
fn lifted_base_reprojects_onto_the_keypoints() {
    let scene = generate_scene(&scene_spec(ProfileKind::Flat, 20, 7)).unwrap();
    for v in &scene.vehicles {
        let det = gt_detection(v, &scene.camera);
        let inputs = det.descriptor.lift_inputs(&det.box2d);
        let r = lift(&det, &scene.camera, &scene.tin).unwrap();
        // Corners 0..2 come straight from the rays; corner 3 is constructed.
        for i in 0..3 {
            let (u, vv) = scene.camera.project(&r.base_points[i]).unwrap();
            let kp = inputs.bottom_keypoints[i];
            assert!(
                (u - kp.0).abs() < 1e-6 && (vv - kp.1).abs() < 1e-6,
                "corner {i} reprojected {} px off",
                ((u - kp.0).powi(2) + (vv - kp.1).powi(2)).sqrt()
            );
        }
    }
}

#[test]
fn box_z_axis_equals_queried_surface_normal() {
    let scene = generate_scene(&scene_spec(
        ProfileKind::Banked { cross_slope: 0.05 },
        15,
        9,
    ))
    .unwrap();
    for v in &scene.vehicles {
        let det = gt_detection(v, &scene.camera);
        let r = lift(&det, &scene.camera, &scene.tin).unwrap();
        let centroid = WorldPoint::from(
            (r.base_points[0].coords
                + r.base_points[1].coords
                + r.base_points[2].coords
                + r.base_points[3].coords)
                / 4.0,
        );
        let n = scene.tin.query(centroid.x, centroid.y).unwrap().normal;
        let z_axis = r.box3d.rotation_matrix() * Vec3::z();
        assert!((z_axis - n).norm() < 1e-9);
    }
}

#[test]
fn bottom_only_descriptor_lifts_identically_on_primary_path() {
    let scene = generate_scene(&scene_spec(ProfileKind::Flat, 15, 11)).unwrap();
    let objs: Vec<_> = scene
        .vehicles
        .iter()
        .map(|v| crate::descriptor::GroundTruthObject {
            class: v.class,
            box3d: v.box3d,
            box2d: v.box2d,
        })
        .collect();
    let full = oracle_descriptor(0, &objs, &scene.camera, &OracleMode::Perfect, false).unwrap();
    let bottom = oracle_descriptor(0, &objs, &scene.camera, &OracleMode::Perfect, true).unwrap();
    for (f, b) in full.iter().zip(&bottom) {
        let rf = lift(f, &scene.camera, &scene.tin).unwrap();
        let rb = lift(b, &scene.camera, &scene.tin).unwrap();
        assert!((rf.box3d.center - rb.box3d.center).norm() < 1e-12);
        assert_eq!(rf.box3d.size, rb.box3d.size);
    }
}

/// A vehicle whose rear-left corner hangs past the map edge: the spare ray
/// misses but the primary triple (0, 1, 2) is intact.
#[test]
fn spare_ray_miss_keeps_the_primary_path() {
    let map = build_tin(&grid(0.0, 100.0, -6.0, 6.0)).unwrap();
    let cam = paper_camera(
        &RoadProfile::new(ProfileKind::Flat, extent(), 10.0).unwrap(),
        -1.0,
        0.0,
        11.0,
        6.0_f64.to_radians(),
    )
    .unwrap();
    // Near the +y edge, negative yaw pushes only the rear-LEFT corner out.
    let b3 = Box3D::new(
        WorldPoint::new(70.0, 4.9, 0.75),
        crate::geometry::Dimensions::new(1.8, 4.5, 1.5).unwrap(),
        EulerAngles::new(-0.35, 0.0, 0.0),
    )
    .unwrap();
    let (b2, missing) = encode_with_misses(&b3, &cam, &map);
    assert_eq!(
        missing,
        [false, false, false, true],
        "crafted scene drifted"
    );
    let det = Detection {
        box2d: b2,
        descriptor: DescriptorVector::Full(encode(&b3, &cam, &b2).unwrap()),
        confidence: 1.0,
        class: VehicleClass::Car,
    };
    let r = lift(&det, &cam, &map).unwrap();
    assert!(!r.flags.used_fallback());
    assert!(r.closure_residual.is_none());
    assert!((r.box3d.center - b3.center).norm() < 0.5);
}

/// Rear-right corner (index 2, part of the primary triple) past the edge:
/// the alternate-triple closure must reconstruct it.
#[test]
fn single_primary_miss_uses_alternate_triple() {
    let map = build_tin(&grid(0.0, 100.0, -6.0, 6.0)).unwrap();
    let cam = paper_camera(
        &RoadProfile::new(ProfileKind::Flat, extent(), 10.0).unwrap(),
        -1.0,
        0.0,
        11.0,
        6.0_f64.to_radians(),
    )
    .unwrap();
    // Positive yaw swings the rear-RIGHT corner toward -y past the edge.
    let b3 = Box3D::new(
        WorldPoint::new(70.0, -4.9, 0.75),
        crate::geometry::Dimensions::new(1.8, 4.5, 1.5).unwrap(),
        EulerAngles::new(0.35, 0.0, 0.0),
    )
    .unwrap();
    let (b2, missing) = encode_with_misses(&b3, &cam, &map);
    assert_eq!(
        missing,
        [false, false, true, false],
        "crafted scene drifted"
    );
    let det = Detection {
        box2d: b2,
        descriptor: DescriptorVector::Full(encode(&b3, &cam, &b2).unwrap()),
        confidence: 1.0,
        class: VehicleClass::Car,
    };
    let r = lift(&det, &cam, &map).unwrap();
    assert!(r.flags.alternate_triple);
    assert!(
        (r.box3d.center - b3.center).norm() < 0.5,
        "center error {}",
        (r.box3d.center - b3.center).norm()
    );
}

/// Both front corners past the far edge of the map: completion falls back to
/// descriptor dims plus observation angle.
#[test]
fn double_miss_uses_dims_completion() {
    let map = build_tin(&grid(0.0, 100.0, -8.0, 8.0)).unwrap();
    let cam = paper_camera(
        &RoadProfile::new(ProfileKind::Flat, extent(), 10.0).unwrap(),
        -1.0,
        0.0,
        11.0,
        6.0_f64.to_radians(),
    )
    .unwrap();
    let b3 = Box3D::new(
        WorldPoint::new(99.0, 0.0, 0.75),
        crate::geometry::Dimensions::new(1.8, 4.5, 1.5).unwrap(),
        EulerAngles::zero(),
    )
    .unwrap();
    let (b2, missing) = encode_with_misses(&b3, &cam, &map);
    assert_eq!(missing, [true, true, false, false], "crafted scene drifted");
    let det = Detection {
        box2d: b2,
        descriptor: DescriptorVector::Full(encode(&b3, &cam, &b2).unwrap()),
        confidence: 1.0,
        class: VehicleClass::Car,
    };
    let r = lift(&det, &cam, &map).unwrap();
    assert!(r.flags.dims_completion);
    assert!(
        (r.box3d.center - b3.center).norm() < 0.5,
        "center error {}",
        (r.box3d.center - b3.center).norm()
    );
}

#[test]
fn all_rays_missing_is_an_error() {
    // Map far from where the vehicle projects.
    let map = build_tin(&grid(0.0, 20.0, -6.0, 6.0)).unwrap();
    let cam = paper_camera(
        &RoadProfile::new(ProfileKind::Flat, extent(), 10.0).unwrap(),
        -1.0,
        0.0,
        11.0,
        6.0_f64.to_radians(),
    )
    .unwrap();
    let b3 = Box3D::new(
        WorldPoint::new(80.0, 0.0, 0.75),
        crate::geometry::Dimensions::new(1.8, 4.5, 1.5).unwrap(),
        EulerAngles::zero(),
    )
    .unwrap();
    let b2 = Box2D::new(0.0, 0.0, 10.0, 10.0).unwrap();
    let det = Detection {
        box2d: b2,
        descriptor: DescriptorVector::Full(encode(&b3, &cam, &b2).unwrap()),
        confidence: 1.0,
        class: VehicleClass::Car,
    };
    assert!(matches!(
        lift(&det, &cam, &map),
        Err(LiftError::AllRaysMiss)
    ));
}

#[test]
fn bottom_only_with_too_few_hits_reports_insufficient_data() {
    let map = build_tin(&grid(0.0, 100.0, -8.0, 8.0)).unwrap();
    let cam = paper_camera(
        &RoadProfile::new(ProfileKind::Flat, extent(), 10.0).unwrap(),
        -1.0,
        0.0,
        11.0,
        6.0_f64.to_radians(),
    )
    .unwrap();
    let b3 = Box3D::new(
        WorldPoint::new(99.0, 0.0, 0.75),
        crate::geometry::Dimensions::new(1.8, 4.5, 1.5).unwrap(),
        EulerAngles::zero(),
    )
    .unwrap();
    let (b2, _) = encode_with_misses(&b3, &cam, &map);
    let full = encode(&b3, &cam, &b2).unwrap();
    let det = Detection {
        box2d: b2,
        descriptor: DescriptorVector::Bottom(full.to_bottom()),
        confidence: 1.0,
        class: VehicleClass::Car,
    };
    assert!(matches!(
        lift(&det, &cam, &map),
        Err(LiftError::InsufficientHits { .. })
    ));
}

fn grid(x0: f64, x1: f64, y0: f64, y1: f64) -> Vec<(f64, f64, f64)> {
    let mut pts = Vec::new();
    let n = 10;
    for i in 0..=n {
        for j in 0..=n {
            pts.push((
                x0 + (x1 - x0) * i as f64 / n as f64,
                y0 + (y1 - y0) * j as f64 / n as f64,
                0.0,
            ));
        }
    }
    pts
}

/// Project the box, build its keypoint-hull 2D box, and report which bottom
/// corner rays miss the given map.
fn encode_with_misses(
    b3: &Box3D,
    cam: &crate::geometry::CameraModel,
    map: &TinMap,
) -> (Box2D, [bool; 4]) {
    let mut lo = (f64::INFINITY, f64::INFINITY);
    let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for c in b3.corners() {
        let (u, v) = cam.project(&c).unwrap();
        lo = (lo.0.min(u), lo.1.min(v));
        hi = (hi.0.max(u), hi.1.max(v));
    }
    let b2 = Box2D::new(lo.0, lo.1, hi.0, hi.1).unwrap();
    let mut missing = [false; 4];
    for (i, c) in b3.bottom_corners().iter().enumerate() {
        let (u, v) = cam.project(c).unwrap();
        missing[i] = map.intersect_ray(&cam.pixel_ray(u, v)).is_err();
    }
    (b2, missing)
}
