use super::*;
use crate::descriptor::compute_observation_angle;
use std::path::Path;

fn extent() -> PlanRect {
    PlanRect {
        x_min: 0.0,
        x_max: 175.0,
        y_min: -21.0,
        y_max: 21.0,
    }
}

fn flat_spec(count: usize, seed: u64) -> SceneSpec {
    let profile = RoadProfile::new(ProfileKind::Flat, extent(), 10.0).unwrap();
    SceneSpec::standard(profile, count, seed).unwrap()
}

#[test]
fn flat_scene_has_zero_pitch_and_roll() {
    let scene = generate_scene(&flat_spec(30, 1)).unwrap();
    assert_eq!(scene.vehicles.len(), 30);
    for v in &scene.vehicles {
        assert!(
            v.box3d.rotation.pitch.abs() < 1e-9,
            "pitch {}",
            v.box3d.rotation.pitch
        );
        assert!(
            v.box3d.rotation.roll.abs() < 1e-9,
            "roll {}",
            v.box3d.rotation.roll
        );
    }
}

#[test]
fn grade_up_slope_pitch_matches_the_grade() {
    let profile = RoadProfile::new(ProfileKind::Grade { slope: 0.08 }, extent(), 10.0).unwrap();
    let mut spec = SceneSpec::standard(profile, 20, 3).unwrap();
    spec.range_span = (40.0, 120.0);
    spec.heading_jitter = 0.0; // exact up-slope heading
    let scene = generate_scene(&spec).unwrap();
    let expected = 0.08_f64.atan();
    for v in &scene.vehicles {
        assert!(
            (v.box3d.rotation.pitch - expected).abs() < 1e-6,
            "pitch {} vs grade angle {expected}",
            v.box3d.rotation.pitch
        );
    }
}

#[test]
fn banked_road_rolls_the_vehicles() {
    let profile =
        RoadProfile::new(ProfileKind::Banked { cross_slope: 0.05 }, extent(), 10.0).unwrap();
    let mut spec = SceneSpec::standard(profile, 15, 4).unwrap();
    spec.heading_jitter = 0.0;
    let scene = generate_scene(&spec).unwrap();
    let expected = 0.05_f64.atan();
    for v in &scene.vehicles {
        assert!(
            (v.box3d.rotation.roll - expected).abs() < 1e-6,
            "roll {} vs bank angle {expected}",
            v.box3d.rotation.roll
        );
    }
}

#[test]
fn same_seed_regenerates_bit_identical_scenes() {
    let a = generate_scene(&flat_spec(25, 77)).unwrap();
    let b = generate_scene(&flat_spec(25, 77)).unwrap();
    assert_eq!(a.vehicles.len(), b.vehicles.len());
    for (x, y) in a.vehicles.iter().zip(&b.vehicles) {
        assert_eq!(x.uid, y.uid);
        assert_eq!(x.box3d.center.x.to_bits(), y.box3d.center.x.to_bits());
        assert_eq!(
            x.box3d.rotation.yaw.to_bits(),
            y.box3d.rotation.yaw.to_bits()
        );
    }
    let c = generate_scene(&flat_spec(25, 78)).unwrap();
    assert_ne!(
        a.vehicles[0].box3d.center.x.to_bits(),
        c.vehicles[0].box3d.center.x.to_bits()
    );
}

#[test]
fn bottom_corners_lie_on_the_tin() {
    for kind in [
        ProfileKind::Flat,
        ProfileKind::Grade { slope: 0.05 },
        ProfileKind::Crest { curvature: 0.001 },
        ProfileKind::Banked { cross_slope: 0.05 },
    ] {
        let spacing = match kind {
            ProfileKind::Crest { .. } => 12.0,
            _ => 10.0,
        };
        let profile = RoadProfile::new(kind, extent(), spacing).unwrap();
        let mut spec = SceneSpec::standard(profile, 25, 9).unwrap();
        spec.range_span = (40.0, 130.0);
        let scene = generate_scene(&spec).unwrap();
        for v in &scene.vehicles {
            for c in v.box3d.bottom_corners() {
                let s = scene.tin.query(c.x, c.y).unwrap();
                assert!(
                    (s.point.z - c.z).abs() < 1e-6,
                    "{kind:?}: corner off surface by {}",
                    (s.point.z - c.z).abs()
                );
            }
        }
    }
}

#[test]
fn centroids_stay_near_their_lane() {
    let scene = generate_scene(&flat_spec(40, 5)).unwrap();
    let lane_ys: Vec<f64> = scene.lanes.lanes().iter().map(|l| l.points[0].y).collect();
    for v in &scene.vehicles {
        let d = lane_ys
            .iter()
            .map(|y| (v.box3d.center.y - y).abs())
            .fold(f64::INFINITY, f64::min);
        assert!(
            d <= MAX_LATERAL_JITTER + 1e-9,
            "centroid {} m from nearest lane",
            d
        );
    }
}

#[test]
fn footprints_do_not_overlap() {
    let scene = generate_scene(&flat_spec(60, 6)).unwrap();
    let fps: Vec<[(f64, f64); 4]> = scene
        .vehicles
        .iter()
        .map(|v| v.box3d.bottom_corners().map(|p| (p.x, p.y)))
        .collect();
    for i in 0..fps.len() {
        for j in (i + 1)..fps.len() {
            // Coarse check: centroid distance must exceed a small bound.
            let ci = centroid(&fps[i]);
            let cj = centroid(&fps[j]);
            let d = ((ci.0 - cj.0).powi(2) + (ci.1 - cj.1).powi(2)).sqrt();
            assert!(d > 1.5, "vehicles {i} and {j} are {d} m apart");
        }
    }
}

fn centroid(q: &[(f64, f64); 4]) -> (f64, f64) {
    let mut c = (0.0, 0.0);
    for &(x, y) in q {
        c.0 += x / 4.0;
        c.1 += y / 4.0;
    }
    c
}

#[test]
fn infeasible_spec_is_reported() {
    // A tiny map cannot hold 500 non-overlapping vehicles in band.
    let profile = RoadProfile::new(
        ProfileKind::Flat,
        PlanRect {
            x_min: 0.0,
            x_max: 60.0,
            y_min: -4.0,
            y_max: 4.0,
        },
        10.0,
    )
    .unwrap();
    let mut spec = SceneSpec::standard(profile, 500, 2).unwrap();
    spec.range_span = (40.0, 60.0);
    spec.lane_count = 1;
    assert!(matches!(
        generate_scene(&spec),
        Err(SynthError::InfeasibleSpec { .. })
    ));
}

#[test]
fn labels_round_trip_and_alpha_matches_codec() {
    let scene = generate_scene(&flat_spec(20, 11)).unwrap();
    let records = gt_to_labels(&scene);
    let text = write_labels(&records);
    let back = read_labels(Path::new("mem"), &text).unwrap();
    assert_eq!(records, back);
    assert_eq!(text, write_labels(&back));
    for (r, v) in records.iter().zip(&scene.vehicles) {
        let alpha = compute_observation_angle(&v.box3d, &scene.camera).unwrap();
        assert!((r.alpha - alpha).abs() < 1e-9);
        // Labels reconstruct the exact 3D box.
        let b = r.to_box3d().unwrap();
        assert!((b.center - v.box3d.center).norm() < 1e-12);
        assert_eq!(b.size, v.box3d.size);
    }
}

#[test]
fn flat_labels_have_zero_extra_rotations() {
    let scene = generate_scene(&flat_spec(10, 13)).unwrap();
    for r in gt_to_labels(&scene) {
        assert!(r.rotation_x.abs() < 1e-9);
        assert!(r.rotation_z.abs() < 1e-9);
    }
}

#[test]
fn benchmark_suite_shape() {
    let scenes = benchmark(500).unwrap();
    assert_eq!(scenes.len(), 14);
    let total: usize = scenes.iter().map(|s| s.vehicles.len()).sum();
    assert_eq!(total, 700);
    let held_out: Vec<bool> = scenes.iter().map(|s| s.held_out).collect();
    assert_eq!(held_out.iter().filter(|&&h| h).count(), 4);
    // Held-out poses differ from every train pose.
    let centers: Vec<_> = scenes.iter().map(|s| s.camera.center()).collect();
    for i in 0..scenes.len() {
        if !scenes[i].held_out {
            continue;
        }
        for j in 0..scenes.len() {
            if scenes[j].held_out {
                continue;
            }
            assert!((centers[i] - centers[j]).norm() > 1e-6);
        }
    }
    // Population: at least 30 vehicles in every 20 m bin between 40 and 120.
    let mut bins = [0usize; 4];
    for s in &scenes {
        for v in &s.vehicles {
            if v.range >= 40.0 && v.range < 120.0 {
                bins[((v.range - 40.0) / 20.0) as usize] += 1;
            }
        }
    }
    for (i, count) in bins.iter().enumerate() {
        assert!(
            *count >= 30,
            "bin [{}, {}) has only {count} vehicles",
            40 + 20 * i,
            60 + 20 * i
        );
    }
}

#[test]
fn benchmark_is_seed_deterministic() {
    let a = benchmark(1).unwrap();
    let b = benchmark(1).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.vehicles.len(), y.vehicles.len());
        for (u, v) in x.vehicles.iter().zip(&y.vehicles) {
            assert_eq!(u.box3d.center.x.to_bits(), v.box3d.center.x.to_bits());
        }
    }
}

#[test]
fn dataset_round_trip() {
    let dir = std::env::temp_dir().join(format!("urbannet-synth-test-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    let scenes = benchmark_with_profile(21, ProfileKind::Flat, 12).unwrap();
    write_dataset(&scenes, &dir).unwrap();
    let loaded = read_dataset(&dir).unwrap();
    assert_eq!(loaded.len(), scenes.len());
    for (disk, mem) in loaded.iter().zip(&scenes) {
        assert_eq!(disk.held_out, mem.held_out);
        assert_eq!(disk.labels.len(), mem.vehicles.len());
        assert_eq!(disk.camera, mem.camera);
        assert_eq!(disk.tin.vertices().len(), mem.tin.vertices().len());
    }
    // Writing the same suite again is byte-identical.
    let dir2 = dir.with_extension("again");
    let _ = std::fs::remove_dir_all(&dir2);
    write_dataset(&scenes, &dir2).unwrap();
    for entry in ["manifest.txt", "scene_000/labels.txt", "scene_003/map.tin"] {
        let a = std::fs::read(dir.join(entry)).unwrap();
        let b = std::fs::read(dir2.join(entry)).unwrap();
        assert_eq!(a, b, "{entry} differs between identical writes");
    }
    let _ = std::fs::remove_dir_all(&dir);
    let _ = std::fs::remove_dir_all(&dir2);
}

#[test]
fn gt_box_is_keypoint_hull_clipped_to_image() {
    let scene = generate_scene(&flat_spec(20, 15)).unwrap();
    let w = scene.camera.image_width() as f64;
    let h = scene.camera.image_height() as f64;
    for v in &scene.vehicles {
        let mut lo = (f64::INFINITY, f64::INFINITY);
        let mut hi = (f64::NEG_INFINITY, f64::NEG_INFINITY);
        for c in v.box3d.corners() {
            let (u, vv) = scene.camera.project(&c).unwrap();
            lo = (lo.0.min(u), lo.1.min(vv));
            hi = (hi.0.max(u), hi.1.max(vv));
        }
        assert!((v.box2d.u_min - lo.0.max(0.0)).abs() < 1e-9);
        assert!((v.box2d.v_min - lo.1.max(0.0)).abs() < 1e-9);
        assert!((v.box2d.u_max - hi.0.min(w)).abs() < 1e-9);
        assert!((v.box2d.v_max - hi.1.min(h)).abs() < 1e-9);
    }
}
