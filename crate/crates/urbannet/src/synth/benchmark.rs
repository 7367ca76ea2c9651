//! The fixed-seed benchmark suite and its on-disk dataset layout: one
//! directory per scene (camera, TIN mesh, lanes, labels) plus an index
//! manifest at the root. Five train-style camera poses and two held-out
//! poses, vehicles distributed over 40-160 m.

use std::fs;
use std::path::{Path, PathBuf};

use crate::geometry::CameraModel;
use crate::io::{self, FormatError};
use crate::lanes::LaneMap;
use crate::seeded;
use crate::tin::TinMap;

use super::labels::{gt_to_labels, read_labels_file, write_labels_file, LabelRecord};
use super::profile::{PlanRect, ProfileKind, RoadProfile};
use super::scene::{generate_scene_inner, paper_camera, Scene, SceneSpec};
use super::SynthError;

const MANIFEST_FORMAT: &str = "dataset";
const MANIFEST_VERSION: u32 = 1;

/// Camera pose variations: (height above ground, pitch-down degrees,
/// lateral offset). The first five are the train-style installations, the
/// last two are held out.
const POSES: [(f64, f64, f64); 7] = [
    (11.0, 6.0, 0.0),
    (10.5, 5.5, 1.5),
    (11.5, 6.5, -1.5),
    (12.0, 7.0, 2.5),
    (10.0, 5.0, -2.5),
    (11.2, 6.2, 0.8),
    (10.8, 5.8, -0.8),
];
const HELD_OUT_FROM: usize = 5;

fn default_extent() -> PlanRect {
    PlanRect {
        x_min: 0.0,
        x_max: 175.0,
        y_min: -21.0,
        y_max: 21.0,
    }
}

/// Per-scene profile cycle for the mixed default suite. Grades use shorter
/// range spans where the up-slope leaves the field of view.
fn default_profiles() -> Vec<(ProfileKind, f64, (f64, f64))> {
    vec![
        (ProfileKind::Flat, 10.0, (40.0, 160.0)),
        (ProfileKind::Grade { slope: 0.05 }, 10.0, (40.0, 140.0)),
        (ProfileKind::Grade { slope: -0.06 }, 10.0, (40.0, 160.0)),
        (ProfileKind::Crest { curvature: 0.001 }, 12.0, (40.0, 140.0)),
        // A sag bowl hides the near field below the image bottom.
        (ProfileKind::Sag { curvature: 0.001 }, 12.0, (70.0, 140.0)),
        (
            ProfileKind::Banked { cross_slope: 0.05 },
            10.0,
            (40.0, 160.0),
        ),
        (ProfileKind::Flat, 10.0, (40.0, 160.0)),
    ]
}

/// Scenes in the standard suite: each of the 7 poses appears twice.
const SUITE_SCENES: usize = 14;
/// Vehicles per scene in the standard suite (~700 total).
const SUITE_VEHICLES: usize = 50;

/// Build the standard suite (14 scenes, ~700 vehicles) with mixed profiles.
/// Each camera pose serves two scenes; the two held-out poses close the
/// cycle.
pub fn benchmark(seed: u64) -> Result<Vec<Scene>, SynthError> {
    let profiles: Vec<_> = default_profiles()
        .into_iter()
        .cycle()
        .take(SUITE_SCENES)
        .collect();
    build_suite(seed, &profiles, SUITE_VEHICLES)
}

/// A suite in which every scene uses the same profile kind; used by the
/// pipeline round-trip checks.
pub fn benchmark_with_profile(
    seed: u64,
    kind: ProfileKind,
    vehicles_per_scene: usize,
) -> Result<Vec<Scene>, SynthError> {
    let spacing = match kind {
        ProfileKind::Crest { .. } | ProfileKind::Sag { .. } => 12.0,
        _ => 10.0,
    };
    let span = match kind {
        ProfileKind::Grade { slope } if slope > 0.06 => (40.0, 120.0),
        ProfileKind::Grade { slope } if slope > 0.0 => (40.0, 140.0),
        ProfileKind::Sag { .. } => (70.0, 140.0),
        ProfileKind::Crest { .. } => (40.0, 140.0),
        _ => (40.0, 160.0),
    };
    let profiles: Vec<(ProfileKind, f64, (f64, f64))> =
        (0..SUITE_SCENES).map(|_| (kind, spacing, span)).collect();
    build_suite(seed, &profiles, vehicles_per_scene)
}

fn build_suite(
    seed: u64,
    profiles: &[(ProfileKind, f64, (f64, f64))],
    vehicles_per_scene: usize,
) -> Result<Vec<Scene>, SynthError> {
    let mut scenes = Vec::with_capacity(profiles.len());
    for (i, (kind, spacing, span)) in profiles.iter().enumerate() {
        let pose = POSES[i % POSES.len()];
        let profile = RoadProfile::new(*kind, default_extent(), *spacing)?;
        let camera = paper_camera(&profile, -1.0, pose.2, pose.0, pose.1.to_radians())?;
        let spec = SceneSpec {
            profile,
            camera,
            lane_count: 6,
            vehicle_count: vehicles_per_scene,
            range_span: *span,
            truck_fraction: 0.3,
            heading_jitter: 3.0_f64.to_radians(),
            seed: seeded::mix_words(&[seed, i as u64]),
        };
        scenes.push(generate_scene_inner(
            &spec,
            i as u64,
            i % POSES.len() >= HELD_OUT_FROM,
        )?);
    }
    Ok(scenes)
}

/// A scene as stored on disk.
#[derive(Debug)]
pub struct SceneFiles {
    pub name: String,
    pub held_out: bool,
    pub camera: CameraModel,
    pub tin: TinMap,
    pub lanes: LaneMap,
    pub labels: Vec<LabelRecord>,
}

/// Write a suite under `root`: per-scene directories first, the manifest
/// last (atomically), so a partial write never leaves a readable dataset.
pub fn write_dataset(scenes: &[Scene], root: &Path) -> Result<(), SynthError> {
    fs::create_dir_all(root).map_err(FormatError::Io)?;
    let mut manifest = String::new();
    manifest.push_str(&io::header_line(MANIFEST_FORMAT, MANIFEST_VERSION));
    manifest.push('\n');
    manifest.push_str(&format!("scenes {}\n", scenes.len()));
    for (i, scene) in scenes.iter().enumerate() {
        let name = format!("scene_{i:03}");
        let dir = root.join(&name);
        fs::create_dir_all(&dir).map_err(FormatError::Io)?;
        scene.camera.write_file(&dir.join("camera.txt"))?;
        scene.tin.write_file(&dir.join("map.tin"))?;
        scene.lanes.write_file(&dir.join("lanes.txt"))?;
        write_labels_file(&dir.join("labels.txt"), &gt_to_labels(scene))?;
        manifest.push_str(&format!(
            "scene {name} {}\n",
            if scene.held_out { 1 } else { 0 }
        ));
    }
    io::write_atomic(&root.join("manifest.txt"), manifest.as_bytes()).map_err(FormatError::Io)?;
    Ok(())
}

/// Load every scene listed in the manifest.
pub fn read_dataset(root: &Path) -> Result<Vec<SceneFiles>, FormatError> {
    let manifest_path = root.join("manifest.txt");
    let text = fs::read_to_string(&manifest_path)?;
    io::check_header(
        &manifest_path,
        text.lines().next(),
        MANIFEST_FORMAT,
        MANIFEST_VERSION,
    )?;
    let mut out = Vec::new();
    for (ln, line) in io::data_lines(&text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "scenes" => {}
            "scene" => {
                if toks.len() != 3 {
                    return Err(FormatError::parse(
                        &manifest_path,
                        ln,
                        "scene entries need a name and a held-out flag",
                    ));
                }
                let name = toks[1].to_string();
                let held_out = toks[2] == "1";
                let dir = scene_dir(root, &name, &manifest_path, ln)?;
                out.push(SceneFiles {
                    held_out,
                    camera: CameraModel::read_file(&dir.join("camera.txt"))?,
                    tin: TinMap::read_file(&dir.join("map.tin"))?,
                    lanes: LaneMap::read_file(&dir.join("lanes.txt"))?,
                    labels: read_labels_file(&dir.join("labels.txt"))?,
                    name,
                });
            }
            other => {
                return Err(FormatError::parse(
                    &manifest_path,
                    ln,
                    format!("unknown manifest record '{other}'"),
                ));
            }
        }
    }
    Ok(out)
}

fn scene_dir(
    root: &Path,
    name: &str,
    manifest: &Path,
    line: usize,
) -> Result<PathBuf, FormatError> {
    // Scene names come from the manifest; keep them inside the dataset root.
    if name.contains('/') || name.contains('\\') || name.contains("..") {
        return Err(FormatError::parse(
            manifest,
            line,
            format!("invalid scene name '{name}'"),
        ));
    }
    Ok(root.join(name))
}
