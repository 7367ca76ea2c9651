//! End-to-end command tests driving the compiled binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_urbannet"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("urbannet-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn generate_small(dir: &Path, seed: u64) {
    let out = run(&[
        "generate",
        "--out",
        dir.to_str().unwrap(),
        "--seed",
        &seed.to_string(),
        "--profile",
        "flat",
        "--vehicles",
        "4",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn usage_errors_exit_one() {
    let out = run(&["lift", "--bogus-flag"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_dataset_is_a_data_error() {
    let out = run(&["eval", "--dataset", "/nonexistent-path", "--self-check"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unwritable_output_leaves_no_manifest() {
    let dir = tmp("unwritable");
    // Descending through a regular file cannot work, root or not.
    fs::write(dir.join("blocker"), b"file").unwrap();
    let target = dir.join("blocker").join("ds");
    let out = run(&[
        "generate",
        "--out",
        target.to_str().unwrap(),
        "--seed",
        "1",
        "--profile",
        "flat",
        "--vehicles",
        "4",
    ]);
    assert!(!out.status.success());
    assert!(!target.join("manifest.txt").exists());
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn generated_dataset_passes_self_check() {
    let dir = tmp("selfcheck");
    let ds = dir.join("ds");
    generate_small(&ds, 7);
    let out = run(&["eval", "--dataset", ds.to_str().unwrap(), "--self-check"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn perfect_lift_scores_unit_ap() {
    let dir = tmp("perfect");
    let ds = dir.join("ds");
    generate_small(&ds, 3);
    let lifted = dir.join("lifted.txt");
    let out = run(&[
        "lift",
        "--dataset",
        ds.to_str().unwrap(),
        "--out",
        lifted.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = dir.join("report");
    let out = run(&[
        "eval",
        "--dataset",
        ds.to_str().unwrap(),
        "--lifted",
        lifted.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(report.join("report.csv")).unwrap();
    assert!(csv.contains("ap,pooled,1\n"), "csv was:\n{csv}");
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn empty_detections_file_lifts_to_empty_output() {
    let dir = tmp("emptydet");
    let ds = dir.join("ds");
    generate_small(&ds, 5);
    let det = dir.join("detections.txt");
    fs::write(&det, "# urbannet-detections v1\n").unwrap();
    let lifted = dir.join("lifted.txt");
    let out = run(&[
        "lift",
        "--dataset",
        ds.to_str().unwrap(),
        "--descriptor-mode",
        "file",
        "--detections",
        det.to_str().unwrap(),
        "--out",
        lifted.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(&lifted).unwrap();
    let data_lines = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .count();
    assert_eq!(data_lines, 0);
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn corrupt_detection_line_is_reported_with_its_number() {
    let dir = tmp("corrupt");
    let ds = dir.join("ds");
    generate_small(&ds, 5);
    let det = dir.join("detections.txt");
    fs::write(&det, "# urbannet-detections v1\n0 Car 1 2 3 4 22 0.5 0.5\n").unwrap();
    let out = run(&[
        "lift",
        "--dataset",
        ds.to_str().unwrap(),
        "--descriptor-mode",
        "file",
        "--detections",
        det.to_str().unwrap(),
        "--out",
        dir.join("l.txt").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(":2:"), "stderr must cite line 2: {err}");
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn ablation_grid_has_the_reference_layout() {
    let dir = tmp("ablate");
    let ds = dir.join("ds");
    generate_small(&ds, 11);
    let out = run(&[
        "ablate",
        "--dataset",
        ds.to_str().unwrap(),
        "--out",
        dir.join("abl").to_str().unwrap(),
        "--oracle-seed",
        "123",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let grid = fs::read_to_string(dir.join("abl/ablation.txt")).unwrap();
    for needle in [
        "Nominal",
        "STD 10cm",
        "STD 40cm",
        "UrbanNet",
        "No driving centerlines",
        "Keypoints at bottom",
    ] {
        assert!(grid.contains(needle), "grid missing '{needle}':\n{grid}");
    }
    assert!(dir.join("abl/bins.svg").exists());
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn inspect_net_reports_the_exact_parameter_count() {
    let t0 = std::time::Instant::now();
    let out = run(&["inspect-net"]);
    let elapsed = t0.elapsed();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("673902"), "{text}");
    assert!(text.contains("conv 393624 + fc 280278"), "{text}");
    assert!(elapsed.as_secs_f64() < 1.0, "inspect-net took {elapsed:?}");
}

#[test]
fn net_descriptor_mode_runs_end_to_end() {
    let dir = tmp("netmode");
    let ds = dir.join("ds");
    generate_small(&ds, 13);
    let weights = dir.join("w.bin");
    let out = run(&[
        "inspect-net",
        "--write-random",
        weights.to_str().unwrap(),
        "--seed",
        "3",
    ]);
    assert!(out.status.success());
    let out = run(&[
        "lift",
        "--dataset",
        ds.to_str().unwrap(),
        "--descriptor-mode",
        "net",
        "--weights",
        weights.to_str().unwrap(),
        "--out",
        dir.join("l.txt").to_str().unwrap(),
    ]);
    // Untrained weights rarely produce liftable descriptors, but the
    // command itself must succeed and write a (possibly empty) file.
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(dir.join("l.txt").exists());
    let _ = fs::remove_dir_all(&dir);
}

fn polyline_points(svg: &str, class: &str) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for line in svg.lines() {
        if !line.contains(&format!("class=\"{class}\"")) {
            continue;
        }
        let Some(start) = line.find("points=\"") else {
            continue;
        };
        let rest = &line[start + 8..];
        let Some(end) = rest.find('"') else { continue };
        for pair in rest[..end].split_whitespace() {
            let (x, y) = pair.split_once(',').unwrap();
            pts.push((x.parse().unwrap(), y.parse().unwrap()));
        }
    }
    pts
}

#[test]
fn perfect_render_overlays_gt_and_prediction_within_a_pixel() {
    let dir = tmp("render");
    let ds = dir.join("ds");
    generate_small(&ds, 17);
    let lifted = dir.join("lifted.txt");
    assert!(run(&[
        "lift",
        "--dataset",
        ds.to_str().unwrap(),
        "--out",
        lifted.to_str().unwrap(),
    ])
    .status
    .success());
    let overlays = dir.join("ov");
    assert!(run(&[
        "render",
        "--dataset",
        ds.to_str().unwrap(),
        "--lifted",
        lifted.to_str().unwrap(),
        "--out",
        overlays.to_str().unwrap(),
    ])
    .status
    .success());
    let svg = fs::read_to_string(overlays.join("scene_000.svg")).unwrap();
    assert!(svg.contains("#00c000"), "ground truth must render green");
    assert!(svg.contains("#e00000"), "predictions must render red");
    let gt = polyline_points(&svg, "gt");
    let pred = polyline_points(&svg, "pred");
    assert_eq!(gt.len(), pred.len(), "same wireframe vertex count");
    assert!(!gt.is_empty());
    for (g, p) in gt.iter().zip(&pred) {
        let d = ((g.0 - p.0).powi(2) + (g.1 - p.1).powi(2)).sqrt();
        assert!(d <= 1.0, "wireframes diverge by {d} px");
    }

    // Ground-truth-only overlay when no lifted file is given.
    let gt_only = dir.join("ov-gt");
    assert!(run(&[
        "render",
        "--dataset",
        ds.to_str().unwrap(),
        "--out",
        gt_only.to_str().unwrap(),
    ])
    .status
    .success());
    let svg = fs::read_to_string(gt_only.join("scene_000.svg")).unwrap();
    assert!(svg.contains("class=\"gt\""));
    assert!(!svg.contains("class=\"pred\""));
    let _ = fs::remove_dir_all(&dir);
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tmp("config");
    let ds = dir.join("ds");
    let conf = dir.join("run.conf");
    fs::write(
        &conf,
        format!(
            "out = {}\nseed = 23\nprofile = flat\nvehicles = 4\n",
            ds.display()
        ),
    )
    .unwrap();
    let out = run(&["generate", "--config", conf.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(ds.join("manifest.txt").exists());

    // A flag overrides the config value: a different output directory.
    let ds2 = dir.join("ds2");
    let out = run(&[
        "generate",
        "--config",
        conf.to_str().unwrap(),
        "--out",
        ds2.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(ds2.join("manifest.txt").exists());
    // Same seed from config: identical manifests.
    assert_eq!(
        fs::read(ds.join("manifest.txt")).unwrap(),
        fs::read(ds2.join("manifest.txt")).unwrap()
    );
    let _ = fs::remove_dir_all(&dir);
}
