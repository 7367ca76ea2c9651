use std::path::PathBuf;

use clap::Parser;

use urbannet::eval::label_objects;
use urbannet::geometry::{Box3D, CameraModel};
use urbannet::synth::SceneFiles;

use crate::config::ConfigFile;
use crate::records::LiftedRecord;
use crate::CliError;

#[derive(Parser)]
pub struct Args {
    /// Dataset directory
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Lifted-records file; omit for a ground-truth-only overlay
    #[arg(long)]
    lifted: Option<PathBuf>,
    /// Output directory for per-scene SVG overlays
    #[arg(long)]
    out: Option<PathBuf>,
    /// Config file with `key = value` lines (flags win)
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Wireframe edges of a projected box: bottom cycle, top cycle, verticals.
fn wireframe(b: &Box3D, cam: &CameraModel) -> Option<Vec<Vec<(f64, f64)>>> {
    let corners = b.corners();
    let mut px = Vec::with_capacity(8);
    for c in &corners[..8] {
        px.push(cam.project(c).ok()?);
    }
    let cycle = |idx: [usize; 5]| idx.iter().map(|&i| px[i]).collect::<Vec<_>>();
    let mut lines = vec![cycle([0, 1, 2, 3, 0]), cycle([4, 5, 6, 7, 4])];
    for i in 0..4 {
        lines.push(vec![px[i], px[i + 4]]);
    }
    Some(lines)
}

fn polyline(points: &[(f64, f64)], class: &str, color: &str) -> String {
    let pts: Vec<String> = points
        .iter()
        .map(|(u, v)| format!("{u:.2},{v:.2}"))
        .collect();
    format!(
        "<polyline class=\"{class}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n",
        pts.join(" ")
    )
}

pub fn scene_svg(scene: &SceneFiles, preds: &[&LiftedRecord]) -> Result<String, CliError> {
    let w = scene.camera.image_width();
    let h = scene.camera.image_height();
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {w} {h}\">\n",
        w / 3,
        h / 3
    ));
    s.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\" fill=\"#101010\" stroke=\"#888\"/>\n"
    ));
    // Ground truth in green, predictions in red.
    let objects = label_objects(&scene.labels).map_err(|e| CliError::Data(e.to_string()))?;
    for o in &objects {
        if let Some(lines) = wireframe(&o.box3d, &scene.camera) {
            for l in lines {
                s.push_str(&polyline(&l, "gt", "#00c000"));
            }
        }
    }
    for r in preds {
        if let Some(lines) = wireframe(&r.box3d, &scene.camera) {
            for l in lines {
                s.push_str(&polyline(&l, "pred", "#e00000"));
            }
        }
    }
    s.push_str("</svg>\n");
    Ok(s)
}

pub fn run(args: Args) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let dataset: PathBuf = cfg
        .resolve_opt(args.dataset, "dataset")?
        .ok_or_else(|| CliError::Usage("render needs --dataset".into()))?;
    let out: PathBuf = cfg
        .resolve_opt(args.out, "out")?
        .ok_or_else(|| CliError::Usage("render needs --out".into()))?;
    let lifted = match cfg.resolve_opt::<PathBuf>(args.lifted, "lifted")? {
        Some(p) => super::lift::read_lifted_file(&p)?,
        None => Vec::new(),
    };
    let scenes = super::load_dataset(&dataset)?;
    for (idx, scene) in scenes.iter().enumerate() {
        let preds: Vec<&LiftedRecord> = lifted.iter().filter(|r| r.frame == idx as u64).collect();
        let svg = scene_svg(scene, &preds)?;
        super::write_output(&out.join(format!("{}.svg", scene.name)), svg.as_bytes())?;
    }
    println!("rendered {} overlays into {}", scenes.len(), out.display());
    Ok(())
}
