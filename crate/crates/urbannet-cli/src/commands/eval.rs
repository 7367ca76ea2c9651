use std::path::PathBuf;

use clap::Parser;

use urbannet::eval::{
    evaluate, label_objects, plot_bins_svg, EvalFrame, EvalReport, GtBox, MatchConfig, MetricSpace,
    PredBox,
};
use urbannet::synth::SceneFiles;

use crate::config::ConfigFile;
use crate::records::LiftedRecord;
use crate::CliError;

#[derive(Parser)]
pub struct Args {
    /// Dataset directory with ground truth
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Lifted-records file to score
    #[arg(long)]
    lifted: Option<PathBuf>,
    /// Output directory for report.txt / report.csv
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a mean-IoU-by-range plot (bins.svg)
    #[arg(long)]
    svg: bool,
    /// Matching metric: bev | 3d
    #[arg(long)]
    metric: Option<String>,
    /// Matching IoU threshold
    #[arg(long)]
    iou_threshold: Option<f64>,
    /// Recall sample positions for AP
    #[arg(long)]
    recall_positions: Option<usize>,
    /// Use yaw-only rectangles for BEV overlap
    #[arg(long)]
    yaw_only_bev: bool,
    /// Only validate the dataset (labels parse, boxes inside the image)
    #[arg(long)]
    self_check: bool,
    /// Config file with `key = value` lines (flags win)
    #[arg(long)]
    config: Option<PathBuf>,
}

fn self_check(scenes: &[SceneFiles]) -> Result<(), CliError> {
    for scene in scenes {
        let objects = label_objects(&scene.labels).map_err(|e| {
            CliError::Data(format!("scene {}: labels do not parse: {e}", scene.name))
        })?;
        let w = scene.camera.image_width() as f64;
        let h = scene.camera.image_height() as f64;
        for (i, o) in objects.iter().enumerate() {
            let b = &o.box2d;
            if b.u_min < -1e-6 || b.v_min < -1e-6 || b.u_max > w + 1e-6 || b.v_max > h + 1e-6 {
                return Err(CliError::Data(format!(
                    "scene {} object {i}: 2D box outside the image",
                    scene.name
                )));
            }
            scene.camera.project(&o.box3d.center).map_err(|_| {
                CliError::Data(format!(
                    "scene {} object {i}: centroid behind the camera",
                    scene.name
                ))
            })?;
        }
    }
    Ok(())
}

pub fn build_frames(
    scenes: &[SceneFiles],
    lifted: &[LiftedRecord],
) -> Result<Vec<EvalFrame>, CliError> {
    let mut frames = Vec::with_capacity(scenes.len());
    for (idx, scene) in scenes.iter().enumerate() {
        let gts = label_objects(&scene.labels)
            .map_err(|e| CliError::Data(e.to_string()))?
            .into_iter()
            .map(|o| GtBox {
                class: o.class,
                box3d: o.box3d,
            })
            .collect();
        let preds = lifted
            .iter()
            .filter(|r| r.frame == idx as u64)
            .map(|r| PredBox {
                class: r.class,
                box3d: r.box3d,
                confidence: r.confidence,
            })
            .collect();
        frames.push(EvalFrame {
            frame_id: idx as u64,
            camera_center: scene.camera.center(),
            gts,
            preds,
        });
    }
    Ok(frames)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into())
}

pub fn report_text(report: &EvalReport) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "objects: {} ground truth, {} predictions, {} matched\n",
        report.total_gt,
        report.total_pred,
        report.matches.len()
    ));
    s.push_str(&format!(
        "AP (pooled, all vehicles): {}\n",
        fmt_opt(report.pooled_ap)
    ));
    s.push_str(&format!(
        "AP (class mean):           {}\n",
        fmt_opt(report.mean_ap)
    ));
    for (class, ap) in &report.per_class_ap {
        s.push_str(&format!(
            "AP ({}):{}{}\n",
            class.as_str(),
            " ".repeat(18 - class.as_str().len()),
            fmt_opt(*ap)
        ));
    }
    s.push_str("\nrange bin (m)   mean 3D IoU      TP      FP  missed\n");
    for b in &report.bins {
        s.push_str(&format!(
            "[{:>3.0}, {:>3.0})     {:>11} {:>7} {:>7} {:>7}\n",
            b.lo,
            b.hi,
            fmt_opt(b.mean_iou_3d),
            b.tp,
            b.fp,
            b.missed
        ));
    }
    s
}

pub fn report_csv(report: &EvalReport) -> String {
    let mut s = String::from("kind,key,value\n");
    s.push_str(&format!("ap,pooled,{}\n", csv_opt(report.pooled_ap)));
    s.push_str(&format!("ap,mean,{}\n", csv_opt(report.mean_ap)));
    for (class, ap) in &report.per_class_ap {
        s.push_str(&format!("ap,{},{}\n", class.as_str(), csv_opt(*ap)));
    }
    s.push_str(&format!("count,gt,{}\n", report.total_gt));
    s.push_str(&format!("count,pred,{}\n", report.total_pred));
    s.push_str(&format!("count,matched,{}\n", report.matches.len()));
    for b in &report.bins {
        s.push_str(&format!(
            "bin,{:.0}-{:.0},{}\n",
            b.lo,
            b.hi,
            csv_opt(b.mean_iou_3d)
        ));
    }
    s
}

fn csv_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn run(args: Args) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let dataset: PathBuf = cfg
        .resolve_opt(args.dataset, "dataset")?
        .ok_or_else(|| CliError::Usage("eval needs --dataset".into()))?;
    let scenes = super::load_dataset(&dataset)?;

    if args.self_check {
        self_check(&scenes)?;
        println!("self-check passed: {} scenes", scenes.len());
        return Ok(());
    }

    let lifted_path: PathBuf = cfg
        .resolve_opt(args.lifted, "lifted")?
        .ok_or_else(|| CliError::Usage("eval needs --lifted (or --self-check)".into()))?;
    let out: PathBuf = cfg
        .resolve_opt(args.out, "out")?
        .ok_or_else(|| CliError::Usage("eval needs --out".into()))?;
    let metric = cfg.resolve(args.metric, "metric", "bev".to_string())?;
    let mut match_cfg = MatchConfig {
        metric_space: match metric.as_str() {
            "bev" => MetricSpace::Bev,
            "3d" => MetricSpace::ThreeD,
            other => return Err(CliError::Usage(format!("unknown metric '{other}'"))),
        },
        iou_threshold: cfg.resolve(args.iou_threshold, "iou-threshold", 0.5)?,
        recall_positions: cfg.resolve(args.recall_positions, "recall-positions", 40)?,
        ..MatchConfig::default()
    };
    match_cfg.bev_yaw_only = cfg.resolve_bool(args.yaw_only_bev, "yaw-only-bev")?;
    match_cfg
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let lifted = super::lift::read_lifted_file(&lifted_path)?;
    let frames = build_frames(&scenes, &lifted)?;
    let report = evaluate(&frames, &match_cfg).map_err(|e| CliError::Data(e.to_string()))?;

    super::write_output(&out.join("report.txt"), report_text(&report).as_bytes())?;
    super::write_output(&out.join("report.csv"), report_csv(&report).as_bytes())?;
    if args.svg || cfg.resolve_bool(false, "svg")? {
        let svg = plot_bins_svg(&[("mean 3D IoU", "#2a9d2a", &report.bins)]);
        super::write_output(&out.join("bins.svg"), svg.as_bytes())?;
    }
    println!("{}", report_text(&report));
    Ok(())
}
