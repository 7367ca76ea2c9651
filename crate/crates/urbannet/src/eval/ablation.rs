//! Ablation harness: runs the oracle -> lift -> evaluate pipeline over a
//! benchmark suite under the three setups (full descriptor, no driving
//! centerlines, keypoints at bottom) and the three map-accuracy columns
//! (nominal elevation, 10 cm noise, 40 cm noise), and renders the results
//! as a machine-readable CSV, a text grid and an optional SVG bin plot.

use crate::descriptor::{oracle_descriptor, GroundTruthObject, NoiseSpec, OracleMode};
use crate::geometry::CameraModel;
use crate::lifting::lift;
use crate::synth::{LabelRecord, Scene, SceneFiles};
use crate::tin::{NoiseMode, TinMap};

use super::{evaluate, BinStats, EvalError, EvalFrame, EvalReport, GtBox, MatchConfig, PredBox};

/// How detections are produced and which map the lifter sees.
#[derive(Debug, Clone)]
pub struct PipelineConfig {
    pub oracle: OracleMode,
    /// Emit the reduced 9-element descriptor.
    pub bottom_only: bool,
    /// Zero the lane channel; only network-backed descriptors consume the
    /// lane prior, so oracle runs are unaffected by construction.
    pub zero_centerlines: bool,
    pub map_noise: NoiseMode,
}

/// One scene in the light form the pipeline needs.
#[derive(Debug, Clone)]
pub struct AblationScene {
    pub camera: CameraModel,
    pub tin: TinMap,
    pub objects: Vec<GroundTruthObject>,
}

impl From<&Scene> for AblationScene {
    fn from(s: &Scene) -> Self {
        Self {
            camera: s.camera.clone(),
            tin: s.tin.clone(),
            objects: s
                .vehicles
                .iter()
                .map(|v| GroundTruthObject {
                    class: v.class,
                    box3d: v.box3d,
                    box2d: v.box2d,
                })
                .collect(),
        }
    }
}

impl AblationScene {
    pub fn from_files(s: &SceneFiles) -> Result<Self, crate::geometry::GeometryError> {
        Ok(Self {
            camera: s.camera.clone(),
            tin: s.tin.clone(),
            objects: label_objects(&s.labels)?,
        })
    }
}

pub fn label_objects(
    labels: &[LabelRecord],
) -> Result<Vec<GroundTruthObject>, crate::geometry::GeometryError> {
    labels
        .iter()
        .map(|r| {
            Ok(GroundTruthObject {
                class: r.class,
                box3d: r.to_box3d()?,
                box2d: r.box2d,
            })
        })
        .collect()
}

/// Run the second stage over a suite: oracle detections lifted against the
/// (possibly noise-wrapped) map. Lift failures simply yield no prediction.
pub fn run_pipeline(
    scenes: &[AblationScene],
    cfg: &PipelineConfig,
) -> Result<Vec<EvalFrame>, EvalError> {
    let mut frames = Vec::with_capacity(scenes.len());
    for (idx, scene) in scenes.iter().enumerate() {
        let map = scene
            .tin
            .with_noise(cfg.map_noise)
            .map_err(|e| EvalError::InvalidConfig(e.to_string()))?;
        let detections = oracle_descriptor(
            idx as u64,
            &scene.objects,
            &scene.camera,
            &cfg.oracle,
            cfg.bottom_only,
        )
        .map_err(|e| EvalError::InvalidConfig(e.to_string()))?;
        let mut preds = Vec::with_capacity(detections.len());
        for det in &detections {
            if let Ok(r) = lift(det, &scene.camera, &map) {
                preds.push(PredBox {
                    class: det.class,
                    box3d: r.box3d,
                    confidence: det.confidence,
                });
            }
        }
        frames.push(EvalFrame {
            frame_id: idx as u64,
            camera_center: scene.camera.center(),
            gts: scene
                .objects
                .iter()
                .map(|o| GtBox {
                    class: o.class,
                    box3d: o.box3d,
                })
                .collect(),
            preds,
        });
    }
    Ok(frames)
}

#[derive(Debug, Clone)]
pub struct AblationCell {
    pub setup: String,
    pub column: String,
    pub report: EvalReport,
}

/// Reports for the 3 setups x 3 noise columns grid.
#[derive(Debug, Clone)]
pub struct AblationTable {
    pub columns: Vec<String>,
    pub rows: Vec<String>,
    pub cells: Vec<AblationCell>,
}

impl AblationTable {
    pub fn cell(&self, row: &str, column: &str) -> Option<&AblationCell> {
        self.cells
            .iter()
            .find(|c| c.setup == row && c.column == column)
    }
}

/// Map-accuracy columns: nominal elevation, then 10 cm and 40 cm noise.
fn noise_columns(seed: u64) -> Vec<(String, NoiseMode)> {
    vec![
        ("Nominal".to_string(), NoiseMode::Nominal),
        (
            "STD 10cm".to_string(),
            NoiseMode::ElevationOnly { sigma: 0.1, seed },
        ),
        (
            "STD 40cm".to_string(),
            NoiseMode::ElevationOnly { sigma: 0.4, seed },
        ),
    ]
}

/// Run the full 3x3 ablation grid with a noisy-oracle descriptor.
pub fn run_ablation(
    scenes: &[AblationScene],
    descriptor_noise: &NoiseSpec,
    match_cfg: &MatchConfig,
    map_noise_seed: u64,
) -> Result<AblationTable, EvalError> {
    let setups: [(&str, bool, bool); 3] = [
        ("UrbanNet", false, false),
        ("No driving centerlines", false, true),
        ("Keypoints at bottom", true, false),
    ];
    let columns = noise_columns(map_noise_seed);
    let mut cells = Vec::with_capacity(9);
    for (name, bottom_only, zero_centerlines) in setups {
        for (col_name, mode) in &columns {
            let cfg = PipelineConfig {
                oracle: OracleMode::Noisy(*descriptor_noise),
                bottom_only,
                zero_centerlines,
                map_noise: *mode,
            };
            let frames = run_pipeline(scenes, &cfg)?;
            let report = evaluate(&frames, match_cfg)?;
            cells.push(AblationCell {
                setup: name.to_string(),
                column: col_name.clone(),
                report,
            });
        }
    }
    Ok(AblationTable {
        columns: columns.into_iter().map(|(n, _)| n).collect(),
        rows: setups.iter().map(|(n, _, _)| n.to_string()).collect(),
        cells,
    })
}

fn fmt_ap(ap: Option<f64>) -> String {
    match ap {
        Some(v) => format!("{:.3}%", 100.0 * v),
        None => "-".to_string(),
    }
}

/// Human-readable grid: one row per setup, one column per noise level.
pub fn ablation_grid(table: &AblationTable) -> String {
    let mut s = String::new();
    s.push_str("Average Precision (BEV, IoU 0.5, 40 recall positions)\n");
    s.push_str(&format!("{:<26}", "Setup"));
    for c in &table.columns {
        s.push_str(&format!("{c:>12}"));
    }
    s.push('\n');
    for r in &table.rows {
        s.push_str(&format!("{r:<26}"));
        for c in &table.columns {
            let cell = table.cell(r, c).expect("grid cell");
            s.push_str(&format!("{:>12}", fmt_ap(cell.report.pooled_ap)));
        }
        s.push('\n');
    }
    s
}

/// Machine-readable CSV: one line per cell with AP variants and bin means.
pub fn ablation_csv(table: &AblationTable) -> String {
    let mut s = String::new();
    s.push_str("setup,map_noise,pooled_ap,mean_ap,car_ap,truck_ap");
    if let Some(first) = table.cells.first() {
        for b in &first.report.bins {
            s.push_str(&format!(",iou3d_{:.0}_{:.0}", b.lo, b.hi));
        }
    }
    s.push('\n');
    for cell in &table.cells {
        let r = &cell.report;
        let class_ap = |class: crate::descriptor::VehicleClass| {
            r.per_class_ap
                .iter()
                .find(|(c, _)| *c == class)
                .and_then(|(_, ap)| *ap)
        };
        s.push_str(&format!(
            "{},{},{},{},{},{}",
            cell.setup,
            cell.column,
            csv_opt(r.pooled_ap),
            csv_opt(r.mean_ap),
            csv_opt(class_ap(crate::descriptor::VehicleClass::Car)),
            csv_opt(class_ap(crate::descriptor::VehicleClass::Truck)),
        ));
        for b in &r.bins {
            s.push_str(&format!(",{}", csv_opt(b.mean_iou_3d)));
        }
        s.push('\n');
    }
    s
}

fn csv_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Mean-3D-IoU-by-range plot as a small self-contained SVG. Line colors
/// are fixed: green nominal, orange 10 cm, red 40 cm.
pub fn plot_bins_svg(series: &[(&str, &str, &[BinStats])]) -> String {
    let (w, h, ml, mb) = (640.0, 400.0, 60.0, 40.0);
    let plot_w = w - ml - 20.0;
    let plot_h = h - mb - 20.0;
    let max_range = series
        .iter()
        .flat_map(|(_, _, bins)| bins.iter().map(|b| b.hi))
        .fold(1.0f64, f64::max);
    let x_of = |r: f64| ml + plot_w * r / max_range;
    let y_of = |iou: f64| 20.0 + plot_h * (1.0 - iou);
    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    s.push_str(&format!(
        "<rect x=\"{ml}\" y=\"20\" width=\"{plot_w}\" height=\"{plot_h}\" fill=\"none\" stroke=\"#444\"/>\n"
    ));
    for t in 0..=5 {
        let iou = t as f64 / 5.0;
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{iou:.1}</text>\n",
            ml - 6.0,
            y_of(iou) + 4.0
        ));
    }
    for (label, color, bins) in series {
        let mut pts = Vec::new();
        for b in *bins {
            if let Some(iou) = b.mean_iou_3d {
                pts.push(format!("{:.1},{:.1}", x_of(0.5 * (b.lo + b.hi)), y_of(iou)));
            }
        }
        if !pts.is_empty() {
            s.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"2\" points=\"{}\"/>\n",
                pts.join(" ")
            ));
        }
        let _ = label;
    }
    let mut ly = 36.0;
    for (label, color, _) in series {
        s.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"14\" height=\"3\" fill=\"{color}\"/><text x=\"{}\" y=\"{}\" font-size=\"12\">{label}</text>\n",
            ml + 10.0,
            ly - 4.0,
            ml + 30.0,
            ly
        ));
        ly += 16.0;
    }
    for b_edge in 0..=(max_range / 20.0) as usize {
        let r = 20.0 * b_edge as f64;
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{r:.0}</text>\n",
            x_of(r),
            h - mb + 16.0
        ));
    }
    s.push_str(
        "<text x=\"320\" y=\"395\" font-size=\"12\" text-anchor=\"middle\">range (m)</text>\n",
    );
    s.push_str("</svg>\n");
    s
}
