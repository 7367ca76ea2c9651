//! Evaluation: exact rotated 3D IoU, BEV IoU, average precision sampled at
//! 40 recall positions, range-binned mean IoU, and the ablation harness.

mod ablation;
mod bev;
mod iou3d;

pub use ablation::{
    ablation_csv, ablation_grid, label_objects, plot_bins_svg, run_ablation, run_pipeline,
    AblationCell, AblationScene, AblationTable, PipelineConfig,
};
pub use bev::{bev_footprint, convex_hull, iou_bev, polygon_area, sutherland_hodgman};
pub use iou3d::{intersection_volume, iou_3d};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::descriptor::VehicleClass;
use crate::geometry::{Box3D, WorldPoint};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("invalid evaluation config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricSpace {
    Bev,
    ThreeD,
}

/// Matching and reporting configuration.
#[derive(Debug, Clone)]
pub struct MatchConfig {
    pub iou_threshold: f64,
    pub recall_positions: usize,
    pub metric_space: MetricSpace,
    /// Range-bin edges in meters, strictly increasing; bins are right-open.
    pub range_bins: Vec<f64>,
    /// Evaluate BEV overlap on yaw-only rectangles instead of corner hulls.
    pub bev_yaw_only: bool,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            iou_threshold: 0.5,
            recall_positions: 40,
            metric_space: MetricSpace::Bev,
            range_bins: (0..=8).map(|i| 20.0 * i as f64).collect(),
            bev_yaw_only: false,
        }
    }
}

impl MatchConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        if !(self.iou_threshold > 0.0 && self.iou_threshold <= 1.0) {
            return Err(EvalError::InvalidConfig(format!(
                "IoU threshold {} outside (0, 1]",
                self.iou_threshold
            )));
        }
        if self.recall_positions < 1 {
            return Err(EvalError::InvalidConfig(
                "recall_positions must be >= 1".into(),
            ));
        }
        if self.range_bins.len() < 2 || self.range_bins.windows(2).any(|w| w[1] <= w[0]) {
            return Err(EvalError::InvalidConfig(
                "range bins need at least two strictly increasing edges".into(),
            ));
        }
        Ok(())
    }
}

/// One labeled object for evaluation.
#[derive(Debug, Clone)]
pub struct GtBox {
    pub class: VehicleClass,
    pub box3d: Box3D,
}

/// One prediction for evaluation.
#[derive(Debug, Clone)]
pub struct PredBox {
    pub class: VehicleClass,
    pub box3d: Box3D,
    pub confidence: f64,
}

/// Ground truth and predictions for one image.
#[derive(Debug, Clone)]
pub struct EvalFrame {
    pub frame_id: u64,
    pub camera_center: WorldPoint,
    pub gts: Vec<GtBox>,
    pub preds: Vec<PredBox>,
}

/// A confirmed match, kept for range-binned statistics and overlays.
#[derive(Debug, Clone, Copy)]
pub struct MatchRecord {
    pub frame_idx: usize,
    pub gt_idx: usize,
    pub pred_idx: usize,
    /// IoU in the matching metric space.
    pub match_iou: f64,
    /// Exact 3D IoU of the pair (used for binned means).
    pub iou_3d: f64,
    /// Euclidean camera-to-GT-centroid distance.
    pub gt_range: f64,
}

#[derive(Debug, Clone)]
pub struct BinStats {
    pub lo: f64,
    pub hi: f64,
    /// Mean 3D IoU over matched pairs whose GT range falls in the bin;
    /// absent when the bin holds no matches.
    pub mean_iou_3d: Option<f64>,
    pub tp: usize,
    pub fp: usize,
    pub missed: usize,
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    /// AP per class; absent (not zero) for classes with no ground truth.
    pub per_class_ap: Vec<(VehicleClass, Option<f64>)>,
    /// Mean over classes with defined AP.
    pub mean_ap: Option<f64>,
    /// Class-agnostic AP over all vehicles pooled.
    pub pooled_ap: Option<f64>,
    pub bins: Vec<BinStats>,
    pub matches: Vec<MatchRecord>,
    pub total_gt: usize,
    pub total_pred: usize,
}

/// Greedy confidence-ordered matching for one class selector; returns the
/// interpolated AP (None if no ground truth) and the match records.
fn match_and_ap(
    frames: &[EvalFrame],
    class: Option<VehicleClass>,
    cfg: &MatchConfig,
) -> (Option<f64>, Vec<MatchRecord>) {
    let selected = |c: VehicleClass| class.is_none_or(|want| want == c);
    let total_gt: usize = frames
        .iter()
        .map(|f| f.gts.iter().filter(|g| selected(g.class)).count())
        .sum();
    if total_gt == 0 {
        return (None, Vec::new());
    }

    // All detections, highest confidence first; ties break on (frame, index)
    // for bit-stable reports.
    let mut dets: Vec<(usize, usize, f64)> = Vec::new();
    for (fi, f) in frames.iter().enumerate() {
        for (di, p) in f.preds.iter().enumerate() {
            if selected(p.class) {
                dets.push((fi, di, p.confidence));
            }
        }
    }
    dets.sort_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .unwrap()
            .then(a.0.cmp(&b.0))
            .then(a.1.cmp(&b.1))
    });

    let mut gt_used: Vec<Vec<bool>> = frames.iter().map(|f| vec![false; f.gts.len()]).collect();
    let mut matches = Vec::new();
    let mut tp_flags = Vec::with_capacity(dets.len());
    for &(fi, di, _) in &dets {
        let frame = &frames[fi];
        let pred = &frame.preds[di];
        let mut best: Option<(usize, f64)> = None;
        for (gi, gt) in frame.gts.iter().enumerate() {
            if gt_used[fi][gi] || !selected(gt.class) {
                continue;
            }
            if class.is_none() || gt.class == pred.class {
                let iou = match cfg.metric_space {
                    MetricSpace::Bev => iou_bev(&pred.box3d, &gt.box3d, cfg.bev_yaw_only),
                    MetricSpace::ThreeD => iou_3d(&pred.box3d, &gt.box3d),
                };
                if iou >= cfg.iou_threshold {
                    // Ties on IoU resolve to the lowest GT index.
                    let better = match best {
                        None => true,
                        Some((_, bi)) => iou > bi,
                    };
                    if better {
                        best = Some((gi, iou));
                    }
                }
            }
        }
        match best {
            Some((gi, iou)) => {
                gt_used[fi][gi] = true;
                tp_flags.push(true);
                matches.push(MatchRecord {
                    frame_idx: fi,
                    gt_idx: gi,
                    pred_idx: di,
                    match_iou: iou,
                    iou_3d: iou_3d(&pred.box3d, &frame.gts[gi].box3d),
                    gt_range: (frame.gts[gi].box3d.center - frame.camera_center).norm(),
                });
            }
            None => tp_flags.push(false),
        }
    }

    // Interpolated precision sampled at k/R for k = 1..=R.
    let mut precisions = Vec::with_capacity(tp_flags.len());
    let mut recalls = Vec::with_capacity(tp_flags.len());
    let mut tp = 0usize;
    for (i, &is_tp) in tp_flags.iter().enumerate() {
        if is_tp {
            tp += 1;
        }
        precisions.push(tp as f64 / (i + 1) as f64);
        recalls.push(tp as f64 / total_gt as f64);
    }
    let r_count = cfg.recall_positions;
    let mut ap_sum = 0.0;
    for k in 1..=r_count {
        let r = k as f64 / r_count as f64;
        let p = precisions
            .iter()
            .zip(&recalls)
            .filter(|(_, &rec)| rec >= r - 1e-12)
            .map(|(&p, _)| p)
            .fold(0.0f64, f64::max);
        ap_sum += p;
    }
    (Some(ap_sum / r_count as f64), matches)
}

/// Evaluate predictions against ground truth: per-class and pooled AP plus
/// range-binned mean 3D IoU over the pooled matches.
pub fn evaluate(frames: &[EvalFrame], cfg: &MatchConfig) -> Result<EvalReport, EvalError> {
    cfg.validate()?;
    let mut per_class_ap = Vec::new();
    for class in VehicleClass::ALL {
        let (ap, _) = match_and_ap(frames, Some(class), cfg);
        per_class_ap.push((class, ap));
    }
    let defined: Vec<f64> = per_class_ap.iter().filter_map(|(_, ap)| *ap).collect();
    let mean_ap = if defined.is_empty() {
        None
    } else {
        Some(defined.iter().sum::<f64>() / defined.len() as f64)
    };
    let (pooled_ap, matches) = match_and_ap(frames, None, cfg);

    let bins = binned_iou(&matches, frames, &cfg.range_bins);

    Ok(EvalReport {
        per_class_ap,
        mean_ap,
        pooled_ap,
        total_gt: frames.iter().map(|f| f.gts.len()).sum(),
        total_pred: frames.iter().map(|f| f.preds.len()).sum(),
        bins,
        matches,
    })
}

/// Per-bin mean 3D IoU plus TP/FP/missed counts. Bins are right-open; FP
/// ranges use the predicted centroid (false positives have no GT).
fn binned_iou(matches: &[MatchRecord], frames: &[EvalFrame], edges: &[f64]) -> Vec<BinStats> {
    let mut bins: Vec<BinStats> = edges
        .windows(2)
        .map(|w| BinStats {
            lo: w[0],
            hi: w[1],
            mean_iou_3d: None,
            tp: 0,
            fp: 0,
            missed: 0,
        })
        .collect();
    let locate = |range: f64| -> Option<usize> {
        edges.windows(2).position(|w| range >= w[0] && range < w[1])
    };
    let mut sums: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    let mut matched_gt: Vec<Vec<bool>> = frames.iter().map(|f| vec![false; f.gts.len()]).collect();
    let mut matched_pred: Vec<Vec<bool>> =
        frames.iter().map(|f| vec![false; f.preds.len()]).collect();
    for m in matches {
        matched_gt[m.frame_idx][m.gt_idx] = true;
        matched_pred[m.frame_idx][m.pred_idx] = true;
        if let Some(b) = locate(m.gt_range) {
            bins[b].tp += 1;
            let e = sums.entry(b).or_insert((0.0, 0));
            e.0 += m.iou_3d;
            e.1 += 1;
        }
    }
    for (fi, f) in frames.iter().enumerate() {
        for (gi, g) in f.gts.iter().enumerate() {
            if !matched_gt[fi][gi] {
                if let Some(b) = locate((g.box3d.center - f.camera_center).norm()) {
                    bins[b].missed += 1;
                }
            }
        }
        for (pi, p) in f.preds.iter().enumerate() {
            if !matched_pred[fi][pi] {
                if let Some(b) = locate((p.box3d.center - f.camera_center).norm()) {
                    bins[b].fp += 1;
                }
            }
        }
    }
    for (b, (sum, n)) in sums {
        bins[b].mean_iou_3d = Some(sum / n as f64);
    }
    bins
}
