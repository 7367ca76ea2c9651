//! Ground-truth label records. Lines follow the KITTI field layout
//! (type, truncation, occlusion, alpha, 2D box, dimensions as h w l,
//! location, rotation_y, score) extended with three trailing attributes:
//! rotation_x, rotation_z and the vehicle model name.
//!
//! Semantics in this artifact's Z-up world frame: `location` is the box
//! centroid in world coordinates; `rotation_y` is the heading (yaw about
//! the vertical), `rotation_x` the nose-up pitch and `rotation_z` the roll.

use std::path::Path;

use crate::descriptor::VehicleClass;
use crate::geometry::{Box2D, Box3D, Dimensions, EulerAngles, WorldPoint};
use crate::io::{self, FormatError};

use super::scene::GtVehicle;

const LABELS_FORMAT: &str = "labels";
const LABELS_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct LabelRecord {
    pub class: VehicleClass,
    pub truncation: f64,
    pub occlusion: u32,
    pub alpha: f64,
    pub box2d: Box2D,
    /// (height, width, length), KITTI dimension order.
    pub dims_hwl: (f64, f64, f64),
    /// Centroid in world coordinates.
    pub location: WorldPoint,
    /// Yaw about the world vertical.
    pub rotation_y: f64,
    pub score: f64,
    /// Nose-up pitch.
    pub rotation_x: f64,
    /// Roll about the forward axis.
    pub rotation_z: f64,
    pub model_name: String,
}

impl LabelRecord {
    pub fn from_vehicle(v: &GtVehicle) -> Self {
        Self {
            class: v.class,
            truncation: v.truncation,
            occlusion: v.occlusion,
            alpha: v.alpha,
            box2d: v.box2d,
            dims_hwl: (v.box3d.size.height, v.box3d.size.width, v.box3d.size.length),
            location: v.box3d.center,
            rotation_y: v.box3d.rotation.yaw,
            score: 1.0,
            rotation_x: v.box3d.rotation.pitch,
            rotation_z: v.box3d.rotation.roll,
            model_name: v.model_name.clone(),
        }
    }

    pub fn to_box3d(&self) -> Result<Box3D, crate::geometry::GeometryError> {
        Box3D::new(
            self.location,
            Dimensions::new(self.dims_hwl.1, self.dims_hwl.2, self.dims_hwl.0)?,
            EulerAngles::new(self.rotation_y, self.rotation_x, self.rotation_z),
        )
    }
}

pub fn write_labels(records: &[LabelRecord]) -> String {
    let mut s = String::new();
    s.push_str(&io::header_line(LABELS_FORMAT, LABELS_VERSION));
    s.push('\n');
    for r in records {
        s.push_str(&format!(
            "{} {} {} {} {} {} {} {} {} {} {} {} {} {} {} {} {} {} {}\n",
            r.class.as_str(),
            r.truncation,
            r.occlusion,
            r.alpha,
            r.box2d.u_min,
            r.box2d.v_min,
            r.box2d.u_max,
            r.box2d.v_max,
            r.dims_hwl.0,
            r.dims_hwl.1,
            r.dims_hwl.2,
            r.location.x,
            r.location.y,
            r.location.z,
            r.rotation_y,
            r.score,
            r.rotation_x,
            r.rotation_z,
            r.model_name,
        ));
    }
    s
}

pub fn read_labels(path: &Path, text: &str) -> Result<Vec<LabelRecord>, FormatError> {
    io::check_header(path, text.lines().next(), LABELS_FORMAT, LABELS_VERSION)?;
    let mut out = Vec::new();
    for (ln, line) in io::data_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 19 {
            return Err(FormatError::parse(
                path,
                ln,
                format!("label needs 19 fields, got {}", toks.len()),
            ));
        }
        let class = VehicleClass::parse(toks[0])
            .ok_or_else(|| FormatError::parse(path, ln, format!("unknown class '{}'", toks[0])))?;
        let f = |i: usize| io::parse_f64(path, ln, toks[i]);
        let box2d = Box2D::new(f(4)?, f(5)?, f(6)?, f(7)?)
            .map_err(|e| FormatError::parse(path, ln, e.to_string()))?;
        out.push(LabelRecord {
            class,
            truncation: f(1)?,
            occlusion: io::parse_usize(path, ln, toks[2])? as u32,
            alpha: f(3)?,
            box2d,
            dims_hwl: (f(8)?, f(9)?, f(10)?),
            location: WorldPoint::new(f(11)?, f(12)?, f(13)?),
            rotation_y: f(14)?,
            score: f(15)?,
            rotation_x: f(16)?,
            rotation_z: f(17)?,
            model_name: toks[18].to_string(),
        });
    }
    Ok(out)
}

/// Label records for a generated scene.
pub fn gt_to_labels(scene: &super::Scene) -> Vec<LabelRecord> {
    scene
        .vehicles
        .iter()
        .map(LabelRecord::from_vehicle)
        .collect()
}

pub fn write_labels_file(path: &Path, records: &[LabelRecord]) -> Result<(), FormatError> {
    io::write_atomic(path, write_labels(records).as_bytes())?;
    Ok(())
}

pub fn read_labels_file(path: &Path) -> Result<Vec<LabelRecord>, FormatError> {
    let text = std::fs::read_to_string(path)?;
    read_labels(path, &text)
}
