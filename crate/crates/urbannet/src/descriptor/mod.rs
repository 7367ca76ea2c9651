//! The 3D object descriptor codec: input snippet preprocessing, keypoint
//! normalization relative to the tight 2D box, the 22-element output vector
//! (9 keypoint pairs, scaled dimensions, normalized observation angle), the
//! reduced bottom-only vector, and oracle descriptors that stand in for a
//! trained network.

mod oracle;
mod snippet;

pub use oracle::{oracle_descriptor, NoiseSpec, OracleMode};
pub use snippet::SnippetSpec;

use std::path::Path;

use crate::geometry::{Box2D, Box3D, CameraModel, GeometryError, Vec3};
use crate::io::{self, FormatError};

const DETECTIONS_FORMAT: &str = "detections";
const DETECTIONS_VERSION: u32 = 1;

/// Dimensions in the output vector are divided by this (meters).
pub const DIM_SCALE: f64 = 10.0;
/// Snippet edge length in pixels.
pub const SNIPPET_SIZE: u32 = 128;
/// Number of scalars in the full descriptor vector.
pub const FULL_LEN: usize = 22;
/// Number of scalars in the reduced bottom-only vector.
pub const BOTTOM_LEN: usize = 9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VehicleClass {
    Car,
    Truck,
}

impl VehicleClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            VehicleClass::Car => "Car",
            VehicleClass::Truck => "Truck",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "Car" => Some(VehicleClass::Car),
            "Truck" => Some(VehicleClass::Truck),
            _ => None,
        }
    }

    pub const ALL: [VehicleClass; 2] = [VehicleClass::Car, VehicleClass::Truck];
}

/// Normalize an image keypoint against a tight 2D box: offsets from the box
/// center, both axes divided by the box WIDTH. Values may leave [-0.5, 0.5]
/// when the keypoint falls outside the snippet.
pub fn normalize_keypoint(kp: (f64, f64), box2d: &Box2D) -> (f64, f64) {
    let (cu, cv) = box2d.center();
    let w = box2d.width();
    ((kp.0 - cu) / w, (kp.1 - cv) / w)
}

pub fn denormalize_keypoint(norm: (f64, f64), box2d: &Box2D) -> (f64, f64) {
    let (cu, cv) = box2d.center();
    let w = box2d.width();
    (norm.0 * w + cu, norm.1 * w + cv)
}

/// Map an observation angle from [-pi, pi] to [0, 1].
pub fn alpha_to_norm(alpha: f64) -> f64 {
    (alpha + std::f64::consts::PI) / std::f64::consts::TAU
}

pub fn norm_to_alpha(norm: f64) -> f64 {
    norm * std::f64::consts::TAU - std::f64::consts::PI
}

/// Signed angle between the camera-center-to-centroid ray and the object's X
/// axis, both projected into the camera XZ plane.
///
/// Angles in that plane are measured from +Z toward +X, so an object rotated
/// by delta about the camera Y axis (while on the optical axis) shifts alpha
/// by -delta.
pub fn compute_observation_angle(
    box3d: &Box3D,
    camera: &CameraModel,
) -> Result<f64, GeometryError> {
    let centroid_cam = camera.to_camera_frame(&box3d.center);
    let x_axis_cam = camera.rotation() * (box3d.rotation_matrix() * Vec3::x());
    let ray = (centroid_cam.x, centroid_cam.z);
    let obj = (x_axis_cam.x, x_axis_cam.z);
    if (ray.0 * ray.0 + ray.1 * ray.1).sqrt() < 1e-9 {
        return Err(GeometryError::Degenerate(
            "centroid ray projects to zero in the camera XZ plane".into(),
        ));
    }
    if (obj.0 * obj.0 + obj.1 * obj.1).sqrt() < 1e-9 {
        return Err(GeometryError::Degenerate(
            "object X axis projects to zero in the camera XZ plane".into(),
        ));
    }
    Ok(crate::geometry::wrap_angle(
        ray.0.atan2(ray.1) - obj.0.atan2(obj.1),
    ))
}

/// The full 22-element descriptor: 9 normalized keypoint pairs in canonical
/// corner order (centroid last), dimensions (w, l, h) divided by 10, and the
/// normalized observation angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DescriptorOutput {
    pub keypoints_norm: [(f64, f64); 9],
    pub dims_scaled: (f64, f64, f64),
    pub alpha_norm: f64,
}

/// Reduced "keypoints at bottom" vector: the 4 bottom keypoint pairs plus
/// height/10 (9 elements).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BottomDescriptor {
    pub keypoints_norm: [(f64, f64); 4],
    pub height_scaled: f64,
}

/// Either descriptor layout; both decode into the same lifting inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DescriptorVector {
    Full(DescriptorOutput),
    Bottom(BottomDescriptor),
}

/// What the lifting stage consumes: bottom keypoints in image coordinates
/// (canonical order front-left, front-right, rear-right, rear-left) and the
/// object height in meters.
#[derive(Debug, Clone, Copy)]
pub struct LiftInputs {
    pub bottom_keypoints: [(f64, f64); 4],
    pub height: f64,
}

impl DescriptorOutput {
    pub fn to_values(&self) -> [f64; FULL_LEN] {
        let mut v = [0.0; FULL_LEN];
        for (i, kp) in self.keypoints_norm.iter().enumerate() {
            v[2 * i] = kp.0;
            v[2 * i + 1] = kp.1;
        }
        v[18] = self.dims_scaled.0;
        v[19] = self.dims_scaled.1;
        v[20] = self.dims_scaled.2;
        v[21] = self.alpha_norm;
        v
    }

    pub fn from_values(v: &[f64]) -> Option<Self> {
        if v.len() != FULL_LEN {
            return None;
        }
        let mut keypoints_norm = [(0.0, 0.0); 9];
        for (i, kp) in keypoints_norm.iter_mut().enumerate() {
            *kp = (v[2 * i], v[2 * i + 1]);
        }
        Some(Self {
            keypoints_norm,
            dims_scaled: (v[18], v[19], v[20]),
            alpha_norm: v[21],
        })
    }

    /// Drop everything the reduced network head would not predict.
    pub fn to_bottom(&self) -> BottomDescriptor {
        BottomDescriptor {
            keypoints_norm: [
                self.keypoints_norm[0],
                self.keypoints_norm[1],
                self.keypoints_norm[2],
                self.keypoints_norm[3],
            ],
            height_scaled: self.dims_scaled.2,
        }
    }
}

impl BottomDescriptor {
    pub fn to_values(&self) -> [f64; BOTTOM_LEN] {
        let mut v = [0.0; BOTTOM_LEN];
        for (i, kp) in self.keypoints_norm.iter().enumerate() {
            v[2 * i] = kp.0;
            v[2 * i + 1] = kp.1;
        }
        v[8] = self.height_scaled;
        v
    }

    pub fn from_values(v: &[f64]) -> Option<Self> {
        if v.len() != BOTTOM_LEN {
            return None;
        }
        let mut keypoints_norm = [(0.0, 0.0); 4];
        for (i, kp) in keypoints_norm.iter_mut().enumerate() {
            *kp = (v[2 * i], v[2 * i + 1]);
        }
        Some(Self {
            keypoints_norm,
            height_scaled: v[8],
        })
    }
}

impl DescriptorVector {
    pub fn to_values(&self) -> Vec<f64> {
        match self {
            DescriptorVector::Full(d) => d.to_values().to_vec(),
            DescriptorVector::Bottom(d) => d.to_values().to_vec(),
        }
    }

    /// Layout is inferred from the value count (22 or 9).
    pub fn from_values(v: &[f64]) -> Option<Self> {
        match v.len() {
            FULL_LEN => DescriptorOutput::from_values(v).map(DescriptorVector::Full),
            BOTTOM_LEN => BottomDescriptor::from_values(v).map(DescriptorVector::Bottom),
            _ => None,
        }
    }

    /// Decode the parts the lifting stage needs.
    pub fn lift_inputs(&self, box2d: &Box2D) -> LiftInputs {
        let (kps, h_scaled) = match self {
            DescriptorVector::Full(d) => (
                [
                    d.keypoints_norm[0],
                    d.keypoints_norm[1],
                    d.keypoints_norm[2],
                    d.keypoints_norm[3],
                ],
                d.dims_scaled.2,
            ),
            DescriptorVector::Bottom(d) => (d.keypoints_norm, d.height_scaled),
        };
        LiftInputs {
            bottom_keypoints: kps.map(|kp| denormalize_keypoint(kp, box2d)),
            height: h_scaled * DIM_SCALE,
        }
    }
}

/// Encode ground truth into the descriptor output vector.
pub fn encode(
    box3d: &Box3D,
    camera: &CameraModel,
    box2d: &Box2D,
) -> Result<DescriptorOutput, GeometryError> {
    let corners = box3d.corners();
    let mut keypoints_norm = [(0.0, 0.0); 9];
    for (i, c) in corners.iter().enumerate() {
        let px = camera.project(c)?;
        keypoints_norm[i] = normalize_keypoint(px, box2d);
    }
    let alpha = compute_observation_angle(box3d, camera)?;
    Ok(DescriptorOutput {
        keypoints_norm,
        dims_scaled: (
            box3d.size.width / DIM_SCALE,
            box3d.size.length / DIM_SCALE,
            box3d.size.height / DIM_SCALE,
        ),
        alpha_norm: alpha_to_norm(alpha),
    })
}

/// Everything `encode` packed in, back in image/world units.
#[derive(Debug, Clone, Copy)]
pub struct DecodedDescriptor {
    pub keypoints: [(f64, f64); 9],
    /// (width, length, height) in meters.
    pub dims: (f64, f64, f64),
    pub alpha: f64,
}

pub fn decode(output: &DescriptorOutput, box2d: &Box2D) -> DecodedDescriptor {
    DecodedDescriptor {
        keypoints: output
            .keypoints_norm
            .map(|kp| denormalize_keypoint(kp, box2d)),
        dims: (
            output.dims_scaled.0 * DIM_SCALE,
            output.dims_scaled.1 * DIM_SCALE,
            output.dims_scaled.2 * DIM_SCALE,
        ),
        alpha: norm_to_alpha(output.alpha_norm),
    }
}

/// A second-stage input: tight 2D box plus descriptor vector.
#[derive(Debug, Clone)]
pub struct Detection {
    pub box2d: Box2D,
    pub descriptor: DescriptorVector,
    pub confidence: f64,
    pub class: VehicleClass,
}

/// Ground-truth view of one labeled object, as consumed by the oracles.
#[derive(Debug, Clone)]
pub struct GroundTruthObject {
    pub class: VehicleClass,
    pub box3d: Box3D,
    pub box2d: Box2D,
}

/// Write detections grouped by frame: one line per detection with frame id,
/// class, 2D box, descriptor values and confidence.
pub fn write_detections(frames: &[(u64, Vec<Detection>)]) -> String {
    let mut s = String::new();
    s.push_str(&io::header_line(DETECTIONS_FORMAT, DETECTIONS_VERSION));
    s.push('\n');
    s.push_str("# frame class u_min v_min u_max v_max n_values values... confidence\n");
    for (frame, dets) in frames {
        for d in dets {
            let vals = d.descriptor.to_values();
            s.push_str(&format!(
                "{} {} {} {} {} {} {}",
                frame,
                d.class.as_str(),
                d.box2d.u_min,
                d.box2d.v_min,
                d.box2d.u_max,
                d.box2d.v_max,
                vals.len()
            ));
            for v in vals {
                s.push_str(&format!(" {v}"));
            }
            s.push_str(&format!(" {}\n", d.confidence));
        }
    }
    s
}

pub fn read_detections(path: &Path, text: &str) -> Result<Vec<(u64, Vec<Detection>)>, FormatError> {
    io::check_header(
        path,
        text.lines().next(),
        DETECTIONS_FORMAT,
        DETECTIONS_VERSION,
    )?;
    let mut frames: Vec<(u64, Vec<Detection>)> = Vec::new();
    for (ln, line) in io::data_lines(text) {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() < 8 {
            return Err(FormatError::parse(path, ln, "truncated detection record"));
        }
        let frame: u64 = toks[0]
            .parse()
            .map_err(|_| FormatError::parse(path, ln, "bad frame id"))?;
        let class = VehicleClass::parse(toks[1])
            .ok_or_else(|| FormatError::parse(path, ln, format!("unknown class '{}'", toks[1])))?;
        let mut nums = Vec::with_capacity(toks.len() - 2);
        for t in &toks[2..] {
            nums.push(io::parse_f64(path, ln, t)?);
        }
        let n_values = nums[4] as usize;
        if nums[4].fract() != 0.0 || nums.len() != 5 + n_values + 1 {
            return Err(FormatError::parse(
                path,
                ln,
                format!(
                    "expected {} descriptor values plus confidence, line has {}",
                    n_values,
                    nums.len().saturating_sub(6)
                ),
            ));
        }
        let box2d = Box2D::new(nums[0], nums[1], nums[2], nums[3])
            .map_err(|e| FormatError::parse(path, ln, e.to_string()))?;
        let descriptor = DescriptorVector::from_values(&nums[5..5 + n_values])
            .ok_or_else(|| FormatError::parse(path, ln, "bad descriptor length"))?;
        let confidence = nums[5 + n_values];
        if !(0.0..=1.0).contains(&confidence) {
            return Err(FormatError::parse(
                path,
                ln,
                format!("confidence {confidence} outside [0, 1]"),
            ));
        }
        let det = Detection {
            box2d,
            descriptor,
            confidence,
            class,
        };
        match frames.last_mut() {
            Some((f, v)) if *f == frame => v.push(det),
            _ => frames.push((frame, vec![det])),
        }
    }
    Ok(frames)
}
