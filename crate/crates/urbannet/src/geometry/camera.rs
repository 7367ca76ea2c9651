use std::path::Path;

use super::{is_rotation, GeometryError, Mat3, Ray, Vec3, WorldPoint};
use crate::io::{self, FormatError};

const CAMERA_FORMAT: &str = "camera";
const CAMERA_VERSION: u32 = 1;

/// Ideal pinhole camera with rigid world-to-camera extrinsics.
///
/// Camera frame: X right, Y down, Z forward (optical axis). A world point `p`
/// maps to `R * p + t` in the camera frame and projects to
/// `(fx * x / z + cx, fy * y / z + cy)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CameraModel {
    fx: f64,
    fy: f64,
    cx: f64,
    cy: f64,
    image_width: u32,
    image_height: u32,
    rotation: Mat3,
    translation: Vec3,
}

impl CameraModel {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        image_width: u32,
        image_height: u32,
        rotation: Mat3,
        translation: Vec3,
    ) -> Result<Self, GeometryError> {
        if !(fx > 0.0 && fy > 0.0) {
            return Err(GeometryError::InvalidCamera(format!(
                "focal lengths must be positive, got fx={fx} fy={fy}"
            )));
        }
        if image_width == 0 || image_height == 0 {
            return Err(GeometryError::InvalidCamera(
                "image dimensions must be positive".into(),
            ));
        }
        if !is_rotation(&rotation, 1e-9) {
            return Err(GeometryError::InvalidCamera(
                "extrinsic rotation is not orthonormal with det +1".into(),
            ));
        }
        if !translation.iter().all(|c| c.is_finite()) || !(cx.is_finite() && cy.is_finite()) {
            return Err(GeometryError::InvalidCamera("non-finite parameter".into()));
        }
        Ok(Self {
            fx,
            fy,
            cx,
            cy,
            image_width,
            image_height,
            rotation,
            translation,
        })
    }

    /// Build a camera at `position` looking along `forward` (world frame),
    /// with the image X axis kept horizontal. `forward` must not be vertical.
    #[allow(clippy::too_many_arguments)]
    pub fn from_pose(
        fx: f64,
        fy: f64,
        cx: f64,
        cy: f64,
        image_width: u32,
        image_height: u32,
        position: WorldPoint,
        forward: Vec3,
    ) -> Result<Self, GeometryError> {
        let f = forward;
        if f.norm() < 1e-12 {
            return Err(GeometryError::ZeroDirection);
        }
        let z_cam = f / f.norm();
        let up = Vec3::z();
        let x_cam = z_cam.cross(&up);
        if x_cam.norm() < 1e-9 {
            return Err(GeometryError::InvalidCamera(
                "camera forward axis may not be vertical".into(),
            ));
        }
        let x_cam = x_cam / x_cam.norm();
        let y_cam = z_cam.cross(&x_cam);
        let rotation = Mat3::from_rows(&[x_cam.transpose(), y_cam.transpose(), z_cam.transpose()]);
        let translation = -(rotation * position.coords);
        Self::new(
            fx,
            fy,
            cx,
            cy,
            image_width,
            image_height,
            rotation,
            translation,
        )
    }

    pub fn fx(&self) -> f64 {
        self.fx
    }

    pub fn fy(&self) -> f64 {
        self.fy
    }

    pub fn cx(&self) -> f64 {
        self.cx
    }

    pub fn cy(&self) -> f64 {
        self.cy
    }

    pub fn image_width(&self) -> u32 {
        self.image_width
    }

    pub fn image_height(&self) -> u32 {
        self.image_height
    }

    pub fn rotation(&self) -> &Mat3 {
        &self.rotation
    }

    pub fn translation(&self) -> Vec3 {
        self.translation
    }

    /// Camera center in the world frame.
    pub fn center(&self) -> WorldPoint {
        WorldPoint::from(-(self.rotation.transpose() * self.translation))
    }

    pub fn to_camera_frame(&self, p: &WorldPoint) -> Vec3 {
        self.rotation * p.coords + self.translation
    }

    /// Project a world point to pixel coordinates. Points may land outside
    /// the image bounds; no clipping is applied.
    pub fn project(&self, p: &WorldPoint) -> Result<(f64, f64), GeometryError> {
        let c = self.to_camera_frame(p);
        if c.z <= 1e-9 {
            return Err(GeometryError::BehindCamera { z: c.z });
        }
        Ok((self.fx * c.x / c.z + self.cx, self.fy * c.y / c.z + self.cy))
    }

    /// Project a point already expressed in the camera frame.
    pub fn project_camera_point(&self, c: &Vec3) -> Result<(f64, f64), GeometryError> {
        if c.z <= 1e-9 {
            return Err(GeometryError::BehindCamera { z: c.z });
        }
        Ok((self.fx * c.x / c.z + self.cx, self.fy * c.y / c.z + self.cy))
    }

    /// World-frame ray from the camera center through pixel (u, v).
    pub fn pixel_ray(&self, u: f64, v: f64) -> Ray {
        let dir_cam = Vec3::new((u - self.cx) / self.fx, (v - self.cy) / self.fy, 1.0);
        let dir_world = self.rotation.transpose() * dir_cam;
        Ray::new(self.center(), dir_world).expect("pixel ray direction cannot be zero")
    }

    pub fn contains_pixel(&self, u: f64, v: f64) -> bool {
        u >= 0.0 && u <= self.image_width as f64 && v >= 0.0 && v <= self.image_height as f64
    }

    /// Serialize as the camera text format: `fx fy cx cy width height` keys
    /// plus a row-major 3x4 world-to-camera `extrinsic` matrix.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&io::header_line(CAMERA_FORMAT, CAMERA_VERSION));
        s.push('\n');
        s.push_str(&format!("fx {}\n", self.fx));
        s.push_str(&format!("fy {}\n", self.fy));
        s.push_str(&format!("cx {}\n", self.cx));
        s.push_str(&format!("cy {}\n", self.cy));
        s.push_str(&format!("width {}\n", self.image_width));
        s.push_str(&format!("height {}\n", self.image_height));
        s.push_str("extrinsic");
        for r in 0..3 {
            for c in 0..3 {
                s.push_str(&format!(" {}", self.rotation[(r, c)]));
            }
            s.push_str(&format!(" {}", self.translation[r]));
        }
        s.push('\n');
        s
    }

    pub fn from_text(path: &Path, text: &str) -> Result<Self, FormatError> {
        io::check_header(path, text.lines().next(), CAMERA_FORMAT, CAMERA_VERSION)?;
        let mut fx = None;
        let mut fy = None;
        let mut cx = None;
        let mut cy = None;
        let mut width = None;
        let mut height = None;
        let mut extrinsic: Option<(Mat3, Vec3)> = None;
        for (ln, line) in io::data_lines(text) {
            let mut toks = line.split_whitespace();
            let key = toks.next().unwrap();
            match key {
                "fx" | "fy" | "cx" | "cy" | "width" | "height" => {
                    let val = toks
                        .next()
                        .ok_or_else(|| io::FormatError::parse(path, ln, "missing value"))?;
                    let v = io::parse_f64(path, ln, val)?;
                    match key {
                        "fx" => fx = Some(v),
                        "fy" => fy = Some(v),
                        "cx" => cx = Some(v),
                        "cy" => cy = Some(v),
                        "width" => width = Some(v),
                        _ => height = Some(v),
                    }
                }
                "extrinsic" => {
                    let vals: Vec<f64> = toks
                        .map(|t| io::parse_f64(path, ln, t))
                        .collect::<Result<_, _>>()?;
                    if vals.len() != 12 {
                        return Err(io::FormatError::parse(
                            path,
                            ln,
                            format!("extrinsic needs 12 values, got {}", vals.len()),
                        ));
                    }
                    let mut rot = Mat3::zeros();
                    let mut t = Vec3::zeros();
                    for r in 0..3 {
                        for c in 0..3 {
                            rot[(r, c)] = vals[r * 4 + c];
                        }
                        t[r] = vals[r * 4 + 3];
                    }
                    extrinsic = Some((rot, t));
                }
                other => {
                    return Err(io::FormatError::parse(
                        path,
                        ln,
                        format!("unknown key '{other}'"),
                    ));
                }
            }
        }
        let missing =
            |k: &str| io::FormatError::parse(path, 0, format!("missing required key '{k}'"));
        let (rotation, translation) = extrinsic.ok_or_else(|| missing("extrinsic"))?;
        let cam = CameraModel::new(
            fx.ok_or_else(|| missing("fx"))?,
            fy.ok_or_else(|| missing("fy"))?,
            cx.ok_or_else(|| missing("cx"))?,
            cy.ok_or_else(|| missing("cy"))?,
            width.ok_or_else(|| missing("width"))? as u32,
            height.ok_or_else(|| missing("height"))? as u32,
            rotation,
            translation,
        )
        .map_err(|e| io::FormatError::parse(path, 0, e.to_string()))?;
        Ok(cam)
    }

    pub fn write_file(&self, path: &Path) -> Result<(), FormatError> {
        io::write_atomic(path, self.to_text().as_bytes())?;
        Ok(())
    }

    pub fn read_file(path: &Path) -> Result<Self, FormatError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_text(path, &text)
    }
}
