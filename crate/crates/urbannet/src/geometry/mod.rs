//! Shared geometric types and kernels: camera projection, rigid transforms,
//! oriented boxes and Euler-angle conventions.
//!
//! Frames: the world frame is right-handed with Z up (gravity-aligned); the
//! camera frame is X right, Y down, Z forward. Object frames put X along the
//! vehicle length (forward), Y along the width (left) and Z along the height.

mod boxes;
mod camera;
mod euler;
mod ray;

pub use boxes::{Box2D, Box3D, Dimensions};
pub use camera::CameraModel;
pub use euler::{EulerAngles, EulerDecomposition};
pub use ray::Ray;

use thiserror::Error;

pub type Mat3 = nalgebra::Matrix3<f64>;
pub type Vec3 = nalgebra::Vector3<f64>;
pub type WorldPoint = nalgebra::Point3<f64>;

/// Errors produced by the geometric kernels.
#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("point is behind the camera (camera-frame z = {z})")]
    BehindCamera { z: f64 },
    #[error("invalid camera: {0}")]
    InvalidCamera(String),
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("direction vector has (near-)zero length")]
    ZeroDirection,
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
}

/// Wrap an angle to [-pi, pi].
pub fn wrap_angle(a: f64) -> f64 {
    let mut x = a.rem_euclid(std::f64::consts::TAU);
    if x > std::f64::consts::PI {
        x -= std::f64::consts::TAU;
    }
    x
}

/// True when `m` is orthonormal with determinant +1, to tolerance `tol`.
pub fn is_rotation(m: &Mat3, tol: f64) -> bool {
    let ident_err = (m.transpose() * m - Mat3::identity()).norm();
    ident_err <= tol && (m.determinant() - 1.0).abs() <= tol
}
