use super::{EulerAngles, GeometryError, Mat3, Vec3, WorldPoint};

/// Axis-aligned image rectangle in pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box2D {
    pub u_min: f64,
    pub v_min: f64,
    pub u_max: f64,
    pub v_max: f64,
}

impl Box2D {
    pub fn new(u_min: f64, v_min: f64, u_max: f64, v_max: f64) -> Result<Self, GeometryError> {
        if !(u_max > u_min && v_max > v_min) || !(u_min.is_finite() && v_min.is_finite()) {
            return Err(GeometryError::InvalidBox(format!(
                "2D box must have positive extent, got [{u_min}, {v_min}, {u_max}, {v_max}]"
            )));
        }
        Ok(Self {
            u_min,
            v_min,
            u_max,
            v_max,
        })
    }

    pub fn width(&self) -> f64 {
        self.u_max - self.u_min
    }

    pub fn height(&self) -> f64 {
        self.v_max - self.v_min
    }

    pub fn center(&self) -> (f64, f64) {
        (
            0.5 * (self.u_min + self.u_max),
            0.5 * (self.v_min + self.v_max),
        )
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        u >= self.u_min && u <= self.u_max && v >= self.v_min && v <= self.v_max
    }
}

/// Object extents in meters: length along object X, width along Y, height
/// along Z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dimensions {
    pub width: f64,
    pub length: f64,
    pub height: f64,
}

impl Dimensions {
    pub fn new(width: f64, length: f64, height: f64) -> Result<Self, GeometryError> {
        if !(width > 0.0 && length > 0.0 && height > 0.0) {
            return Err(GeometryError::InvalidBox(format!(
                "dimensions must be positive, got w={width} l={length} h={height}"
            )));
        }
        Ok(Self {
            width,
            length,
            height,
        })
    }
}

/// 9-DOF oriented box: centroid position, size and three rotations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Box3D {
    pub center: WorldPoint,
    pub size: Dimensions,
    pub rotation: EulerAngles,
}

/// Index of the centroid entry in [`Box3D::corners`].
pub const CENTROID_INDEX: usize = 8;

/// Object-frame corner offsets in half-extent units, canonical order:
/// 0..3 bottom face starting front-left and continuing front-right,
/// rear-right, rear-left; 4..7 the corresponding top corners.
const CORNER_SIGNS: [[f64; 3]; 8] = [
    [1.0, 1.0, -1.0],
    [1.0, -1.0, -1.0],
    [-1.0, -1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [1.0, 1.0, 1.0],
    [1.0, -1.0, 1.0],
    [-1.0, -1.0, 1.0],
    [-1.0, 1.0, 1.0],
];

impl Box3D {
    pub fn new(
        center: WorldPoint,
        size: Dimensions,
        rotation: EulerAngles,
    ) -> Result<Self, GeometryError> {
        if !center.coords.iter().all(|c| c.is_finite()) {
            return Err(GeometryError::InvalidBox("non-finite center".into()));
        }
        Ok(Self {
            center,
            size,
            rotation,
        })
    }

    pub fn rotation_matrix(&self) -> Mat3 {
        self.rotation.to_matrix()
    }

    /// The 8 corners in canonical order followed by the centroid (9 points).
    pub fn corners(&self) -> [WorldPoint; 9] {
        let r = self.rotation_matrix();
        let half = Vec3::new(
            0.5 * self.size.length,
            0.5 * self.size.width,
            0.5 * self.size.height,
        );
        let mut out = [self.center; 9];
        for (i, s) in CORNER_SIGNS.iter().enumerate() {
            let local = Vec3::new(s[0] * half.x, s[1] * half.y, s[2] * half.z);
            out[i] = self.center + r * local;
        }
        out[CENTROID_INDEX] = self.center;
        out
    }

    /// Bottom-face corners (indices 0..3 of the canonical order).
    pub fn bottom_corners(&self) -> [WorldPoint; 4] {
        let c = self.corners();
        [c[0], c[1], c[2], c[3]]
    }

    pub fn volume(&self) -> f64 {
        self.size.width * self.size.length * self.size.height
    }
}
