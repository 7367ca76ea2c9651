use super::{GeometryError, Vec3, WorldPoint};

/// A world-space ray with unit direction.
#[derive(Debug, Clone, Copy)]
pub struct Ray {
    pub origin: WorldPoint,
    direction: Vec3,
}

impl Ray {
    /// Normalizes `direction`; fails when its length is below 1e-12.
    pub fn new(origin: WorldPoint, direction: Vec3) -> Result<Self, GeometryError> {
        let n = direction.norm();
        if n < 1e-12 {
            return Err(GeometryError::ZeroDirection);
        }
        Ok(Self {
            origin,
            direction: direction / n,
        })
    }

    pub fn direction(&self) -> Vec3 {
        self.direction
    }

    pub fn point_at(&self, t: f64) -> WorldPoint {
        self.origin + self.direction * t
    }

    /// Distance from `p` to the closest point on the (infinite) ray line.
    pub fn distance_to_point(&self, p: &WorldPoint) -> f64 {
        let d = p - self.origin;
        (d - self.direction * d.dot(&self.direction)).norm()
    }
}
