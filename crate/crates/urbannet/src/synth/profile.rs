use thiserror::Error;

use crate::tin::{build_tin, TinError, TinMap};

/// Maximum longitudinal grade accepted by the generator.
pub const MAX_GRADE: f64 = 0.15;
/// Maximum lateral cross-slope accepted by the generator.
pub const MAX_CROSS_SLOPE: f64 = 0.10;

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("invalid road profile: {0}")]
    Invalid(String),
    #[error(transparent)]
    Tin(#[from] TinError),
}

/// Parametric road shapes. Crest and sag are quadratic vertical curves in
/// the road (X) direction, the standard vertical-curve form; `curvature` is
/// |d2z/dx2| in 1/m.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProfileKind {
    Flat,
    Grade { slope: f64 },
    Crest { curvature: f64 },
    Sag { curvature: f64 },
    Banked { cross_slope: f64 },
}

/// Plan-view rectangle covered by the road surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanRect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoadProfile {
    pub kind: ProfileKind,
    pub extent: PlanRect,
    pub sample_spacing: f64,
}

impl RoadProfile {
    pub fn new(
        kind: ProfileKind,
        extent: PlanRect,
        sample_spacing: f64,
    ) -> Result<Self, ProfileError> {
        if !sample_spacing.is_finite() || sample_spacing <= 0.0 {
            return Err(ProfileError::Invalid(format!(
                "sample spacing must be positive, got {sample_spacing}"
            )));
        }
        if extent.x_max <= extent.x_min || extent.y_max <= extent.y_min {
            return Err(ProfileError::Invalid("empty extent".into()));
        }
        match kind {
            ProfileKind::Flat => {}
            ProfileKind::Grade { slope } => {
                if slope.abs() > MAX_GRADE {
                    return Err(ProfileError::Invalid(format!(
                        "grade {slope} exceeds |{MAX_GRADE}|"
                    )));
                }
            }
            ProfileKind::Crest { curvature } | ProfileKind::Sag { curvature } => {
                if curvature < 0.0 {
                    return Err(ProfileError::Invalid("curvature must be >= 0".into()));
                }
                // The induced grade at the extent ends must stay realistic.
                let half = 0.5 * (extent.x_max - extent.x_min);
                let max_slope = curvature * half;
                if max_slope > MAX_GRADE {
                    return Err(ProfileError::Invalid(format!(
                        "curvature {curvature} induces grade {max_slope:.3} beyond {MAX_GRADE}"
                    )));
                }
            }
            ProfileKind::Banked { cross_slope } => {
                if cross_slope.abs() > MAX_CROSS_SLOPE {
                    return Err(ProfileError::Invalid(format!(
                        "cross slope {cross_slope} exceeds |{MAX_CROSS_SLOPE}|"
                    )));
                }
            }
        }
        Ok(Self {
            kind,
            extent,
            sample_spacing,
        })
    }

    /// Analytic surface elevation.
    pub fn elevation(&self, x: f64, y: f64) -> f64 {
        match self.kind {
            ProfileKind::Flat => 0.0,
            ProfileKind::Grade { slope } => slope * x,
            ProfileKind::Crest { curvature } => {
                let mid = 0.5 * (self.extent.x_min + self.extent.x_max);
                -0.5 * curvature * (x - mid) * (x - mid)
            }
            ProfileKind::Sag { curvature } => {
                let mid = 0.5 * (self.extent.x_min + self.extent.x_max);
                0.5 * curvature * (x - mid) * (x - mid)
            }
            ProfileKind::Banked { cross_slope } => cross_slope * y,
        }
    }

    /// Sample the surface on a grid and triangulate it.
    pub fn build_map(&self) -> Result<TinMap, ProfileError> {
        let e = self.extent;
        let nx = ((e.x_max - e.x_min) / self.sample_spacing).ceil().max(1.0) as usize;
        let ny = ((e.y_max - e.y_min) / self.sample_spacing).ceil().max(1.0) as usize;
        let mut pts = Vec::with_capacity((nx + 1) * (ny + 1));
        for i in 0..=nx {
            let x = e.x_min + (e.x_max - e.x_min) * i as f64 / nx as f64;
            for j in 0..=ny {
                let y = e.y_min + (e.y_max - e.y_min) * j as f64 / ny as f64;
                pts.push((x, y, self.elevation(x, y)));
            }
        }
        Ok(build_tin(&pts)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn extent() -> PlanRect {
        PlanRect {
            x_min: 0.0,
            x_max: 160.0,
            y_min: -20.0,
            y_max: 20.0,
        }
    }

    #[test]
    fn limits_are_enforced() {
        assert!(RoadProfile::new(ProfileKind::Grade { slope: 0.2 }, extent(), 10.0).is_err());
        assert!(
            RoadProfile::new(ProfileKind::Banked { cross_slope: 0.2 }, extent(), 10.0).is_err()
        );
        assert!(RoadProfile::new(ProfileKind::Flat, extent(), 0.0).is_err());
        // Curvature 0.01 over an 80 m half-extent implies grade 0.8.
        assert!(RoadProfile::new(ProfileKind::Crest { curvature: 0.01 }, extent(), 10.0).is_err());
        assert!(RoadProfile::new(ProfileKind::Crest { curvature: 0.001 }, extent(), 10.0).is_ok());
    }

    #[test]
    fn elevations_match_the_analytic_forms() {
        let g = RoadProfile::new(ProfileKind::Grade { slope: 0.08 }, extent(), 10.0).unwrap();
        assert!((g.elevation(50.0, -3.0) - 4.0).abs() < 1e-12);
        let b =
            RoadProfile::new(ProfileKind::Banked { cross_slope: 0.05 }, extent(), 10.0).unwrap();
        assert!((b.elevation(50.0, 10.0) - 0.5).abs() < 1e-12);
        let c = RoadProfile::new(ProfileKind::Crest { curvature: 0.001 }, extent(), 10.0).unwrap();
        assert!((c.elevation(80.0, 0.0) - 0.0).abs() < 1e-12); // apex at mid
        assert!(c.elevation(0.0, 0.0) < -3.0);
    }

    #[test]
    fn built_map_matches_profile_at_grid_points() {
        let p = RoadProfile::new(ProfileKind::Grade { slope: 0.05 }, extent(), 10.0).unwrap();
        let map = p.build_map().unwrap();
        let s = map.query(75.0, 5.0).unwrap();
        // A grade is planar, so the TIN reproduces it exactly everywhere.
        assert!((s.point.z - p.elevation(75.0, 5.0)).abs() < 1e-9);
    }
}
