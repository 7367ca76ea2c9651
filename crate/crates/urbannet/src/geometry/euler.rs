use super::{wrap_angle, Mat3};

/// Euler angles in radians, composed intrinsically as yaw about Z, then pitch
/// about the intermediate Y, then roll about the resulting X.
///
/// Pitch is positive nose-up: with Y pointing left in a Z-up frame, the
/// rotation applied about the intermediate axis is `-pitch`, so a vehicle
/// heading up a grade `s` carries pitch `atan(s)`. Roll follows the right-hand
/// rule about the forward axis (positive roll lifts the left side).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub yaw: f64,
    pub pitch: f64,
    pub roll: f64,
}

/// Result of factoring a rotation matrix back into Euler angles.
#[derive(Debug, Clone, Copy)]
pub struct EulerDecomposition {
    pub angles: EulerAngles,
    /// Set when |pitch| is within 1e-6 of pi/2; roll is then fixed to 0 and
    /// yaw absorbs the remaining rotation.
    pub gimbal_lock: bool,
}

const GIMBAL_EPS: f64 = 1e-6;

impl EulerAngles {
    /// Build from raw radians, wrapping each angle to [-pi, pi].
    pub fn new(yaw: f64, pitch: f64, roll: f64) -> Self {
        Self {
            yaw: wrap_angle(yaw),
            pitch: wrap_angle(pitch),
            roll: wrap_angle(roll),
        }
    }

    pub fn zero() -> Self {
        Self {
            yaw: 0.0,
            pitch: 0.0,
            roll: 0.0,
        }
    }

    /// Rotation matrix R = Rz(yaw) * Ry(-pitch) * Rx(roll).
    pub fn to_matrix(self) -> Mat3 {
        let (sy, cy) = self.yaw.sin_cos();
        let (sp, cp) = self.pitch.sin_cos();
        let (sr, cr) = self.roll.sin_cos();
        Mat3::new(
            cy * cp,
            -sy * cr - cy * sp * sr,
            sy * sr - cy * sp * cr,
            sy * cp,
            cy * cr - sy * sp * sr,
            -cy * sr - sy * sp * cr,
            sp,
            cp * sr,
            cp * cr,
        )
    }

    /// Factor an orthonormal matrix into Euler angles.
    ///
    /// Away from gimbal lock the round trip through [`EulerAngles::to_matrix`]
    /// is exact to 1e-9. At |pitch| = pi/2 the decomposition is not unique;
    /// the canonical solution with roll = 0 is returned and flagged.
    pub fn from_matrix(m: &Mat3) -> EulerDecomposition {
        let sp = m[(2, 0)].clamp(-1.0, 1.0);
        let pitch = sp.asin();
        if (pitch.abs() - std::f64::consts::FRAC_PI_2).abs() < GIMBAL_EPS {
            // Only yaw +/- roll is observable; put everything in yaw.
            let yaw = (-m[(0, 1)]).atan2(m[(1, 1)]);
            return EulerDecomposition {
                angles: EulerAngles::new(yaw, pitch, 0.0),
                gimbal_lock: true,
            };
        }
        let yaw = m[(1, 0)].atan2(m[(0, 0)]);
        let roll = m[(2, 1)].atan2(m[(2, 2)]);
        EulerDecomposition {
            angles: EulerAngles::new(yaw, pitch, roll),
            gimbal_lock: false,
        }
    }
}
