//! Oracle descriptors: stand-ins for the trained network so the full
//! pipeline runs and can be benchmarked without the (unavailable) training
//! dataset. Perfect mode re-encodes ground truth; Noisy mode corrupts it
//! with seeded per-element Gaussian noise and derives a confidence that
//! ranks cleaner draws higher.

use crate::seeded;

use super::{encode, DescriptorOutput, DescriptorVector, Detection, GroundTruthObject};
use crate::geometry::{CameraModel, GeometryError};

/// Noise levels in output-vector units: keypoints in normalized units, dims
/// on the /10 scale, alpha on the unit scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub sigma_kp: f64,
    pub sigma_dim: f64,
    pub sigma_alpha: f64,
    /// Confidence decay constant: confidence = exp(-r / rho) where r is the
    /// Mahalanobis norm of the noise draw.
    pub rho: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn with_seed(sigma_kp: f64, sigma_dim: f64, sigma_alpha: f64, seed: u64) -> Self {
        Self {
            sigma_kp,
            sigma_dim,
            sigma_alpha,
            rho: 4.0,
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleMode {
    Perfect,
    Noisy(NoiseSpec),
}

fn element_sigma(spec: &NoiseSpec, element: usize) -> f64 {
    match element {
        0..=17 => spec.sigma_kp,
        18..=20 => spec.sigma_dim,
        _ => spec.sigma_alpha,
    }
}

/// Emit detections for a labeled frame.
///
/// Noise draws are keyed per (seed, frame, detection, element index), so the
/// same elements receive the same noise whether the full or the bottom-only
/// vector is emitted, and reruns are bit-exact.
pub fn oracle_descriptor(
    frame_id: u64,
    objects: &[GroundTruthObject],
    camera: &CameraModel,
    mode: &OracleMode,
    bottom_only: bool,
) -> Result<Vec<Detection>, GeometryError> {
    let mut out = Vec::with_capacity(objects.len());
    for (det_idx, obj) in objects.iter().enumerate() {
        let clean = encode(&obj.box3d, camera, &obj.box2d)?;
        let (descriptor, confidence) = match mode {
            OracleMode::Perfect => (clean, 1.0),
            OracleMode::Noisy(spec) => {
                let mut values = clean.to_values();
                let mut mahalanobis_sq = 0.0;
                for (elem, v) in values.iter_mut().enumerate() {
                    let sigma = element_sigma(spec, elem);
                    if sigma <= 0.0 {
                        continue;
                    }
                    let g = seeded::gaussian(&[spec.seed, frame_id, det_idx as u64, elem as u64]);
                    mahalanobis_sq += g * g;
                    *v += sigma * g;
                }
                // Keep the vector inside its own invariants.
                for v in &mut values[18..=20] {
                    *v = v.max(1e-6);
                }
                values[21] = values[21].clamp(0.0, 1.0);
                let noisy = DescriptorOutput::from_values(&values).unwrap();
                (noisy, (-mahalanobis_sq.sqrt() / spec.rho).exp())
            }
        };
        let descriptor = if bottom_only {
            DescriptorVector::Bottom(descriptor.to_bottom())
        } else {
            DescriptorVector::Full(descriptor)
        };
        out.push(Detection {
            box2d: obj.box2d,
            descriptor,
            confidence,
            class: obj.class,
        });
    }
    Ok(out)
}
