//! Deterministic Gaussian elevation noise keyed on quantized plan-view
//! positions: a pure function of (seed, position rounded to 1 mm), so
//! repeated queries at the same location agree and runs reproduce bit-exactly
//! for a fixed seed.

use crate::seeded;

const QUANTUM: f64 = 1000.0; // quantization steps per meter (1 mm)

/// Gaussian elevation offset at plan-view position (x, y).
pub fn elevation_offset(seed: u64, sigma: f64, x: f64, y: f64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    let xq = (x * QUANTUM).round() as i64 as u64;
    let yq = (y * QUANTUM).round() as i64 as u64;
    sigma * seeded::gaussian(&[seed, xq, yq])
}

/// Gaussian offset keyed on an integer index (used for per-vertex
/// perturbation at construction time).
pub fn indexed_offset(seed: u64, sigma: f64, index: u64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    sigma * seeded::gaussian(&[seed, index])
}
