//! Deterministic pseudo-random primitives: a splitmix-style mixer and a
//! Box-Muller Gaussian derived from hashed state. All stochastic behavior in
//! the crate flows from explicit seeds through these, so identical inputs
//! reproduce bit-exactly across runs.

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    // splitmix64 finalizer
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fold a sequence of words into one hashed state.
#[inline]
pub fn mix_words(words: &[u64]) -> u64 {
    let mut state = 0x853C_49E6_748F_EA9B;
    for &w in words {
        state = mix64(state ^ w);
    }
    state
}

#[inline]
fn to_unit(bits: u64) -> f64 {
    // 53 mantissa bits -> [0, 1)
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform deviate in [0, 1) from a hashed state.
#[inline]
pub fn unit_from_state(state: u64) -> f64 {
    to_unit(mix64(state))
}

/// Standard normal deviate from a hashed state (Box-Muller).
pub fn gaussian_from_state(state: u64) -> f64 {
    let a = mix64(state);
    let b = mix64(state ^ 0xD6E8_FEB8_6659_FD93);
    let u1 = to_unit(a);
    let u2 = to_unit(b);
    // 1 - u1 in (0, 1] keeps the log finite.
    let r = (-2.0 * (1.0 - u1).ln()).sqrt();
    r * (std::f64::consts::TAU * u2).cos()
}

/// Standard normal deviate keyed on a word sequence.
pub fn gaussian(words: &[u64]) -> f64 {
    gaussian_from_state(mix_words(words))
}
