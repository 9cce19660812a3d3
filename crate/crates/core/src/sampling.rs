//! Seeded random draws of parameters and input states.
//!
//! Every generator in the crate is a `ChaCha8Rng` seeded from a `u64`, so a
//! seed fully determines a run on every platform.

use std::f64::consts::PI;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::gates::CUParams;
use crate::protocol::InputQubit;
use crate::qmath::{phase, Cplx, UnitVec3};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point on the unit sphere.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R) -> UnitVec3 {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let r = (1.0 - z * z).max(0.0).sqrt();
    UnitVec3::normalize(r * phi.cos(), r * phi.sin(), z).expect("nonzero")
}

/// Haar-random qubit with a random global phase.
pub fn input_qubit<R: Rng + ?Sized>(rng: &mut R) -> InputQubit {
    let cos_t: f64 = rng.random_range(-1.0..=1.0);
    let half = cos_t.clamp(-1.0, 1.0).acos() / 2.0;
    let rel = phase(rng.random_range(0.0..2.0 * PI));
    let glob = phase(rng.random_range(0.0..2.0 * PI));
    let a0 = glob * Cplx::new(half.cos(), 0.0);
    let a1 = glob * rel * Cplx::new(half.sin(), 0.0);
    InputQubit::new(a0, a1).expect("normalized by construction")
}

/// `α`, `θ` uniform in `[−2π, 2π)`, axis uniform on the sphere, default `n⊥`.
pub fn cu_params<R: Rng + ?Sized>(rng: &mut R) -> CUParams {
    let alpha = rng.random_range(-2.0 * PI..2.0 * PI);
    let theta = rng.random_range(-2.0 * PI..2.0 * PI);
    CUParams::new(alpha, theta, unit_vector(rng)).expect("valid by construction")
}

/// Angle uniform in `[0, 2π)`.
pub fn angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(0.0..2.0 * PI)
}
