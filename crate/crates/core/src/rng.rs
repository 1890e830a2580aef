//! Seeded, splittable randomness.
//!
//! One `u64` seed drives a whole experiment. Each run and each use within a
//! run gets its own ChaCha stream, so results do not depend on execution order
//! or thread count.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::protocol::UnknownQubit;

/// What a stream is used for. The same run id and purpose always yield the
/// same stream, so both protocols see identical input states.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StreamPurpose {
    InputState = 0,
    Measurement = 1,
    Distillation = 2,
    Verification = 3,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedTree {
    seed: u64,
}

impl SeedTree {
    pub fn new(seed: u64) -> Self {
        SeedTree { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self, run_id: u64, purpose: StreamPurpose) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream((run_id << 4) | purpose as u64);
        rng
    }
}

/// Haar-uniform single-qubit state: cos(theta) uniform on [-1, 1] and a
/// uniform relative phase.
pub fn haar_qubit<R: Rng + ?Sized>(rng: &mut R) -> UnknownQubit {
    let cos_theta: f64 = 1.0 - 2.0 * rng.gen::<f64>();
    let phi = 2.0 * PI * rng.gen::<f64>();
    let half = cos_theta.clamp(-1.0, 1.0).acos() / 2.0;
    UnknownQubit::from_angles(2.0 * half, phi)
}

/// Normalized (alpha, beta) with independent complex Gaussian components, so
/// alpha carries a phase too.
pub fn random_amplitudes<R: Rng + ?Sized>(rng: &mut R) -> (Complex64, Complex64) {
    let mut gauss = || {
        // Box-Muller
        let u1: f64 = 1.0 - rng.gen::<f64>();
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
    };
    let a = Complex64::new(gauss(), gauss());
    let b = Complex64::new(gauss(), gauss());
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    (a / norm, b / norm)
}
