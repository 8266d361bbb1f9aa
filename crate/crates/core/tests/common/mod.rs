#![allow(dead_code)]

use std::f64::consts::TAU;

use atomvolt::{hz, CellParams, DensityMatrix, LeadOccupations, Operator, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draw from the parameter box used by the random-equivalence checks.
pub fn random_params(rng: &mut impl Rng) -> CellParams {
    let gamma = hz(rng.random_range(100.0..1000.0));
    CellParams {
        gamma,
        lambda_coupling: hz(rng.random_range(100.0..1000.0)),
        rabi: [hz(rng.random_range(0.0..1200.0)), hz(rng.random_range(0.0..1200.0))],
        detuning: [hz(rng.random_range(-600.0..600.0)), hz(rng.random_range(-600.0..600.0))],
        phase: [rng.random_range(0.0..TAU), rng.random_range(0.0..TAU)],
        leads: LeadOccupations::deep_fermi(gamma),
    }
}

pub fn random_operator(rng: &mut impl Rng) -> Operator {
    Operator::from_fn(|_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_hermitian(rng: &mut impl Rng) -> Operator {
    let a = random_operator(rng);
    (a + a.dagger()).scale(C64::new(0.5, 0.0))
}

/// A A^dagger / tr(A A^dagger) for a random complex A.
pub fn random_density_matrix(rng: &mut impl Rng) -> DensityMatrix {
    let a = random_operator(rng);
    let m = a * a.dagger();
    let tr = m.trace().re;
    DensityMatrix::new(m.scale(C64::new(1.0 / tr, 0.0))).expect("valid by construction")
}
