//! Shared fixtures for the benchmarks and timing tests.

use owlball::experiment::{generate_instance, instance_rng};
use owlball::Instance;

/// Radius fractions and standard deviations of the default experiment grid.
pub const BETAS: [f64; 5] = [1e-3, 1e-2, 1e-1, 0.5, 0.8];
pub const SIGMAS: [f64; 3] = [1e-3, 1.0, 1e3];

/// Instance `rep` of grid cell `(beta, sigma)` at dimension `n`.
pub fn fixture(n: usize, beta: f64, sigma: f64, rep: usize) -> Instance {
    let cell = BETAS.iter().position(|b| *b == beta).unwrap_or(0) * SIGMAS.len()
        + SIGMAS.iter().position(|s| *s == sigma).unwrap_or(0);
    generate_instance(n, sigma, beta, &mut instance_rng(0x0b11, cell, rep))
        .expect("grid parameters are valid")
}
