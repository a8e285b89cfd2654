#![allow(dead_code)]

use laplace_toda::coeffring::{FitConfig, PeriodicFunction};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const GRID: usize = 64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// High-degree fit configuration for randomized semi-discrete checks.
pub fn fine_cfg() -> FitConfig {
    FitConfig::with_degree(64)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn konst(t: f64, v: f64) -> PeriodicFunction {
    PeriodicFunction::real_constant(t, v)
}

pub fn assert_close(a: Complex64, b: Complex64, tol: f64, what: &str) {
    assert!((a - b).norm() <= tol, "{what}: {a} vs {b} (tol {tol:e})");
}

/// The three period lattices used by the exact discrete checks.
pub fn test_lattices() -> Vec<laplace_toda::disc::PeriodMatrix> {
    use laplace_toda::disc::PeriodMatrix;
    vec![
        PeriodMatrix::diag(2, 2).unwrap(),
        PeriodMatrix::new(2, 0, 1, 2).unwrap(),
        PeriodMatrix::diag(3, 2).unwrap(),
    ]
}
