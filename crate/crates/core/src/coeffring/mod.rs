//! Scalar substrates: periodic functions of `y`, exact rationals and sparse bivariate
//! polynomials over the rationals.

mod periodic;
mod poly;
mod rational;

pub use periodic::{FitConfig, PeriodicFunction, QuasiPeriodic};
pub use poly::{poly_det, BivariatePolynomial, Exponent, PolyMatrix};
pub use rational::{format_rational, int, parse_rational, pow, rat, sign_pow, to_f64, Rational};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoeffError {
    #[error("function nearly vanishes at y = {y} (|f| = {value:e})")]
    NearVanishing { y: f64, value: f64 },
    #[error("collocation fit residual {residual:e} exceeds tolerance")]
    FitDivergence { residual: f64 },
    #[error("continuous branch of the logarithm lost near y = {y}")]
    BranchTracking { y: f64 },
    #[error("period must be positive and finite, got {0}")]
    InvalidPeriod(f64),
    #[error("Fourier coefficient vector must have odd length, got {0}")]
    EvenCoefficientCount(usize),
    #[error("cannot parse rational {0:?}")]
    RationalParse(String),
}
